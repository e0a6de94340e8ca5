//! Monotonicity monitors over recorded trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::diagnostics::{ancient_harnack_quantity, harnack_quantity_raw};
use crate::error::{Error, Result};
use crate::record::FunctionalRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    MonotoneIncreasing,
    MonotoneDecreasing,
    /// Finite throughout; `sup` is the largest observed value.
    Bounded { sup: f64 },
    /// An identity held at every sample.
    Satisfied,
    /// First violation.
    Violated { t: f64, magnitude: f64 },
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self, Verdict::Violated { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub magnitude: f64,
}

/// Result of one monitor. Serializes as
/// `{name, tolerance, verdict, violations: [{t, magnitude}], samples_ref}`;
/// the samples themselves stay in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub name: String,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub samples: Vec<(f64, f64)>,
    pub samples_ref: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Up,
    StrictlyDown,
}

impl MonitorReport {
    fn monotone(name: &str, samples: Vec<(f64, f64)>, tol: f64, dir: Direction) -> Self {
        let mut violations = Vec::new();
        for w in samples.windows(2) {
            let (_, a) = w[0];
            let (t, b) = w[1];
            let drop = match dir {
                Direction::Up => a - b,
                Direction::StrictlyDown => b - a,
            };
            let bad = match dir {
                Direction::StrictlyDown => drop >= 0.0,
                Direction::Up => drop > tol,
            };
            if bad || !b.is_finite() {
                violations.push(Violation { t, magnitude: drop });
            }
        }
        let verdict = match violations.first() {
            Some(v) => Verdict::Violated {
                t: v.t,
                magnitude: v.magnitude,
            },
            None if dir == Direction::Up => Verdict::MonotoneIncreasing,
            None => Verdict::MonotoneDecreasing,
        };
        Self {
            name: name.to_string(),
            tolerance: if dir == Direction::StrictlyDown { 0.0 } else { tol },
            verdict,
            violations,
            samples,
            samples_ref: format!("trajectory.csv#{name}"),
        }
    }

    fn bounded(name: &str, samples: Vec<(f64, f64)>) -> Self {
        let violations: Vec<Violation> = samples
            .iter()
            .filter(|(_, v)| !v.is_finite())
            .map(|&(t, v)| Violation { t, magnitude: v })
            .collect();
        let verdict = match violations.first() {
            Some(v) => Verdict::Violated {
                t: v.t,
                magnitude: v.magnitude,
            },
            None => Verdict::Bounded {
                sup: samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max),
            },
        };
        Self {
            name: name.to_string(),
            tolerance: 0.0,
            verdict,
            violations,
            samples,
            samples_ref: format!("trajectory.csv#{name}"),
        }
    }

    pub fn min_sample(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_sample(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Reports for the trajectory-level monotone quantities:
///
/// * `aff_iso` (`Ω₁³/(8π²A)`) non-decreasing
/// * `santalo` (`A·A*/π²`) non-decreasing
/// * `A` strictly decreasing
/// * `sigma_ratio` (`σ_M/σ_m`) bounded
/// * `omega1_normalized` (`π^{1/3}Ω₁/A^{1/3}`) non-decreasing
/// * `omega2` (scale invariant, so equal to its normalized value) non-decreasing
pub fn monotone_monitors(trajectory: &[FunctionalRecord], tol: f64) -> Result<Vec<MonitorReport>> {
    if trajectory.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "monotonicity needs >= 2 records, got {}",
            trajectory.len()
        )));
    }
    let series = |f: &dyn Fn(&FunctionalRecord) -> f64| -> Vec<(f64, f64)> {
        trajectory.iter().map(|r| (r.t, f(r))).collect()
    };
    Ok(vec![
        MonitorReport::monotone("aff_iso", series(&|r| r.aff_iso), tol, Direction::Up),
        MonitorReport::monotone("santalo", series(&|r| r.santalo), tol, Direction::Up),
        MonitorReport::monotone("A", series(&|r| r.area), tol, Direction::StrictlyDown),
        MonitorReport::bounded("sigma_ratio", series(&|r| r.sigma_ratio())),
        MonitorReport::monotone(
            "omega1_normalized",
            series(&|r| PI.cbrt() * r.omega1 / r.area.cbrt()),
            tol,
            Direction::Up,
        ),
        MonitorReport::monotone("omega2", series(&|r| r.omega2), tol, Direction::Up),
    ])
}

/// Grid-pointwise monotonicity checks evaluated between recorded states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointwiseMonitor {
    /// `r^{-1/3}(t - t0)^{1/4}` non-decreasing.
    Harnack,
    /// `r^{-1/3}/s` non-decreasing (ancient solutions only).
    AncientHarnack,
    /// `σ` non-increasing (ancient solutions only).
    SigmaNonIncreasing,
}

impl PointwiseMonitor {
    pub fn name(&self) -> &'static str {
        match self {
            PointwiseMonitor::Harnack => "harnack",
            PointwiseMonitor::AncientHarnack => "ancient_harnack",
            PointwiseMonitor::SigmaNonIncreasing => "sigma_non_increasing",
        }
    }

    pub const DEFAULT_TOLERANCE: f64 = 1e-6;

    fn values(&self, body: &ConvexBody, t: f64, t0: f64) -> Vec<f64> {
        match self {
            PointwiseMonitor::Harnack => harnack_quantity_raw(body, t, t0),
            PointwiseMonitor::AncientHarnack => ancient_harnack_quantity(body),
            PointwiseMonitor::SigmaNonIncreasing => body.affine_support().to_vec(),
        }
    }

    fn increasing(&self) -> bool {
        !matches!(self, PointwiseMonitor::SigmaNonIncreasing)
    }
}

/// Tracks one [`PointwiseMonitor`] across recorded states.
///
/// For each interval the sample is the worst signed change over the grid,
/// measured in the expected direction and scaled by `max(1, |value|)`; the
/// interval is a violation when that falls below `-tolerance`.
#[derive(Debug, Clone)]
pub struct PointwiseTracker {
    monitor: PointwiseMonitor,
    t0: f64,
    tolerance: f64,
    prev: Option<Vec<f64>>,
    samples: Vec<(f64, f64)>,
    violations: Vec<Violation>,
}

impl PointwiseTracker {
    pub fn new(monitor: PointwiseMonitor, t0: f64) -> Self {
        Self::with_tolerance(monitor, t0, PointwiseMonitor::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(monitor: PointwiseMonitor, t0: f64, tolerance: f64) -> Self {
        Self {
            monitor,
            t0,
            tolerance,
            prev: None,
            samples: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn observe(&mut self, t: f64, body: &ConvexBody) {
        let cur = self.monitor.values(body, t, self.t0);
        if let Some(prev) = &self.prev {
            let sign = if self.monitor.increasing() { 1.0 } else { -1.0 };
            let worst = prev
                .iter()
                .zip(&cur)
                .map(|(a, b)| sign * (b - a) / a.abs().max(b.abs()).max(1.0))
                .fold(f64::INFINITY, f64::min);
            if !(worst >= -self.tolerance) {
                self.violations.push(Violation {
                    t,
                    magnitude: -worst,
                });
            }
            self.samples.push((t, worst));
        }
        self.prev = Some(cur);
    }

    pub fn finish(self) -> MonitorReport {
        let verdict = match self.violations.first() {
            Some(v) => Verdict::Violated {
                t: v.t,
                magnitude: v.magnitude,
            },
            None if self.monitor.increasing() => Verdict::MonotoneIncreasing,
            None => Verdict::MonotoneDecreasing,
        };
        MonitorReport {
            name: self.monitor.name().to_string(),
            tolerance: self.tolerance,
            verdict,
            violations: self.violations,
            samples: self.samples,
            samples_ref: format!("pointwise:{}", self.monitor.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: f64, area: f64, aff_iso: f64, santalo: f64) -> FunctionalRecord {
        FunctionalRecord {
            t,
            area,
            polar_area: 1.0,
            omega1: 6.0,
            omega2: 6.0,
            sigma_min: 1.0,
            sigma_max: 1.1,
            santalo,
            aff_iso,
            entropy: 0.0,
            harnack_min: 0.0,
            dt: 0.1,
        }
    }

    #[test]
    fn single_record_is_insufficient() {
        assert!(matches!(
            monotone_monitors(&[rec(0.0, 1.0, 0.9, 0.9)], 1e-7),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn verdicts_and_json_shape() {
        let traj = vec![
            rec(0.0, 3.0, 0.90, 0.95),
            rec(0.1, 2.0, 0.95, 0.94),
            rec(0.2, 1.0, 0.99, 0.96),
        ];
        let reports = monotone_monitors(&traj, 1e-7).unwrap();
        let by = |n: &str| reports.iter().find(|r| r.name == n).unwrap();
        assert_eq!(by("aff_iso").verdict, Verdict::MonotoneIncreasing);
        assert_eq!(by("A").verdict, Verdict::MonotoneDecreasing);
        let s = by("santalo");
        assert!(s.verdict.is_violated());
        assert_eq!(s.violations.len(), 1);
        assert!((s.violations[0].magnitude - 0.01).abs() < 1e-12);
        assert!(matches!(by("sigma_ratio").verdict, Verdict::Bounded { .. }));

        let v: serde_json::Value = serde_json::to_value(s).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 5);
        for k in ["name", "tolerance", "verdict", "violations", "samples_ref"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["violations"][0]["t"], 0.1);
    }

    #[test]
    fn within_tolerance_is_not_a_violation() {
        let traj = vec![rec(0.0, 2.0, 1.0, 1.0), rec(0.1, 1.0, 1.0 - 5e-8, 1.0)];
        let reports = monotone_monitors(&traj, 1e-7).unwrap();
        assert!(reports.iter().all(|r| !r.verdict.is_violated()));
    }
}
