//! Finite-difference checks of the flow's evolution identities.
//!
//! All checks work on consecutive triples of recorded snapshots and compare a
//! second-order centered difference in time at the middle snapshot against a
//! closed expression evaluated there.

use crate::body::ConvexBody;
use crate::diagnostics::entropy_functional;
use crate::diagnostics::monitors::{MonitorReport, Verdict, Violation};
use crate::error::{Error, Result};
use crate::flow::Snapshot;

/// Constant linking `d/dt Ω₂^{-4}` to the entropy functional:
/// `d/dt Ω₂^{-4} = δ · (d ln A/dt) · entropy`.
///
/// From the `l = 2` perimeter identity, `dΩ₂/dt = (3/4)∫σ^{-5/2}σ_𝔰² d𝔰`, and
/// `((σ^{-1/4})_𝔰)² = σ^{-5/2}σ_𝔰²/16`, so `dΩ₂/dt = 12 J` with
/// `J = ∫((σ^{-1/4})_𝔰)² d𝔰`. Then `d/dt Ω₂^{-4} = -48 J/Ω₂⁵`, while
/// `d ln A/dt = -Ω₁/A` turns the right side into `-δ J/Ω₂⁵`. Hence `δ = 48`.
pub const ENTROPY_DELTA: f64 = 48.0;

/// Derivative at `t[1]` from three samples on a non-uniform stencil; second order.
pub fn three_point_derivative(t: [f64; 3], f: [f64; 3]) -> f64 {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    -h2 / (h1 * (h1 + h2)) * f[0] + (h2 - h1) / (h1 * h2) * f[1] + h1 / (h2 * (h1 + h2)) * f[2]
}

/// Maximum errors of one identity over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    /// `(t, lhs, rhs)` at each interior snapshot.
    pub samples: Vec<(f64, f64, f64)>,
}

impl IdentityCheck {
    fn from_samples(name: &str, samples: Vec<(f64, f64, f64)>) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        for &(_, lhs, rhs) in &samples {
            let e = (lhs - rhs).abs();
            max_abs = max_abs.max(e);
            max_rel = max_rel.max(e / rhs.abs().max(f64::MIN_POSITIVE));
        }
        Self {
            name: name.to_string(),
            max_abs_error: max_abs,
            max_rel_error: max_rel,
            samples,
        }
    }

    /// Relative-error report; each sample whose error exceeds `tol·|rhs|` is a violation.
    pub fn into_report(self, tol: f64) -> MonitorReport {
        let violations: Vec<Violation> = self
            .samples
            .iter()
            .filter_map(|&(t, lhs, rhs)| {
                let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
                (rel > tol).then_some(Violation { t, magnitude: rel })
            })
            .collect();
        let verdict = match violations.first() {
            Some(v) => Verdict::Violated {
                t: v.t,
                magnitude: v.magnitude,
            },
            None => Verdict::Satisfied,
        };
        MonitorReport {
            name: self.name,
            tolerance: tol,
            verdict,
            violations,
            samples: self
                .samples
                .iter()
                .map(|&(t, l, r)| (t, (l - r).abs() / r.abs().max(f64::MIN_POSITIVE)))
                .collect(),
            samples_ref: String::new(),
        }
    }
}

fn triples(snapshots: &[Snapshot]) -> Result<std::slice::Windows<'_, Snapshot>> {
    if snapshots.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "centered differences need >= 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    Ok(snapshots.windows(3))
}

fn times(w: &[Snapshot]) -> [f64; 3] {
    [w[0].t, w[1].t, w[2].t]
}

/// `σ_𝔰𝔰 = g^{-1}∂θ(g^{-1}∂θσ)`.
pub fn sigma_ss(body: &ConvexBody) -> Vec<f64> {
    let first = body.affine_derivative(body.affine_support());
    body.affine_derivative(&first)
}

/// Max-norm residual of `∂tσ = -4/3 + σ_𝔰𝔰/3` at fixed normal angle, per interior snapshot.
/// `lhs` in the samples is the residual and `rhs` is zero.
pub fn sigma_evolution_check(snapshots: &[Snapshot]) -> Result<IdentityCheck> {
    let mut samples = Vec::new();
    for w in triples(snapshots)? {
        let t = times(w);
        let mid = &w[1].body;
        let sss = sigma_ss(mid);
        let residual = (0..mid.grid_size())
            .map(|j| {
                let dsig = three_point_derivative(
                    t,
                    [
                        w[0].body.affine_support()[j],
                        mid.affine_support()[j],
                        w[2].body.affine_support()[j],
                    ],
                );
                (dsig - (-4.0 / 3.0 + sss[j] / 3.0)).abs()
            })
            .fold(0.0, f64::max);
        samples.push((t[1], residual, 0.0));
    }
    Ok(IdentityCheck::from_samples("sigma_evolution", samples))
}

/// Coefficients of the two integrals in `dΩ_l/dt`: `2(l-2)/(l+2)` and `6l/(l+2)²`.
pub fn omega_l_coefficients(l: f64) -> (f64, f64) {
    (2.0 * (l - 2.0) / (l + 2.0), 6.0 * l / ((l + 2.0) * (l + 2.0)))
}

/// `(2(l-2)/(l+2))∫σ^{-3l/(l+2)} d𝔰 + (6l/(l+2)²)∫σ^{-1-3l/(l+2)} σ_𝔰² d𝔰`.
pub fn omega_l_rhs(body: &ConvexBody, l: f64) -> f64 {
    let (c1, c2) = omega_l_coefficients(l);
    let e = -3.0 * l / (l + 2.0);
    let sigma = body.affine_support();
    let ds = body.affine_derivative(sigma);
    let first: Vec<f64> = sigma.iter().map(|s| s.powf(e)).collect();
    let second: Vec<f64> = sigma
        .iter()
        .zip(&ds)
        .map(|(s, d)| s.powf(e - 1.0) * d * d)
        .collect();
    let mut total = c2 * body.integrate_affine(&second);
    if c1 != 0.0 {
        total += c1 * body.integrate_affine(&first);
    }
    total
}

/// Centered difference of `Ω_l` (lhs) against [`omega_l_rhs`] (rhs).
pub fn omega_l_derivative_check(snapshots: &[Snapshot], l: f64) -> Result<IdentityCheck> {
    if !(l >= 2.0) {
        return Err(Error::InvalidArgument(format!("l must be >= 2, got {l}")));
    }
    let mut samples = Vec::new();
    for w in triples(snapshots)? {
        let t = times(w);
        let mut f = [0.0; 3];
        for (k, snap) in w.iter().enumerate() {
            f[k] = snap.body.p_affine_perimeter(l)?;
        }
        samples.push((t[1], three_point_derivative(t, f), omega_l_rhs(&w[1].body, l)));
    }
    Ok(IdentityCheck::from_samples(&format!("omega_{l}_derivative"), samples))
}

/// `d/dt Ω₂^{-4}` (lhs) against `δ·(d ln A/dt)·entropy` (rhs), both by centered differences.
pub fn entropy_identity_check(snapshots: &[Snapshot]) -> Result<IdentityCheck> {
    let mut samples = Vec::new();
    for w in triples(snapshots)? {
        let t = times(w);
        let inv = |b: &ConvexBody| b.omega2().powi(-4);
        let lhs = three_point_derivative(t, [inv(&w[0].body), inv(&w[1].body), inv(&w[2].body)]);
        let dln_a = three_point_derivative(
            t,
            [w[0].body.area().ln(), w[1].body.area().ln(), w[2].body.area().ln()],
        );
        samples.push((t[1], lhs, ENTROPY_DELTA * dln_a * entropy_functional(&w[1].body)));
    }
    Ok(IdentityCheck::from_samples("entropy_identity", samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_exact_for_quadratics() {
        let f = |t: f64| 3.0 * t * t - 2.0 * t + 1.0;
        let t = [0.1, 0.13, 0.2];
        let d = three_point_derivative(t, [f(t[0]), f(t[1]), f(t[2])]);
        assert!((d - (6.0 * 0.13 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn l2_first_coefficient_is_exactly_zero() {
        let (c1, c2) = omega_l_coefficients(2.0);
        assert_eq!(c1, 0.0);
        assert_eq!(c2, 0.75);
        let (c1, c2) = omega_l_coefficients(3.0);
        assert_eq!(c1, 0.4);
        assert!((c2 - 18.0 / 25.0).abs() < 1e-16);
    }

    #[test]
    fn entropy_delta_from_coefficients() {
        // dΩ₂/dt = c2·16·J  ⇒  d/dt Ω₂^{-4} = -4·16·c2·J/Ω₂⁵
        let (_, c2) = omega_l_coefficients(2.0);
        assert_eq!(4.0 * 16.0 * c2, ENTROPY_DELTA);
    }

    #[test]
    fn needs_three_snapshots() {
        assert!(matches!(
            sigma_evolution_check(&[]),
            Err(Error::InsufficientData(_))
        ));
    }
}
