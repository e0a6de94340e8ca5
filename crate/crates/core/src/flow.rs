//! Time integration of the affine normal flow.
//!
//! In support-function form the flow `∂t X = -κ^{1/3} ν` is the scalar
//! parabolic equation `∂t s = -r^{-1/3}` with `r = s_θθ + s`, integrated here
//! at fixed normal angle by classical RK4. Linearizing gives the diffusion
//! coefficient `(1/3) r^{-4/3}`, so the step is bounded by
//! `safety · (3/2) Δθ² · (min r)^{4/3}`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::diagnostics::{MonitorReport, PointwiseMonitor, PointwiseTracker};
use crate::error::{Error, Result};
use crate::record::FunctionalRecord;
use crate::spectral::SpectralGrid;
use crate::support::SupportFunction;

/// Halvings attempted before a step is declared collapsed.
pub const MAX_HALVINGS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepController {
    pub safety: f64,
    pub dt_max: f64,
    pub area_floor: f64,
}

impl Default for StepController {
    fn default() -> Self {
        Self {
            safety: 0.5,
            dt_max: 1e-2,
            area_floor: 1e-4,
        }
    }
}

impl StepController {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            problems.push(format!("safety must lie in (0, 1], got {}", self.safety));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            problems.push(format!("dt_max must be positive, got {}", self.dt_max));
        }
        if !(self.area_floor > 0.0 && self.area_floor.is_finite()) {
            problems.push(format!("area_floor must be positive, got {}", self.area_floor));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(problems.join("; ")))
        }
    }

    /// Largest step the controller accepts for `body`.
    pub fn stable_dt(&self, body: &ConvexBody) -> f64 {
        let dtheta = TAU / body.grid_size() as f64;
        let bound = 1.5 * dtheta * dtheta * body.min_radius().powf(4.0 / 3.0);
        (self.safety * bound).min(self.dt_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    StepCollapse,
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Running,
    Extinct { t_est: f64 },
    Failed(FailureReason),
}

#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub body: ConvexBody,
    pub dt_last: f64,
    pub status: FlowStatus,
    pub steps: u64,
}

impl FlowState {
    pub fn new(body: ConvexBody) -> Self {
        Self::starting_at(body, 0.0)
    }

    pub fn starting_at(body: ConvexBody, t: f64) -> Self {
        Self {
            t,
            body,
            dt_last: 0.0,
            status: FlowStatus::Running,
            steps: 0,
        }
    }

    pub fn is_running(&self) -> bool {
        self.status == FlowStatus::Running
    }
}

/// `∂t s = -r^{-1/3}` on the grid.
pub fn flow_rhs(body: &ConvexBody) -> Vec<f64> {
    body.radius().iter().map(|r| -r.cbrt().recip()).collect()
}

/// Right-hand side for an unvalidated stage vector; `None` if `r <= 0` somewhere.
fn stage_rhs(grid: &SpectralGrid, s: &[f64]) -> Option<Vec<f64>> {
    let r = grid.curvature_operator(s);
    if r.iter().any(|&x| !(x > 0.0)) {
        return None;
    }
    Some(r.iter().map(|r| -r.cbrt().recip()).collect())
}

enum StepOutcome {
    Accepted(ConvexBody),
    Rejected,
    NonFinite,
}

fn rk4(body: &ConvexBody, dt: f64) -> StepOutcome {
    let n = body.grid_size();
    let grid = SpectralGrid::get(n);
    let s0 = body.samples();
    let axpy = |k: &[f64], h: f64| -> Vec<f64> {
        s0.iter().zip(k).map(|(s, k)| s + h * k).collect()
    };
    let k1 = flow_rhs(body);
    let Some(k2) = stage_rhs(&grid, &axpy(&k1, 0.5 * dt)) else {
        return StepOutcome::Rejected;
    };
    let Some(k3) = stage_rhs(&grid, &axpy(&k2, 0.5 * dt)) else {
        return StepOutcome::Rejected;
    };
    let Some(k4) = stage_rhs(&grid, &axpy(&k3, dt)) else {
        return StepOutcome::Rejected;
    };
    let next: Vec<f64> = (0..n)
        .map(|j| s0[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let support = match SupportFunction::new(next) {
        Ok(s) => s,
        Err(_) => return StepOutcome::NonFinite,
    };
    match ConvexBody::new(support) {
        Ok(b) => StepOutcome::Accepted(b),
        Err(_) => StepOutcome::Rejected,
    }
}

/// Self-similar extrapolation of the extinction time.
///
/// Near extinction bodies are asymptotically elliptical and `A ∝ (T - t)^{3/2}`;
/// combined with `dA/dt = -Ω₁` this gives `T = t + (3/2)·A/Ω₁`, which is exact
/// for every ellipse.
pub fn extinction_time_estimate(t: f64, body: &ConvexBody) -> f64 {
    t + 1.5 * body.area() / body.omega1()
}

/// One RK4 step with the controller's stable dt (capped by `dt_cap` when given).
fn step_capped(state: &FlowState, ctrl: &StepController, dt_cap: Option<f64>) -> FlowState {
    let mut dt = ctrl.stable_dt(&state.body);
    if let Some(cap) = dt_cap {
        dt = dt.min(cap);
    }
    for _ in 0..=MAX_HALVINGS {
        match rk4(&state.body, dt) {
            StepOutcome::Accepted(body) => {
                let t = state.t + dt;
                let status = if body.area() <= ctrl.area_floor {
                    FlowStatus::Extinct {
                        t_est: extinction_time_estimate(t, &body),
                    }
                } else {
                    FlowStatus::Running
                };
                return FlowState {
                    t,
                    body,
                    dt_last: dt,
                    status,
                    steps: state.steps + 1,
                };
            }
            StepOutcome::NonFinite => {
                return FlowState {
                    status: FlowStatus::Failed(FailureReason::NonFinite),
                    ..state.clone()
                };
            }
            StepOutcome::Rejected => dt *= 0.5,
        }
    }
    FlowState {
        status: FlowStatus::Failed(FailureReason::StepCollapse),
        ..state.clone()
    }
}

/// Advance a running state by one accepted step. Non-running states are returned unchanged.
pub fn step(state: &FlowState, ctrl: &StepController) -> FlowState {
    if !state.is_running() {
        return state.clone();
    }
    step_capped(state, ctrl, None)
}

/// Step until `t_end` is hit exactly, or the flow stops.
pub fn advance_to(state: &FlowState, ctrl: &StepController, t_end: f64) -> Result<FlowState> {
    if t_end < state.t {
        return Err(Error::InvalidArgument(
            "backward time integration is not supported".into(),
        ));
    }
    let mut cur = state.clone();
    while cur.is_running() && cur.t < t_end {
        let remaining = t_end - cur.t;
        let mut next = step_capped(&cur, ctrl, Some(remaining));
        if next.is_running() && t_end - next.t <= 1e-14 * t_end.abs().max(1.0) {
            next.t = t_end;
        }
        cur = next;
    }
    Ok(cur)
}

/// `K̃ = √(π/A)·K`, area exactly π up to rounding.
pub fn normalized_view(state: &FlowState) -> Result<ConvexBody> {
    normalize_area(&state.body)
}

pub fn normalize_area(body: &ConvexBody) -> Result<ConvexBody> {
    body.scaled((PI / body.area()).sqrt())
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Emit a [`FunctionalRecord`] every this many accepted steps (>= 1).
    pub record_every: usize,
    /// Grid-pointwise monotonicity checks evaluated between recorded states.
    pub monitors: Vec<PointwiseMonitor>,
    /// Keep a copy of each recorded body.
    pub keep_snapshots: bool,
    pub max_steps: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_every: 100,
            monitors: Vec::new(),
            keep_snapshots: false,
            max_steps: 10_000_000,
        }
    }
}

impl RunOptions {
    pub fn every(record_every: usize) -> Self {
        Self {
            record_every,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub body: ConvexBody,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trajectory: Vec<FunctionalRecord>,
    pub final_state: FlowState,
    pub pointwise: Vec<MonitorReport>,
    pub snapshots: Vec<Snapshot>,
}

impl RunOutput {
    pub fn extinction_time(&self) -> Option<f64> {
        match self.final_state.status {
            FlowStatus::Extinct { t_est } => Some(t_est),
            _ => None,
        }
    }
}

/// Flow `body` from `t = 0` until its area drops to the floor, recording as it goes.
pub fn run(body: ConvexBody, ctrl: &StepController, opts: &RunOptions) -> Result<RunOutput> {
    run_observed(body, ctrl, opts, |_| {})
}

/// [`run`], additionally handing every recorded state to `observer`.
pub fn run_observed<F: FnMut(&FlowState)>(
    body: ConvexBody,
    ctrl: &StepController,
    opts: &RunOptions,
    mut observer: F,
) -> Result<RunOutput> {
    ctrl.validate()?;
    if opts.record_every == 0 {
        return Err(Error::InvalidArgument("record_every must be >= 1".into()));
    }
    let t0 = 0.0;
    let mut state = FlowState::starting_at(body, t0);
    if state.body.area() <= ctrl.area_floor {
        state.status = FlowStatus::Extinct {
            t_est: extinction_time_estimate(t0, &state.body),
        };
    }
    let mut out = RunOutput {
        trajectory: Vec::new(),
        final_state: state.clone(),
        pointwise: Vec::new(),
        snapshots: Vec::new(),
    };
    let mut trackers: Vec<PointwiseTracker> = opts
        .monitors
        .iter()
        .map(|m| PointwiseTracker::new(*m, t0))
        .collect();

    let mut record = |state: &FlowState, out: &mut RunOutput| {
        out.trajectory.push(FunctionalRecord::from_body(
            state.t,
            &state.body,
            t0,
            state.dt_last,
        ));
        for tr in trackers.iter_mut() {
            tr.observe(state.t, &state.body);
        }
        if opts.keep_snapshots {
            out.snapshots.push(Snapshot {
                t: state.t,
                body: state.body.clone(),
            });
        }
        observer(state);
    };

    record(&state, &mut out);
    let mut last_recorded = state.steps;
    while state.is_running() && state.steps < opts.max_steps {
        let next = step(&state, ctrl);
        let advanced = next.steps > state.steps;
        state = next;
        if !advanced {
            break;
        }
        if state.steps.is_multiple_of(opts.record_every as u64) || !state.is_running() {
            record(&state, &mut out);
            last_recorded = state.steps;
        }
    }
    if last_recorded != state.steps {
        record(&state, &mut out);
    }

    out.final_state = state;
    out.pointwise = trackers.into_iter().map(PointwiseTracker::finish).collect();
    Ok(out)
}

/// Limit point of the flow, estimated by the Steiner point of the body once its
/// area has dropped to the floor. The Steiner point lies inside the final
/// body, and so inside every earlier one.
pub fn locate_extinction_point(body: &ConvexBody, ctrl: &StepController) -> Result<[f64; 2]> {
    let out = run(
        body.clone(),
        ctrl,
        &RunOptions {
            record_every: usize::MAX,
            ..RunOptions::default()
        },
    )?;
    match out.final_state.status {
        FlowStatus::Extinct { .. } => Ok(out.final_state.body.steiner_point()),
        FlowStatus::Failed(reason) => Err(Error::InvalidArgument(format!(
            "pilot run failed: {reason:?}"
        ))),
        FlowStatus::Running => Err(Error::InvalidArgument(
            "pilot run hit the step limit".into(),
        )),
    }
}

/// Translate `body` so the flow shrinks it to the origin.
///
/// The flow commutes with translations, and every origin-dependent quantity
/// (`σ`, `A*`, `Ω_p` for `p != 1`) assumes the origin is the limit point.
pub fn center_on_extinction_point(
    body: &ConvexBody,
    ctrl: &StepController,
) -> Result<(ConvexBody, [f64; 2])> {
    let p = locate_extinction_point(body, ctrl)?;
    Ok((body.translated([-p[0], -p[1]])?, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{disk_radius_at, make_disk, make_ellipse};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rhs_of_disks_and_ellipses() {
        assert!(flow_rhs(&make_disk(1.0, 128).unwrap())
            .iter()
            .all(|v| (v + 1.0).abs() < 1e-14));
        let rho: f64 = 2.5;
        assert!(flow_rhs(&make_disk(rho, 128).unwrap())
            .iter()
            .all(|v| (v + rho.powf(-1.0 / 3.0)).abs() < 1e-14));
        let (a, b) = (2.0, 1.0);
        let e = make_ellipse(a, b, 0.0, 256).unwrap();
        let rhs = flow_rhs(&e);
        for (v, s) in rhs.iter().zip(e.samples()) {
            assert!((v + s / (a * b).powf(2.0 / 3.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn one_disk_step_matches_exact_ode() {
        let state = FlowState::new(make_disk(1.0, 64).unwrap());
        let ctrl = StepController::default();
        let next = step(&state, &ctrl);
        let dt = next.t;
        assert!(dt > 0.0);
        assert_eq!(dt, next.dt_last);
        let exact = disk_radius_at(1.0, dt);
        for s in next.body.samples() {
            assert!((s - exact).abs() < 1e-15 + dt.powi(5));
            assert!((s - (1.0 - dt)).abs() < dt * dt);
        }
    }

    #[test]
    fn time_strictly_increases_and_stops_when_extinct() {
        let ctrl = StepController {
            area_floor: 0.5,
            ..StepController::default()
        };
        let mut state = FlowState::new(make_disk(0.5, 64).unwrap());
        let mut t = state.t;
        for _ in 0..100_000 {
            state = step(&state, &ctrl);
            if !state.is_running() {
                break;
            }
            assert!(state.t > t);
            t = state.t;
        }
        assert!(!state.is_running());
        // already below the floor: extinct before the first step
        let out = run(make_disk(0.3, 64).unwrap(), &ctrl, &RunOptions::every(1)).unwrap();
        assert!(matches!(out.final_state.status, FlowStatus::Extinct { .. }));
        assert_eq!(out.trajectory.len(), 1);
    }

    #[test]
    fn advance_to_hits_target_and_refuses_backward() {
        let state = FlowState::new(make_disk(1.0, 64).unwrap());
        let ctrl = StepController::default();
        let later = advance_to(&state, &ctrl, 0.01).unwrap();
        assert_eq!(later.t, 0.01);
        assert_abs_diff_eq!(later.body.samples()[0], disk_radius_at(1.0, 0.01), epsilon = 1e-12);
        assert!(advance_to(&later, &ctrl, 0.0).is_err());
    }

    #[test]
    fn normalized_view_has_area_pi() {
        let state = FlowState::new(make_disk(3.0, 64).unwrap());
        let v = normalized_view(&state).unwrap();
        assert!(v.samples().iter().all(|s| (s - 1.0).abs() < 1e-12));
        let e = FlowState::new(make_ellipse(2.0, 0.5, 0.0, 256).unwrap());
        let v = normalized_view(&e).unwrap();
        assert!(v.max_abs_diff(&e.body) < 1e-8);
        assert_abs_diff_eq!(v.area(), PI, epsilon = 1e-10);
    }

    #[test]
    fn extinction_estimate_exact_on_disk() {
        let d = make_disk(2.0, 64).unwrap();
        assert_abs_diff_eq!(
            extinction_time_estimate(0.0, &d),
            0.75 * 2f64.powf(4.0 / 3.0),
            epsilon = 1e-13
        );
    }

    #[test]
    fn controller_validation() {
        let bad = StepController {
            safety: 1.5,
            dt_max: -1.0,
            area_floor: 1e-4,
        };
        let msg = bad.validate().unwrap_err().to_string();
        assert!(msg.contains("safety") && msg.contains("dt_max"));
    }
}
