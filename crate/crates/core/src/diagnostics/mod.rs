//! Numerical checks of the flow's evolution identities, monotone quantities
//! and limiting characterization.

mod frame;
mod identities;
mod monitors;

pub use frame::{moment_matrix, sl2_frame, Frame, MAX_FRAME_CONDITION};
pub use identities::{
    entropy_identity_check, omega_l_derivative_check, omega_l_rhs, sigma_evolution_check,
    omega_l_coefficients, sigma_ss, three_point_derivative, IdentityCheck, ENTROPY_DELTA,
};
pub use monitors::{
    monotone_monitors, MonitorReport, PointwiseMonitor, PointwiseTracker, Verdict, Violation,
};

use std::f64::consts::PI;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::spectral::{integrate_with, SpectralGrid};

/// `r^{-1/3}(t - t0)^{1/4}` pointwise; non-decreasing in `t` along the flow started at `t0`.
pub fn harnack_quantity(state: &FlowState, t0: f64) -> Result<Vec<f64>> {
    if state.t < t0 {
        return Err(Error::InvalidArgument(format!(
            "Harnack quantity needs t >= t0 ({} < {t0})",
            state.t
        )));
    }
    Ok(harnack_quantity_raw(&state.body, state.t, t0))
}

pub(crate) fn harnack_quantity_raw(body: &ConvexBody, t: f64, t0: f64) -> Vec<f64> {
    let w = (t - t0).max(0.0).powf(0.25);
    body.radius().iter().map(|r| w / r.cbrt()).collect()
}

/// `r^{-1/3}/s` pointwise; non-decreasing in time only along ancient solutions.
pub fn ancient_harnack_quantity(body: &ConvexBody) -> Vec<f64> {
    body.radius()
        .iter()
        .zip(body.samples())
        .map(|(r, s)| 1.0 / (r.cbrt() * s))
        .collect()
}

/// `(A/(Ω₁Ω₂⁵)) ∫ ((σ^{-1/4})_𝔰)² d𝔰`.
///
/// With `f_𝔰 = g^{-1} f_θ` and `d𝔰 = g dθ` the integral is `∫ g^{-1} (∂θ σ^{-1/4})² dθ`.
/// Vanishes exactly when `σ` is constant; invariant under GL(2).
pub fn entropy_functional(body: &ConvexBody) -> f64 {
    let n = body.grid_size();
    let q: Vec<f64> = body.affine_support().iter().map(|s| s.powf(-0.25)).collect();
    let dq = SpectralGrid::get(n).derivative(&q, 1);
    let g = body.arc_density();
    let integral = integrate_with(n, |j| dq[j] * dq[j] / g[j]);
    body.area() / (body.omega1() * body.omega2().powi(5)) * integral
}

/// `max_j |s³r - ζ³| / ζ³`, with `ζ = (mean_j s³r)^{1/3}` when not supplied.
///
/// `s³r = σ³`, so this vanishes exactly on origin-centered ellipses.
pub fn monge_ampere_residual(body: &ConvexBody, zeta: Option<f64>) -> f64 {
    let lhs: Vec<f64> = body
        .samples()
        .iter()
        .zip(body.radius())
        .map(|(s, r)| s.powi(3) * r)
        .collect();
    let zeta3 = match zeta {
        Some(z) => z.powi(3),
        None => lhs.iter().sum::<f64>() / lhs.len() as f64,
    };
    lhs.iter()
        .map(|v| (v - zeta3).abs())
        .fold(0.0, f64::max)
        / zeta3
}

/// `1 - Ω₁³/(8π²A)`: zero on ellipses, positive otherwise.
pub fn ellipticity(body: &ConvexBody) -> f64 {
    1.0 - body.omega1().powi(3) / (8.0 * PI * PI * body.area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{disk_radius_at, make_disk, make_ellipse, make_random_body, RandomBodySpec};
    use crate::linear_map::{apply_linear_map, LinearMap};

    #[test]
    fn harnack_on_exact_disk() {
        // H(t) = R(t)^{-1/3} t^{1/4}, R(t) = (1 - 4t/3)^{3/4}
        let h = |t: f64| disk_radius_at(1.0, t).powf(-1.0 / 3.0) * t.powf(0.25);
        let ts = [1e-6, 0.01, 0.1, 0.3, 0.5, 0.7];
        for w in ts.windows(2) {
            assert!(h(w[1]) >= h(w[0]));
        }
        let d = make_disk(1.0, 64).unwrap();
        let state = FlowState::starting_at(d, 1e-12);
        let v = harnack_quantity(&state, 0.0).unwrap();
        assert!(v.iter().all(|x| *x < 1e-2));
        assert!(harnack_quantity(&state, 1.0).is_err());
    }

    #[test]
    fn ancient_quantity_of_disks() {
        assert!(ancient_harnack_quantity(&make_disk(1.0, 64).unwrap())
            .iter()
            .all(|v| (v - 1.0).abs() < 1e-14));
        let r: f64 = 0.5;
        assert!(ancient_harnack_quantity(&make_disk(r, 64).unwrap())
            .iter()
            .all(|v| (v - r.powf(-4.0 / 3.0)).abs() < 1e-12));
    }

    #[test]
    fn entropy_vanishes_on_ellipses_and_is_affine_invariant() {
        let e = make_ellipse(2.0, 0.5, 0.3, 256).unwrap();
        assert!(entropy_functional(&e).abs() <= 1e-10);
        let body = make_random_body(&RandomBodySpec::default(), 256).unwrap();
        let h = entropy_functional(&body);
        assert!(h > 0.0);
        let phi = LinearMap::new([[1.3, 0.4], [-0.2, 0.9]]).unwrap();
        let img = apply_linear_map(&body, &phi).unwrap();
        assert!((entropy_functional(&img) - h).abs() <= 1e-6 * h);
        assert!((entropy_functional(&body.scaled(2.5).unwrap()) - h).abs() <= 1e-10 * h);
    }

    #[test]
    fn monge_ampere_on_exact_solutions() {
        let (a, b) = (2.0f64, 0.5f64);
        let e = make_ellipse(a, b, 0.0, 256).unwrap();
        assert!(monge_ampere_residual(&e, Some((a * b).powf(2.0 / 3.0))) <= 1e-8);
        assert!(monge_ampere_residual(&make_disk(1.0, 64).unwrap(), Some(1.0)) <= 1e-12);
        let body = make_random_body(&RandomBodySpec::default(), 256).unwrap();
        assert!(monge_ampere_residual(&body, None) > 0.01);
    }

    #[test]
    fn ellipticity_signs() {
        assert!(ellipticity(&make_ellipse(3.0, 0.6, 1.0, 256).unwrap()).abs() <= 1e-6);
        let body = make_random_body(&RandomBodySpec::default(), 256).unwrap();
        assert!(ellipticity(&body) > 1e-4);
    }
}
