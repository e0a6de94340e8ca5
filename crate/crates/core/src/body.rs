//! Smooth strictly convex bodies and their affine functionals.
//!
//! A body is its support function `s` on the grid. Everything else is
//! derived eagerly at construction so a `ConvexBody` can be shared across
//! threads without synchronization:
//!
//! * radius of curvature `r = s_θθ + s`
//! * affine support function `σ = s·r^{1/3}`
//! * affine arclength density `g = r^{2/3}` (`d𝔰 = g dθ`)

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{self, integrate_with, SpectralGrid};
use crate::support::SupportFunction;

/// Bodies whose radius of curvature dips to this value are rejected.
pub const DEFAULT_CURVATURE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ConvexBody {
    support: SupportFunction,
    s_theta: Vec<f64>,
    radius: Vec<f64>,
    sigma: Vec<f64>,
    arc_density: Vec<f64>,
    scalars: Scalars,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Scalars {
    area: f64,
    polar_area: f64,
    omega1: f64,
    omega2: f64,
    sigma_min: f64,
    sigma_max: f64,
}

/// `r = s_θθ + s`, rejected with [`Error::NonConvex`] if any entry is `<= floor`.
pub fn radius_of_curvature(support: &SupportFunction, floor: f64) -> Result<Vec<f64>> {
    let r = SpectralGrid::get(support.len()).curvature_operator(support.samples());
    check_floor(&r, floor)?;
    Ok(r)
}

fn check_floor(r: &[f64], floor: f64) -> Result<()> {
    let (index, &min) = r
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty grid");
    if min > floor && min.is_finite() {
        Ok(())
    } else {
        Err(Error::NonConvex { min, index })
    }
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid")
}

impl ConvexBody {
    pub fn new(support: SupportFunction) -> Result<Self> {
        Self::with_floor(support, DEFAULT_CURVATURE_FLOOR)
    }

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        Self::new(SupportFunction::new(samples)?)
    }

    /// Validate convexity against `floor`, then require the origin in the interior.
    pub fn with_floor(support: SupportFunction, floor: f64) -> Result<Self> {
        let n = support.len();
        let grid = SpectralGrid::get(n);
        let radius = radius_of_curvature(&support, floor)?;
        let s = support.samples();
        let (index, min) = argmin(s);
        if min <= 0.0 {
            return Err(Error::OriginNotInterior { min, index });
        }
        let s_theta = grid.derivative(s, 1);
        let sigma: Vec<f64> = s.iter().zip(&radius).map(|(s, r)| s * r.cbrt()).collect();
        let arc_density: Vec<f64> = radius.iter().map(|r| r.cbrt().powi(2)).collect();

        let area = 0.5 * integrate_with(n, |j| s[j] * radius[j]);
        let polar_area = 0.5 * integrate_with(n, |j| s[j].powi(-2));
        let omega1 = spectral::integrate(&arc_density);
        let omega2 = integrate_with(n, |j| arc_density[j] / sigma[j].sqrt());
        let sigma_min = sigma.iter().copied().fold(f64::INFINITY, f64::min);
        let sigma_max = sigma.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        Ok(Self {
            support,
            s_theta,
            radius,
            sigma,
            arc_density,
            scalars: Scalars {
                area,
                polar_area,
                omega1,
                omega2,
                sigma_min,
                sigma_max,
            },
        })
    }

    pub fn support(&self) -> &SupportFunction {
        &self.support
    }

    pub fn samples(&self) -> &[f64] {
        self.support.samples()
    }

    pub fn grid_size(&self) -> usize {
        self.support.len()
    }

    pub fn support_derivative(&self) -> &[f64] {
        &self.s_theta
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn affine_support(&self) -> &[f64] {
        &self.sigma
    }

    /// `g = r^{2/3}`, the density of affine arclength with respect to θ.
    pub fn arc_density(&self) -> &[f64] {
        &self.arc_density
    }

    pub fn min_radius(&self) -> f64 {
        self.radius.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `A = ½∫ s·r dθ`.
    pub fn area(&self) -> f64 {
        self.scalars.area
    }

    /// Area of the polar body, `A* = ½∫ s^{-2} dθ`.
    pub fn polar_area(&self) -> f64 {
        self.scalars.polar_area
    }

    /// Classical affine perimeter `Ω₁ = ∫ r^{2/3} dθ`.
    pub fn omega1(&self) -> f64 {
        self.scalars.omega1
    }

    /// `Ω₂ = ∫ σ^{-1/2} d𝔰`; scale invariant.
    pub fn omega2(&self) -> f64 {
        self.scalars.omega2
    }

    pub fn sigma_min(&self) -> f64 {
        self.scalars.sigma_min
    }

    pub fn sigma_max(&self) -> f64 {
        self.scalars.sigma_max
    }

    /// `Ω_p = ∫ σ^{1-3p/(p+2)} d𝔰` for `p >= 1`.
    pub fn p_affine_perimeter(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("p-affine perimeter needs p >= 1, got {p}")));
        }
        if p == 1.0 {
            return Ok(self.omega1());
        }
        if p == 2.0 {
            return Ok(self.omega2());
        }
        let e = 1.0 - 3.0 * p / (p + 2.0);
        let g = &self.arc_density;
        let sigma = &self.sigma;
        Ok(integrate_with(self.grid_size(), |j| sigma[j].powf(e) * g[j]))
    }

    /// `Ω_p^{2+p} / A^{2-p}`, invariant under GL(2).
    pub fn affine_iso_ratio(&self, p: f64) -> Result<f64> {
        let omega = self.p_affine_perimeter(p)?;
        Ok(omega.powf(2.0 + p) / self.area().powf(2.0 - p))
    }

    /// `Ω₁³/(8π²A)`: at most 1, with equality exactly on ellipses.
    pub fn normalized_affine_iso(&self) -> f64 {
        self.omega1().powi(3) / (8.0 * PI * PI * self.area())
    }

    /// Santaló product `A·A*/π²`: at most 1, with equality on origin-centered ellipses.
    pub fn santalo(&self) -> f64 {
        self.area() * self.polar_area() / (PI * PI)
    }

    /// `λK`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {lambda}")));
        }
        Self::new(SupportFunction::new(
            self.samples().iter().map(|s| lambda * s).collect(),
        )?)
    }

    /// `K + c`: adds `c·z(θ)` to the support function.
    pub fn translated(&self, c: [f64; 2]) -> Result<Self> {
        let n = self.grid_size();
        let samples = self
            .samples()
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let t = spectral::theta(n, j);
                s + c[0] * t.cos() + c[1] * t.sin()
            })
            .collect();
        Self::new(SupportFunction::new(samples)?)
    }

    /// Steiner point `(1/π)∫ s(θ) z(θ) dθ`; translation equivariant.
    pub fn steiner_point(&self) -> [f64; 2] {
        let n = self.grid_size();
        let s = self.samples();
        let x = integrate_with(n, |j| s[j] * spectral::theta(n, j).cos()) / PI;
        let y = integrate_with(n, |j| s[j] * spectral::theta(n, j).sin()) / PI;
        [x, y]
    }

    /// Boundary point with outer normal `z(θ_j)`: `γ = s·z + s_θ·z'`.
    pub fn boundary_point(&self, j: usize) -> [f64; 2] {
        let t = spectral::theta(self.grid_size(), j);
        let (sin, cos) = t.sin_cos();
        let s = self.samples()[j];
        let ds = self.s_theta[j];
        [s * cos - ds * sin, s * sin + ds * cos]
    }

    /// Affine arclength derivative `f_𝔰 = g^{-1} f_θ`.
    pub fn affine_derivative(&self, f: &[f64]) -> Vec<f64> {
        let df = SpectralGrid::get(self.grid_size()).derivative(f, 1);
        df.iter().zip(&self.arc_density).map(|(d, g)| d / g).collect()
    }

    /// Integral against affine arclength, `∫ f d𝔰`.
    pub fn integrate_affine(&self, f: &[f64]) -> f64 {
        let g = &self.arc_density;
        integrate_with(self.grid_size(), |j| f[j] * g[j])
    }

    pub fn max_abs_diff(&self, other: &ConvexBody) -> f64 {
        self.samples()
            .iter()
            .zip(other.samples())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `σ = s·r^{1/3}` on the grid.
pub fn affine_support(body: &ConvexBody) -> &[f64] {
    body.affine_support()
}

/// Disk of the given radius centered at the origin.
pub fn make_disk(radius: f64, n: usize) -> Result<ConvexBody> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("disk radius {radius}")));
    }
    ConvexBody::new(SupportFunction::new(vec![radius; n])?)
}

/// Origin-centered ellipse with semi-axes `a`, `b`, major axis rotated by `rotation`.
pub fn make_ellipse(a: f64, b: f64, rotation: f64, n: usize) -> Result<ConvexBody> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("ellipse axes ({a}, {b})")));
    }
    ConvexBody::new(SupportFunction::from_fn(n, |t| {
        let (sin, cos) = (t - rotation).sin_cos();
        (a * a * cos * cos + b * b * sin * sin).sqrt()
    })?)
}

/// Seeded generator identifier recorded alongside random-body outputs.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64 (rand_chacha 0.9)";

/// Parameters of a random smooth perturbation of the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBodySpec {
    pub seed: u64,
    pub max_harmonic: usize,
    pub decay: f64,
    pub amplitude: f64,
    /// Halve the perturbation until the body clears [`RANDOM_BODY_MARGIN`].
    /// When disabled the raw body is validated as-is.
    pub halving: bool,
}

impl RandomBodySpec {
    pub fn new(seed: u64, max_harmonic: usize, decay: f64, amplitude: f64) -> Self {
        Self {
            seed,
            max_harmonic,
            decay,
            amplitude,
            halving: true,
        }
    }
}

impl Default for RandomBodySpec {
    fn default() -> Self {
        Self::new(1, 8, 2.0, 0.2)
    }
}

/// Minimum of both `s` and `r` for generated bodies.
pub const RANDOM_BODY_MARGIN: f64 = 0.05;

/// `s = 1 + Σ_{k=2}^{K} (a_k cos kθ + b_k sin kθ)` with `a_k, b_k` uniform in
/// `[-1, 1)·amplitude·k^{-decay}`.
pub fn make_random_body(spec: &RandomBodySpec, n: usize) -> Result<ConvexBody> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    spectral::check_grid_size(n)?;
    if spec.max_harmonic >= n / 2 {
        return Err(Error::InvalidArgument(format!(
            "max_harmonic {} must stay below the Nyquist mode {}",
            spec.max_harmonic,
            n / 2
        )));
    }
    if !(spec.amplitude.is_finite() && spec.decay.is_finite()) {
        return Err(Error::InvalidArgument(
            "amplitude and decay must be finite".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coeffs: Vec<(f64, f64, f64)> = (2..=spec.max_harmonic)
        .map(|k| {
            let scale = spec.amplitude * (k as f64).powf(-spec.decay);
            let a = rng.random_range(-1.0..1.0) * scale;
            let b = rng.random_range(-1.0..1.0) * scale;
            (k as f64, a, b)
        })
        .collect();
    let perturbation: Vec<f64> = spectral::angles(n)
        .into_iter()
        .map(|t| {
            coeffs
                .iter()
                .map(|&(k, a, b)| a * (k * t).cos() + b * (k * t).sin())
                .sum()
        })
        .collect();
    let grid = SpectralGrid::get(n);
    let dperturb_r = grid.curvature_operator(&perturbation);

    let mut factor = 1.0;
    if spec.halving {
        // s and r are affine in the factor, so the margin test needs no rebuild
        for _ in 0..64 {
            let min_s = perturbation.iter().map(|p| 1.0 + factor * p).fold(f64::INFINITY, f64::min);
            let min_r = dperturb_r.iter().map(|p| 1.0 + factor * p).fold(f64::INFINITY, f64::min);
            if min_s >= RANDOM_BODY_MARGIN && min_r >= RANDOM_BODY_MARGIN {
                break;
            }
            factor *= 0.5;
        }
    }
    let samples = perturbation.iter().map(|p| 1.0 + factor * p).collect();
    ConvexBody::new(SupportFunction::new(samples)?)
}

/// Exact area of an ellipse, for tests and reports.
pub fn ellipse_area(a: f64, b: f64) -> f64 {
    PI * a * b
}

/// Extinction time of a disk of radius `rho` under the flow, `(3/4)ρ^{4/3}`.
pub fn disk_extinction_time(rho: f64) -> f64 {
    0.75 * rho.powf(4.0 / 3.0)
}

/// Radius at time `t` of a disk starting at radius `rho`.
pub fn disk_radius_at(rho: f64, t: f64) -> f64 {
    (rho.powf(4.0 / 3.0) - 4.0 * t / 3.0).max(0.0).powf(0.75)
}
