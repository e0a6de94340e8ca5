//! Fourier calculus on the uniform circle grid `θ_j = 2πj/N`.
//!
//! Everything here works on plain sample slices; validation of the body
//! invariants happens one level up in [`crate::support`].

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Smallest grid accepted anywhere in the crate.
pub const MIN_GRID: usize = 64;
pub const DEFAULT_GRID: usize = 256;

pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= MIN_GRID && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

#[inline]
pub fn theta(n: usize, j: usize) -> f64 {
    TAU * j as f64 / n as f64
}

pub fn angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| theta(n, j)).collect()
}

/// Signed wavenumber of FFT bin `k` on an `n`-point grid.
#[inline]
fn wavenumber(n: usize, k: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Planned transforms for one grid size. Shared process-wide.
pub struct SpectralGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralGrid {
    pub fn get(n: usize) -> Arc<SpectralGrid> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpectralGrid>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(SpectralGrid {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized DFT `c_k = Σ_j f_j e^{-ikθ_j}`.
    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(f.len(), self.n);
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse of [`forward`](Self::forward), keeping the real part.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.n);
        self.inverse.process(&mut coeffs);
        let scale = 1.0 / self.n as f64;
        coeffs.into_iter().map(|c| c.re * scale).collect()
    }

    /// `order`-th θ-derivative by multiplying Fourier modes with `(ik)^order`.
    ///
    /// The Nyquist mode is dropped for odd orders (its derivative is not
    /// representable as a real grid function) and kept as `-(N/2)^2` for the
    /// second derivative.
    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        let n = self.n;
        let mut c = self.forward(f);
        for (k, ck) in c.iter_mut().enumerate() {
            let w = wavenumber(n, k);
            *ck = match order {
                0 => *ck,
                1 if k == n / 2 => Complex64::new(0.0, 0.0),
                1 => *ck * Complex64::new(0.0, w),
                2 => *ck * (-w * w),
                _ => unreachable!("order checked by caller"),
            };
        }
        self.inverse(c)
    }

    /// `f + f_θθ`, the operator taking a support function to its radius of curvature.
    pub fn curvature_operator(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut c = self.forward(f);
        for (k, ck) in c.iter_mut().enumerate() {
            let w = wavenumber(n, k);
            *ck *= 1.0 - w * w;
        }
        self.inverse(c)
    }

    /// Trigonometric interpolant of the samples, for off-grid evaluation.
    pub fn interpolant(&self, f: &[f64]) -> Interpolant {
        Interpolant {
            coeffs: self.forward(f),
        }
    }
}

/// Spectral derivative of a periodic sample vector.
pub fn spectral_derivative(f: &[f64], order: u32) -> Result<Vec<f64>> {
    check_grid_size(f.len())?;
    if !(1..=2).contains(&order) {
        return Err(Error::DerivativeOrder(order));
    }
    check_finite(f)?;
    Ok(SpectralGrid::get(f.len()).derivative(f, order))
}

pub fn check_finite(f: &[f64]) -> Result<()> {
    match f.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Trapezoid rule over one period: `∫_0^{2π} f dθ ≈ (2π/N) Σ f_j`.
pub fn integrate(f: &[f64]) -> f64 {
    TAU / f.len() as f64 * f.iter().sum::<f64>()
}

/// Trapezoid rule applied to a pointwise product without allocating.
pub fn integrate_with<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    TAU / n as f64 * (0..n).map(f).sum::<f64>()
}

/// Real trigonometric interpolant `p(θ) = (1/N) Σ_k c_k e^{ikθ}` with the
/// Nyquist term taken as a cosine.
#[derive(Debug, Clone)]
pub struct Interpolant {
    coeffs: Vec<Complex64>,
}

impl Interpolant {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluate the `order`-th derivative (0, 1 or 2) at an arbitrary angle.
    pub fn eval_derivative(&self, theta: f64, order: u32) -> f64 {
        let n = self.coeffs.len();
        let half = n / 2;
        let mut acc = if order == 0 { self.coeffs[0].re } else { 0.0 };
        // Rotating phasor avoids N calls to sin/cos per point.
        let step = Complex64::new(theta.cos(), theta.sin());
        let mut phase = step;
        for k in 1..half {
            let kf = k as f64;
            let term = self.coeffs[k] * phase;
            acc += 2.0
                * match order {
                    0 => term.re,
                    1 => -kf * term.im,
                    _ => -kf * kf * term.re,
                };
            phase *= step;
            if k % 32 == 0 {
                // keep the phasor on the unit circle
                phase = Complex64::from_polar(1.0, (k + 1) as f64 * theta);
            }
        }
        let hf = half as f64;
        let nyq = self.coeffs[half].re;
        acc += match order {
            0 => nyq * (hf * theta).cos(),
            1 => -hf * nyq * (hf * theta).sin(),
            _ => -hf * hf * nyq * (hf * theta).cos(),
        };
        acc / n as f64
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_derivative(theta, 0)
    }
}

/// Band-limited resampling of `f` onto a uniform grid of `m >= f.len()` points
/// by zero-padding the spectrum.
pub fn resample(f: &[f64], m: usize) -> Vec<f64> {
    let n = f.len();
    assert!(m >= n, "resample only refines");
    let c = SpectralGrid::get(n).forward(f);
    let mut padded = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    for k in 0..half {
        padded[k] = c[k];
        if k > 0 {
            padded[m - k] = c[n - k];
        }
    }
    // split the Nyquist mode symmetrically so the result stays real
    if m > n {
        padded[half] = c[half] * 0.5;
        padded[m - half] = c[half] * 0.5;
    } else {
        padded[half] = c[half];
    }
    let scale = m as f64 / n as f64;
    SpectralGrid::get(m)
        .inverse(padded)
        .into_iter()
        .map(|x| x * scale)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        angles(n).into_iter().map(f).collect()
    }

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn second_derivative_of_cos2() {
        let f = sampled(64, |t| (2.0 * t).cos());
        let d = spectral_derivative(&f, 2).unwrap();
        let want = sampled(64, |t| -4.0 * (2.0 * t).cos());
        assert!(max_err(&d, &want) <= 1e-12);
        // roundoff in the top modes is amplified by k², about ε·N²
        let f = sampled(256, |t| (2.0 * t).cos());
        let d = spectral_derivative(&f, 2).unwrap();
        let want = sampled(256, |t| -4.0 * (2.0 * t).cos());
        assert!(max_err(&d, &want) <= 1e-11);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let d = spectral_derivative(&vec![1.0; 128], 1).unwrap();
        assert!(d.iter().all(|x| x.abs() <= 1e-14));
    }

    #[test]
    fn first_derivative_of_sin3() {
        let f = sampled(256, |t| (3.0 * t).sin());
        let d = spectral_derivative(&f, 1).unwrap();
        let want = sampled(256, |t| 3.0 * (3.0 * t).cos());
        assert!(max_err(&d, &want) <= 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let mut f = vec![0.0; 64];
        f[17] = f64::NAN;
        assert!(matches!(
            spectral_derivative(&f, 1),
            Err(Error::NonFinite { index: 17 })
        ));
        assert!(matches!(
            spectral_derivative(&[0.0; 100], 1),
            Err(Error::GridSize(100))
        ));
        assert!(matches!(
            spectral_derivative(&[0.0; 64], 3),
            Err(Error::DerivativeOrder(3))
        ));
    }

    #[test]
    fn interpolant_is_exact_off_grid() {
        let g = |t: f64| 1.0 + 0.3 * (5.0 * t).cos() - 0.2 * (7.0 * t).sin();
        let gp = |t: f64| -1.5 * (5.0 * t).sin() - 1.4 * (7.0 * t).cos();
        let f = sampled(64, g);
        let p = SpectralGrid::get(64).interpolant(&f);
        for &t in &[0.1, 1.234, 3.0, 6.2] {
            assert!((p.eval(t) - g(t)).abs() < 1e-13);
            assert!((p.eval_derivative(t, 1) - gp(t)).abs() < 1e-12);
        }
        // reproduces grid values, Nyquist included
        let nyq = sampled(64, |t| (32.0 * t).cos());
        let p = SpectralGrid::get(64).interpolant(&nyq);
        for j in [0, 1, 5] {
            assert!((p.eval(theta(64, j)) - nyq[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_matches_analytic() {
        let g = |t: f64| (t.cos() + 2.0).recip();
        let f = sampled(128, g);
        let fine = resample(&f, 1024);
        let want = sampled(1024, g);
        assert!(max_err(&fine, &want) < 1e-12);
    }

    #[test]
    fn trapezoid_is_spectral() {
        // ∫ 1/(2 + cos θ) dθ = 2π/√3
        let f = sampled(64, |t| 1.0 / (2.0 + t.cos()));
        assert!((integrate(&f) - TAU / 3f64.sqrt()).abs() < 1e-13);
    }
}
