//! GL(2) action on bodies through their support functions.

use std::f64::consts::TAU;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::spectral::{self, SpectralGrid};
use crate::support::SupportFunction;

/// Tolerance on `|det - 1|` for a map to count as special linear.
pub const SL2_TOLERANCE: f64 = 1e-12;

/// Invertible 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMap {
    entries: [[f64; 2]; 2],
    det: f64,
}

impl LinearMap {
    pub fn new(entries: [[f64; 2]; 2]) -> Result<Self> {
        let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
        let scale = entries.iter().flatten().map(|x| x * x).sum::<f64>();
        if !det.is_finite() || det.abs() <= 1e-14 * scale {
            return Err(Error::SingularMap(det));
        }
        Ok(Self { entries, det })
    }

    /// Rescale to unit determinant. Orientation-reversing input is rejected.
    pub fn special(entries: [[f64; 2]; 2]) -> Result<Self> {
        let m = Self::new(entries)?;
        if m.det < 0.0 {
            return Err(Error::InvalidArgument(
                "orientation-reversing map cannot be normalized into SL(2)".into(),
            ));
        }
        let k = m.det.sqrt().recip();
        let e = m.entries;
        Self::new([[k * e[0][0], k * e[0][1]], [k * e[1][0], k * e[1][1]]])
    }

    pub fn identity() -> Self {
        Self {
            entries: [[1.0, 0.0], [0.0, 1.0]],
            det: 1.0,
        }
    }

    pub fn diag(a: f64, b: f64) -> Result<Self> {
        Self::new([[a, 0.0], [0.0, b]])
    }

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            entries: [[c, -s], [s, c]],
            det: 1.0,
        }
    }

    /// Seeded SL(2) map `R(α)·diag(e^u, e^{-u})·R(β)` with `|u| <= max_log_stretch`.
    pub fn random_special(seed: u64, max_log_stretch: f64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let alpha = rng.random_range(0.0..TAU);
        let beta = rng.random_range(0.0..TAU);
        let u = rng.random_range(-max_log_stretch..=max_log_stretch);
        let stretch = Self {
            entries: [[u.exp(), 0.0], [0.0, (-u).exp()]],
            det: 1.0,
        };
        Self::rotation(alpha).compose(&stretch).compose(&Self::rotation(beta))
    }

    pub fn entries(&self) -> [[f64; 2]; 2] {
        self.entries
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn is_special(&self) -> bool {
        (self.det - 1.0).abs() <= SL2_TOLERANCE
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let a = self.entries;
        let b = other.entries;
        let mut e = [[0.0; 2]; 2];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        LinearMap {
            entries: e,
            det: self.det * other.det,
        }
    }

    pub fn transpose(&self) -> LinearMap {
        let e = self.entries;
        LinearMap {
            entries: [[e[0][0], e[1][0]], [e[0][1], e[1][1]]],
            det: self.det,
        }
    }

    pub fn inverse(&self) -> LinearMap {
        let e = self.entries;
        let k = 1.0 / self.det;
        LinearMap {
            entries: [[k * e[1][1], -k * e[0][1]], [-k * e[1][0], k * e[0][0]]],
            det: k,
        }
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let e = self.entries;
        [
            e[0][0] * x[0] + e[0][1] * x[1],
            e[1][0] * x[0] + e[1][1] * x[1],
        ]
    }

    /// Largest absolute entry difference.
    pub fn distance(&self, other: &LinearMap) -> f64 {
        self.entries
            .iter()
            .flatten()
            .zip(other.entries.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Support function of `ΦK` on the grid: `s_{ΦK}(z) = |Φᵀz|·s_K(Φᵀz/|Φᵀz|)`,
/// with `s_K` evaluated off-grid by its trigonometric interpolant.
pub fn apply_linear_map(body: &ConvexBody, phi: &LinearMap) -> Result<ConvexBody> {
    let n = body.grid_size();
    let interp = SpectralGrid::get(n).interpolant(body.samples());
    let adjoint = phi.transpose();
    let samples: Vec<f64> = (0..n)
        .map(|j| {
            let t = spectral::theta(n, j);
            let w = adjoint.apply([t.cos(), t.sin()]);
            let norm = w[0].hypot(w[1]);
            norm * interp.eval(w[1].atan2(w[0]))
        })
        .collect();
    ConvexBody::new(SupportFunction::new(samples)?)
}

impl ConvexBody {
    pub fn transformed(&self, phi: &LinearMap) -> Result<ConvexBody> {
        apply_linear_map(self, phi)
    }
}
