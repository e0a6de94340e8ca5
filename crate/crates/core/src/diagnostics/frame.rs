use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::linear_map::LinearMap;
use crate::spectral::integrate_with;

/// Moment matrices with a larger condition number are refused.
pub const MAX_FRAME_CONDITION: f64 = 1e8;

/// SL(2) map putting a body's moment ellipse into disk position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub phi: LinearMap,
    pub moment_matrix: [[f64; 2]; 2],
}

/// `M = ∫_K x xᵀ dx` about the origin.
///
/// `div(x_i x_j x) = 4 x_i x_j`, so `M_ij = ¼∮ γ_i γ_j ⟨γ, ν⟩ dℓ = ¼∫ γ_i γ_j s r dθ`.
pub fn moment_matrix(body: &ConvexBody) -> [[f64; 2]; 2] {
    let n = body.grid_size();
    let pts: Vec<[f64; 2]> = (0..n).map(|j| body.boundary_point(j)).collect();
    let s = body.samples();
    let r = body.radius();
    let m = |a: usize, b: usize| 0.25 * integrate_with(n, |j| pts[j][a] * pts[j][b] * s[j] * r[j]);
    let off = m(0, 1);
    [[m(0, 0), off], [off, m(1, 1)]]
}

/// `Φ = (det M)^{1/4} M^{-1/2}`. The framed body `ΦK` has moment matrix
/// `(det M)^{1/2}·I`.
pub fn sl2_frame(body: &ConvexBody) -> Result<Frame> {
    let m = moment_matrix(body);
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    let tr = a + c;
    let det = a * c - b * b;
    let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
    let lo = 0.5 * (tr - disc);
    let hi = 0.5 * (tr + disc);
    if !(lo > 0.0) || hi / lo > MAX_FRAME_CONDITION {
        return Err(Error::FrameFailure(if lo > 0.0 { hi / lo } else { f64::INFINITY }));
    }
    // √M = (M + √det·I)/√(tr + 2√det) for 2×2 SPD M
    let sd = det.sqrt();
    let k = (tr + 2.0 * sd).sqrt();
    let root = [[(a + sd) / k, b / k], [b / k, (c + sd) / k]];
    // inverse of the root, rescaled to unit determinant
    let root_det = root[0][0] * root[1][1] - root[0][1] * root[0][1];
    let scale = det.powf(0.25) / root_det;
    let phi = LinearMap::new([
        [scale * root[1][1], -scale * root[0][1]],
        [-scale * root[0][1], scale * root[0][0]],
    ])?;
    Ok(Frame {
        phi,
        moment_matrix: m,
    })
}
