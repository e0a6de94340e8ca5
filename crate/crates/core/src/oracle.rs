//! Polygonal cross-check for the spectral area formulas.
//!
//! The body boundary is sampled at `M` normals; `A` comes from the shoelace
//! formula on the inscribed polygon, `A*` from the shoelace formula on the
//! polar of the circumscribed polygon, whose vertices are `z_i / s_i`. Both
//! converge from below at rate `O(M^-2)`.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::spectral::{self, resample, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonAreas {
    pub area: f64,
    pub polar_area: f64,
}

fn shoelace(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % n];
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
}

pub fn polygon_oracle(body: &ConvexBody, m: usize) -> Result<PolygonAreas> {
    if m < body.grid_size() {
        return Err(Error::InvalidArgument(format!(
            "oracle needs M >= N ({m} < {})",
            body.grid_size()
        )));
    }
    let s = resample(body.samples(), m);
    let ds = SpectralGrid::get(m).derivative(&s, 1);
    let mut boundary = Vec::with_capacity(m);
    let mut dual = Vec::with_capacity(m);
    for j in 0..m {
        let (sin, cos) = spectral::theta(m, j).sin_cos();
        boundary.push([s[j] * cos - ds[j] * sin, s[j] * sin + ds[j] * cos]);
        dual.push([cos / s[j], sin / s[j]]);
    }
    Ok(PolygonAreas {
        area: shoelace(&boundary),
        polar_area: shoelace(&dual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{make_disk, make_ellipse, make_random_body, RandomBodySpec};
    use std::f64::consts::PI;

    #[test]
    fn unit_disk() {
        let d = make_disk(1.0, 256).unwrap();
        let p = polygon_oracle(&d, 4096).unwrap();
        assert!((p.area - PI).abs() <= 1e-5);
        assert!((p.polar_area - PI).abs() <= 1e-5);
    }

    #[test]
    fn ellipse_santalo_equality() {
        let e = make_ellipse(2.0, 0.5, 0.0, 256).unwrap();
        let p = polygon_oracle(&e, 8192).unwrap();
        assert!((p.area * p.polar_area - PI * PI).abs() <= 1e-4);
    }

    #[test]
    fn agrees_with_spectral_area() {
        let body = make_random_body(&RandomBodySpec::default(), 256).unwrap();
        let p = polygon_oracle(&body, 16 * 256).unwrap();
        assert!((p.area - body.area()).abs() <= 1e-5);
        assert!((p.polar_area - body.polar_area()).abs() <= 1e-4 * body.polar_area());
    }

    #[test]
    fn rejects_coarse_polygons() {
        let d = make_disk(1.0, 256).unwrap();
        assert!(polygon_oracle(&d, 128).is_err());
    }
}
