//! One row of monitored scalars, and the trajectory CSV format.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::diagnostics::{entropy_functional, harnack_quantity_raw};
use crate::error::Result;

/// Column order of the trajectory CSV. Fixed.
pub const CSV_COLUMNS: [&str; 12] = [
    "t",
    "A",
    "A_star",
    "omega1",
    "omega2",
    "sigma_min",
    "sigma_max",
    "santalo",
    "aff_iso",
    "entropy",
    "harnack_min",
    "dt",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalRecord {
    pub t: f64,
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "A_star")]
    pub polar_area: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// `A·A*/π²`
    pub santalo: f64,
    /// `Ω₁³/(8π²A)`
    pub aff_iso: f64,
    pub entropy: f64,
    /// `min_j r_j^{-1/3}(t - t0)^{1/4}`
    pub harnack_min: f64,
    /// Last accepted step; zero for the initial record.
    pub dt: f64,
}

impl FunctionalRecord {
    pub fn from_body(t: f64, body: &ConvexBody, t0: f64, dt: f64) -> Self {
        let harnack_min = harnack_quantity_raw(body, t, t0)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Self {
            t,
            area: body.area(),
            polar_area: body.polar_area(),
            omega1: body.omega1(),
            omega2: body.omega2(),
            sigma_min: body.sigma_min(),
            sigma_max: body.sigma_max(),
            santalo: body.santalo(),
            aff_iso: body.normalized_affine_iso(),
            entropy: entropy_functional(body),
            harnack_min,
            dt,
        }
    }

    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.area,
            self.polar_area,
            self.omega1,
            self.omega2,
            self.sigma_min,
            self.sigma_max,
            self.santalo,
            self.aff_iso,
            self.entropy,
            self.harnack_min,
            self.dt,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }

    /// `σ_M/σ_m`
    pub fn sigma_ratio(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[FunctionalRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in records {
        out.write_record(r.values().iter().map(|&v| format_value(v)))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(r: R) -> Result<Vec<FunctionalRecord>> {
    let mut reader = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}
