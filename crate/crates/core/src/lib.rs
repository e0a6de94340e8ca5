//! Numerical laboratory for the planar affine normal flow `∂t X = -κ^{1/3} ν`.
//!
//! Convex bodies are represented by their support functions on a uniform grid
//! of normal angles. The crate provides the spectral calculus on that grid,
//! the affine functionals of a body (area, polar area, p-affine perimeters,
//! affine support function), the GL(2) action, an RK4 integrator for the flow,
//! and diagnostics checking the flow's identities and monotone quantities.

pub mod body;
pub mod diagnostics;
mod error;
pub mod flow;
pub mod linear_map;
pub mod oracle;
pub mod record;
pub mod spectral;
pub mod suite;
pub mod support;

pub use body::{
    make_disk, make_ellipse, make_random_body, radius_of_curvature, ConvexBody, RandomBodySpec,
};
pub use error::{Error, Result};
pub use flow::{
    advance_to, center_on_extinction_point, flow_rhs, normalized_view, run, run_observed, step, FlowState, FlowStatus, RunOptions,
    RunOutput, Snapshot, StepController,
};
pub use linear_map::{apply_linear_map, LinearMap};
pub use oracle::{polygon_oracle, PolygonAreas};
pub use record::FunctionalRecord;
pub use spectral::spectral_derivative;
pub use support::SupportFunction;
