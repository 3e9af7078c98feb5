//! Polygon perturbations, first variations of the perimeter under an area
//! constraint, and a quotient-descent flow that drives arbitrary N-gons to
//! regular ones.
//!
//! Indices are zero-based throughout the library. Side `i` joins vertex `i`
//! to vertex `i + 1` (mod N); the interior angle `θ_i` sits at vertex `i`.

pub mod error;
pub mod exec;
pub mod flow;
pub mod generate;
pub mod io;
pub mod metrics;
pub mod perturb;
pub mod point;
pub mod polygon;
pub mod similarity;
pub mod variations;

pub use error::{Error, Result};
pub use exec::Exec;
pub use flow::{
    run_flow, verify_theorem, FlowConfig, FlowOutcome, FlowResult, FlowTrace, TheoremSummary,
};
pub use generate::{generate, regular_quotient, Kind};
pub use metrics::{compute_metrics, PolygonMetrics};
pub use perturb::{admissible_range, AdmissibleRange, Endpoint, Family, Move};
pub use point::Point;
pub use polygon::{is_simple, Polygon, ANGLE_EPS, LENGTH_EPS};
pub use similarity::similarity_distance;
pub use variations::{
    classify, first_variation, psi, quotient_derivative, residuals, Classification, ResidualReport,
};
