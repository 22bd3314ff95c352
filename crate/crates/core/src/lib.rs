//! Numerical comparison geometry for rotationally symmetric Riemannian
//! metrics.
//!
//! The crate evaluates sectional curvatures, distance-sphere areas and ball
//! volumes of metrics `dr² + f(r)² g₀`, compares them against the constant
//! curvature models, and checks the resulting volume-ratio inequalities and
//! rigidity mechanisms on sample grids.

pub mod comparison_engine;
pub mod counterexample;
pub mod error;
pub mod grid;
pub mod model_spaces;
pub mod plane_operator;
pub mod quadrature;
pub mod report;
pub mod warped_metrics;

pub use error::{GeometryError, Result};
pub use grid::RadiusGrid;
pub use model_spaces::{unit_sphere_volume, RadiusDomain, SpaceForm};
pub use warped_metrics::{CurvaturePair, RadialProfile, WarpedMetric};
