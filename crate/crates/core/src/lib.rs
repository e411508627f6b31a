//! Light-cone bounds for local Hamiltonians on factor graphs.
//!
//! The bound evaluators are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix them to `f64`. Exact combinatorics use big rationals,
//! and the simulators work in `f64`.

pub mod bounds;
pub mod causal;
pub mod curve;
pub mod ensemble;
pub mod graph;
pub mod linalg;
pub mod scalar;
pub mod sim;

pub use scalar::Real;

pub type WeightedGraph = graph::WeightedFactorGraph<f64>;
pub type WeightedGraph32 = graph::WeightedFactorGraph<f32>;
pub type Curve = curve::BoundCurve<f64>;
pub type Curve32 = curve::BoundCurve<f32>;
pub type HMatrices = bounds::HMatrices<f64>;
pub type HMatrices32 = bounds::HMatrices<f32>;
pub type ClosedForm = bounds::ClosedForm<f64>;

/// Version string written into output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
