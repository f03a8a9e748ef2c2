//! Robust estimation in geodesic metric spaces: boosting weakly
//! (polynomially) concentrating estimators into exponentially
//! concentrating ones by taking the Fréchet median of independent block
//! estimates.
//!
//! The crate provides:
//!
//! - [`geometry`]: the geodesic-space abstraction (distance, geodesic
//!   interpolation, curvature upper bound κ with its diameter `D_κ`);
//! - [`spaces`]: the concrete spaces — spider trees, the Poincaré disk,
//!   the unit sphere, SPD matrices under the affine-invariant and
//!   Bures–Wasserstein metrics, and Euclidean space;
//! - [`solvers`]: inductive means, empirical Fréchet means, and Fréchet
//!   medians (cyclic proximal point; tangent-space Weiszfeld on S²);
//! - [`fmoe`]: the block-splitting booster with its concentration
//!   constants ψ(α, p), C_α and bound calculators;
//! - [`sampling`]: seeded generators for the benchmark populations;
//! - [`covariance`]: the canonical sample covariance estimator;
//! - [`harness`]: the Monte Carlo campaign runner behind the CLI.

pub mod covariance;
pub mod error;
pub mod fmoe;
pub mod geometry;
pub mod harness;
pub mod sampling;
pub mod solvers;
pub mod spaces;

pub use error::{Error, Result};
pub use geometry::{CurvatureBound, Space, SpacePoint};
