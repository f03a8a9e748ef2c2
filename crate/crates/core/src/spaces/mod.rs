//! Concrete geodesic spaces: spider trees, the Poincaré disk, the unit
//! sphere, SPD matrices under two metrics, and Euclidean space.

pub mod euclidean;
pub mod poincare;
pub mod spd;
pub mod sphere;
pub mod spider;

pub use poincare::DiskPoint;
pub use spd::{SpdMatrix, SymEigen};
pub use sphere::SpherePoint;
pub use spider::SpiderPoint;
