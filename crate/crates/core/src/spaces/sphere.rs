//! Unit sphere S² in ℝ³ with the great-circle metric (curvature +1).

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// A unit vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    v: Vector3<f64>,
}

impl SpherePoint {
    /// Builds a sphere point from any nonzero finite vector, normalizing it.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vector3::new(x, y, z);
        if !(v.x.is_finite() && v.y.is_finite() && v.z.is_finite()) {
            return Err(Error::invalid("sphere coordinates must be finite"));
        }
        let n = v.norm();
        if n < 1e-12 {
            return Err(Error::invalid("cannot normalize a near-zero vector"));
        }
        Ok(Self { v: v / n })
    }

    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        Self::new(v.x, v.y, v.z)
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.v
    }
}

/// Great-circle distance in `[0, π]`, computed with the atan2 form which is
/// stable near 0 and π.
pub fn distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    let cross = a.v.cross(&b.v).norm();
    let dot = a.v.dot(&b.v);
    cross.atan2(dot)
}

/// Spherical linear interpolation at arc-length fraction `t`.
///
/// Caller validates `t ∈ [0, 1]` and rejects antipodal pairs.
pub fn interpolate(a: &SpherePoint, b: &SpherePoint, t: f64) -> Result<SpherePoint> {
    let theta = distance(a, b);
    if theta == 0.0 {
        return Ok(*a);
    }
    let s = theta.sin();
    let va = a.v * (((1.0 - t) * theta).sin() / s);
    let vb = b.v * ((t * theta).sin() / s);
    SpherePoint::from_vector(va + vb)
}

/// Log map: tangent vector at `base` pointing to `target` with norm
/// `d(base, target)`.
pub fn log_map(base: &SpherePoint, target: &SpherePoint) -> Vector3<f64> {
    let theta = distance(base, target);
    if theta == 0.0 {
        return Vector3::zeros();
    }
    let rejection = target.v - base.v * base.v.dot(&target.v);
    let n = rejection.norm();
    if n < 1e-300 {
        // antipodal-degenerate direction; caller guards against this
        return Vector3::zeros();
    }
    rejection * (theta / n)
}

/// Exp map: walk from `base` along tangent vector `v` for arc length `‖v‖`.
pub fn exp_map(base: &SpherePoint, v: &Vector3<f64>) -> Result<SpherePoint> {
    let n = v.norm();
    if n == 0.0 {
        return Ok(*base);
    }
    SpherePoint::from_vector(base.v * n.cos() + (v / n) * n.sin())
}
