//! Poincaré disk model of the hyperbolic plane (curvature −1).
//!
//! Distance uses the closed form
//! `d(a, b) = arccosh(1 + 2‖a−b‖² / ((1−‖a‖²)(1−‖b‖²)))`
//! and geodesics are built by the disk automorphism `z ↦ (z−a)/(1−āz)`,
//! which moves `a` to the origin where geodesics are radial.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A point strictly inside the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    x: f64,
    y: f64,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid("disk coordinates must be finite"));
        }
        if x * x + y * y >= 1.0 {
            return Err(Error::invalid(format!(
                "({x}, {y}) is not strictly inside the unit disk"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn origin() -> Self {
        Self { x: 0.0, y: 0.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    fn as_complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

/// Hyperbolic distance between two interior points.
pub fn distance(a: &DiskPoint, b: &DiskPoint) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    let dd = dx * dx + dy * dy;
    if dd == 0.0 {
        return 0.0;
    }
    let qa = 1.0 - (a.x * a.x + a.y * a.y);
    let qb = 1.0 - (b.x * b.x + b.y * b.y);
    (1.0 + 2.0 * dd / (qa * qb)).acosh()
}

/// Point at arc-length fraction `t` from `a` on the geodesic `[a, b]`.
///
/// Caller validates `t ∈ [0, 1]`. Mapping `a` to the origin makes the
/// geodesic a diameter segment, where the unit-speed parametrization is
/// `ρ(t) = tanh(t · artanh(r))`.
pub fn interpolate(a: &DiskPoint, b: &DiskPoint, t: f64) -> Result<DiskPoint> {
    let ca = a.as_complex();
    let cb = b.as_complex();
    let w = (cb - ca) / (Complex64::new(1.0, 0.0) - ca.conj() * cb);
    let r = w.norm();
    if r == 0.0 {
        return Ok(*a);
    }
    let rho = (t * r.atanh()).tanh();
    let w_t = w * (rho / r);
    let z = (w_t + ca) / (Complex64::new(1.0, 0.0) + ca.conj() * w_t);
    DiskPoint::new(z.re, z.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn distance_at_origin_is_zero() {
        let o = DiskPoint::origin();
        assert_eq!(distance(&o, &o), 0.0);
    }

    #[test]
    fn radial_distance_matches_artanh_integral() {
        // integrating the radial metric gives 2·artanh(0.5) = ln 3
        let o = DiskPoint::origin();
        let p = DiskPoint::new(0.5, 0.0).unwrap();
        assert_relative_eq!(distance(&o, &p), 1.0986122886681097, max_relative = 1e-14);
        assert_relative_eq!(distance(&o, &p), 2.0 * 0.5_f64.atanh(), max_relative = 1e-14);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = DiskPoint::new(0.3, 0.1).unwrap();
        let b = DiskPoint::new(-0.2, 0.4).unwrap();
        assert_eq!(distance(&a, &b), distance(&b, &a));
    }

    #[test]
    fn radial_interpolation_closed_form() {
        let o = DiskPoint::origin();
        let r = 0.7;
        let p = DiskPoint::new(r, 0.0).unwrap();
        for &t in &[0.1, 0.25, 0.5, 0.9] {
            let g = interpolate(&o, &p, t).unwrap();
            assert_relative_eq!(g.x(), (t * r.atanh()).tanh(), max_relative = 1e-13);
            assert!(g.y().abs() < 1e-15);
            // unit-speed check
            assert_relative_eq!(distance(&o, &g), t * distance(&o, &p), max_relative = 1e-12);
        }
    }

    #[test]
    fn midpoint_is_equidistant() {
        let a = DiskPoint::new(0.4, -0.35).unwrap();
        let b = DiskPoint::new(-0.6, 0.2).unwrap();
        let m = interpolate(&a, &b, 0.5).unwrap();
        assert!((distance(&a, &m) - distance(&m, &b)).abs() < 1e-8);
    }

    #[test]
    fn rejects_boundary_points() {
        assert!(DiskPoint::new(1.0, 0.0).is_err());
        assert!(DiskPoint::new(0.8, 0.7).is_err());
    }
}
