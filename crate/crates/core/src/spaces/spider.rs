//! d-leg spider tree: copies of `[0, ∞)` glued at a common center node.
//!
//! The metric is `|r_a − r_b|` on a shared leg and `r_a + r_b` across legs
//! (shortest path through the center). All points with radius 0 are the
//! same center node; they are canonicalized to leg 1.

use crate::error::{Error, Result};

/// A point on a spider tree: a leg id (1-based) and a radius from the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiderPoint {
    leg: u32,
    radius: f64,
}

impl SpiderPoint {
    /// Builds a spider point. Radius-0 points are identified with the
    /// center node and stored on leg 1.
    pub fn new(leg: u32, radius: f64) -> Result<Self> {
        if leg == 0 {
            return Err(Error::invalid("spider leg ids are 1-based"));
        }
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::invalid(format!(
                "spider radius must be a finite nonnegative real, got {radius}"
            )));
        }
        let leg = if radius == 0.0 { 1 } else { leg };
        Ok(Self { leg, radius })
    }

    /// The center node (radius 0).
    pub fn center() -> Self {
        Self { leg: 1, radius: 0.0 }
    }

    pub fn leg(&self) -> u32 {
        self.leg
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_center(&self) -> bool {
        self.radius == 0.0
    }
}

/// Intrinsic spider metric.
pub fn distance(a: &SpiderPoint, b: &SpiderPoint) -> f64 {
    if a.leg == b.leg {
        (a.radius - b.radius).abs()
    } else {
        a.radius + b.radius
    }
}

/// Point at arc-length fraction `t` from `a` on the geodesic `[a, b]`.
///
/// Caller validates `t ∈ [0, 1]`. Across legs the geodesic passes through
/// the center; tiny negative radii from cancellation are clamped to 0.
pub fn interpolate(a: &SpiderPoint, b: &SpiderPoint, t: f64) -> SpiderPoint {
    if a.leg == b.leg {
        let r = a.radius + t * (b.radius - a.radius);
        return SpiderPoint::new(a.leg, r.max(0.0)).expect("radius is nonnegative");
    }
    let total = a.radius + b.radius;
    let arc = t * total;
    if arc <= a.radius {
        SpiderPoint::new(a.leg, a.radius - arc).expect("radius is nonnegative")
    } else {
        SpiderPoint::new(b.leg, (arc - a.radius).min(b.radius)).expect("radius is nonnegative")
    }
}
