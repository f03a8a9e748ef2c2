//! Geodesic-space abstraction: curvature metadata, tagged points, and the
//! dispatch of `distance` / `interpolate` to the concrete spaces.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::spaces::{self, DiskPoint, SpdMatrix, SpherePoint, SpiderPoint};

/// Curvature upper bound κ of a space, with the model-space diameter
/// `D_κ = π/√κ` attached whenever κ > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBound {
    pub kappa: f64,
    /// Present iff `kappa > 0`.
    pub diameter_bound: Option<f64>,
}

impl CurvatureBound {
    /// Bound for a nonpositively curved space (κ ≤ 0).
    pub fn nonpositive(kappa: f64) -> Result<Self> {
        if !(kappa <= 0.0) {
            return Err(Error::invalid(format!(
                "nonpositive curvature bound required, got {kappa}"
            )));
        }
        Ok(Self {
            kappa,
            diameter_bound: None,
        })
    }

    /// Bound for a positively curved space; attaches `D_κ = π/√κ`.
    pub fn positive(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::invalid(format!(
                "positive finite curvature bound required, got {kappa}"
            )));
        }
        Ok(Self {
            kappa,
            diameter_bound: Some(PI / kappa.sqrt()),
        })
    }

    pub fn is_nonpositive(&self) -> bool {
        self.kappa <= 0.0
    }
}

/// A point of one of the supported spaces, tagged by kind so cross-space
/// misuse fails fast instead of producing nonsense.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacePoint {
    Euclidean(DVector<f64>),
    Spider(SpiderPoint),
    Disk(DiskPoint),
    Sphere(SpherePoint),
    Spd(SpdMatrix),
}

impl SpacePoint {
    pub fn kind(&self) -> &'static str {
        match self {
            SpacePoint::Euclidean(_) => "euclidean",
            SpacePoint::Spider(_) => "spider",
            SpacePoint::Disk(_) => "disk",
            SpacePoint::Sphere(_) => "sphere",
            SpacePoint::Spd(_) => "spd",
        }
    }

    pub fn as_spd(&self) -> Option<&SpdMatrix> {
        match self {
            SpacePoint::Spd(m) => Some(m),
            _ => None,
        }
    }
}

impl From<SpiderPoint> for SpacePoint {
    fn from(p: SpiderPoint) -> Self {
        SpacePoint::Spider(p)
    }
}

impl From<DiskPoint> for SpacePoint {
    fn from(p: DiskPoint) -> Self {
        SpacePoint::Disk(p)
    }
}

impl From<SpherePoint> for SpacePoint {
    fn from(p: SpherePoint) -> Self {
        SpacePoint::Sphere(p)
    }
}

impl From<SpdMatrix> for SpacePoint {
    fn from(p: SpdMatrix) -> Self {
        SpacePoint::Spd(p)
    }
}

impl From<DVector<f64>> for SpacePoint {
    fn from(v: DVector<f64>) -> Self {
        SpacePoint::Euclidean(v)
    }
}

/// One concrete geodesic space: the metric, its geodesic interpolation,
/// and the curvature upper bound used by the boosting theory.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Euclidean { dim: usize },
    Spider { legs: u32 },
    PoincareDisk,
    Sphere,
    SpdAffineInvariant { dim: usize },
    /// Bures–Wasserstein metric restricted to matrices whose smallest
    /// eigenvalue stays above `eigen_floor`; on that region the curvature
    /// upper bound is `3/(2·eigen_floor²)`.
    SpdBuresWasserstein { dim: usize, eigen_floor: f64 },
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("euclidean dimension must be positive"));
        }
        Ok(Space::Euclidean { dim })
    }

    pub fn spider(legs: u32) -> Result<Self> {
        if legs < 2 {
            return Err(Error::invalid("a spider tree needs at least 2 legs"));
        }
        Ok(Space::Spider { legs })
    }

    pub fn poincare_disk() -> Self {
        Space::PoincareDisk
    }

    pub fn sphere() -> Self {
        Space::Sphere
    }

    pub fn spd_affine_invariant(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        Ok(Space::SpdAffineInvariant { dim })
    }

    pub fn spd_bures_wasserstein(dim: usize, eigen_floor: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if !(eigen_floor > 0.0) || !eigen_floor.is_finite() {
            return Err(Error::invalid(
                "the Bures-Wasserstein space needs a positive eigenvalue floor",
            ));
        }
        Ok(Space::SpdBuresWasserstein { dim, eigen_floor })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Space::Euclidean { .. } => "euclidean",
            Space::Spider { .. } => "spider",
            Space::PoincareDisk => "poincare-disk",
            Space::Sphere => "sphere",
            Space::SpdAffineInvariant { .. } => "spd-affine-invariant",
            Space::SpdBuresWasserstein { .. } => "spd-bures-wasserstein",
        }
    }

    /// Curvature upper bound. Spider trees, Euclidean space and the
    /// affine-invariant SPD geometry are nonpositively curved; the
    /// Poincaré disk has curvature −1; the unit sphere +1; the
    /// floor-restricted Bures–Wasserstein region `3/(2λ₀²)`.
    pub fn curvature(&self) -> CurvatureBound {
        match self {
            Space::Euclidean { .. } | Space::Spider { .. } | Space::SpdAffineInvariant { .. } => {
                CurvatureBound::nonpositive(0.0).expect("0 is nonpositive")
            }
            Space::PoincareDisk => CurvatureBound::nonpositive(-1.0).expect("-1 is nonpositive"),
            Space::Sphere => CurvatureBound::positive(1.0).expect("1 is positive"),
            Space::SpdBuresWasserstein { eigen_floor, .. } => {
                CurvatureBound::positive(1.5 / (eigen_floor * eigen_floor))
                    .expect("floor is positive")
            }
        }
    }

    fn check_point(&self, p: &SpacePoint) -> Result<()> {
        let ok = match (self, p) {
            (Space::Euclidean { dim }, SpacePoint::Euclidean(v)) => v.len() == *dim,
            (Space::Spider { legs }, SpacePoint::Spider(s)) => s.leg() <= *legs,
            (Space::PoincareDisk, SpacePoint::Disk(_)) => true,
            (Space::Sphere, SpacePoint::Sphere(_)) => true,
            (Space::SpdAffineInvariant { dim }, SpacePoint::Spd(m)) => m.dim() == *dim,
            (Space::SpdBuresWasserstein { dim, .. }, SpacePoint::Spd(m)) => m.dim() == *dim,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::PointSpaceMismatch {
                space: self.name(),
                point: p.kind(),
            })
        }
    }

    /// Intrinsic metric of the space.
    pub fn distance(&self, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(match (x, y) {
            (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) => {
                spaces::euclidean::distance(a, b)
            }
            (SpacePoint::Spider(a), SpacePoint::Spider(b)) => spaces::spider::distance(a, b),
            (SpacePoint::Disk(a), SpacePoint::Disk(b)) => spaces::poincare::distance(a, b),
            (SpacePoint::Sphere(a), SpacePoint::Sphere(b)) => spaces::sphere::distance(a, b),
            (SpacePoint::Spd(a), SpacePoint::Spd(b)) => match self {
                Space::SpdAffineInvariant { .. } => spaces::spd::ai_distance(a, b),
                _ => spaces::spd::bw_distance(a, b),
            },
            _ => unreachable!("point kinds checked above"),
        })
    }

    /// Point on a minimizing geodesic at arc-length fraction `t` from `x`.
    ///
    /// On the sphere, pairs at distance ≥ π (antipodes) have no unique
    /// geodesic and are rejected. Bures–Wasserstein geodesics between
    /// positive definite matrices are unique in the cone, so no distance
    /// cutoff applies there.
    pub fn interpolate(&self, x: &SpacePoint, y: &SpacePoint, t: f64) -> Result<SpacePoint> {
        self.check_point(x)?;
        self.check_point(y)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!("t must lie in [0, 1], got {t}")));
        }
        if t == 0.0 {
            return Ok(x.clone());
        }
        if t == 1.0 {
            return Ok(y.clone());
        }
        Ok(match (x, y) {
            (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) => {
                SpacePoint::Euclidean(spaces::euclidean::interpolate(a, b, t))
            }
            (SpacePoint::Spider(a), SpacePoint::Spider(b)) => {
                SpacePoint::Spider(spaces::spider::interpolate(a, b, t))
            }
            (SpacePoint::Disk(a), SpacePoint::Disk(b)) => {
                SpacePoint::Disk(spaces::poincare::interpolate(a, b, t)?)
            }
            (SpacePoint::Sphere(a), SpacePoint::Sphere(b)) => {
                let d = spaces::sphere::distance(a, b);
                if d >= PI - 1e-9 {
                    return Err(Error::NoUniqueGeodesic(
                        "antipodal points on the sphere".into(),
                    ));
                }
                SpacePoint::Sphere(spaces::sphere::interpolate(a, b, t)?)
            }
            (SpacePoint::Spd(a), SpacePoint::Spd(b)) => match self {
                Space::SpdAffineInvariant { .. } => {
                    SpacePoint::Spd(spaces::spd::ai_interpolate(a, b, t))
                }
                _ => SpacePoint::Spd(spaces::spd::bw_interpolate(a, b, t)),
            },
            _ => unreachable!("point kinds checked above"),
        })
    }

    /// True iff every point lies strictly inside the open ball of radius
    /// `D_κ/2` about `center`. Only meaningful on positively curved
    /// spaces; the condition is vacuous for κ ≤ 0 and calling it there is
    /// an error.
    pub fn validate_support_radius(
        &self,
        points: &[SpacePoint],
        center: &SpacePoint,
    ) -> Result<bool> {
        let curv = self.curvature();
        let Some(diameter) = curv.diameter_bound else {
            return Err(Error::invalid(format!(
                "support-radius check requires kappa > 0; {} has kappa = {}",
                self.name(),
                curv.kappa
            )));
        };
        let radius = 0.5 * diameter;
        for p in points {
            if self.distance(p, center)? >= radius {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
