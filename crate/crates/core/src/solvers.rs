//! Fréchet mean and median estimators over a `Space`: the inductive mean,
//! the empirical Fréchet mean, the cyclic proximal-point median for
//! nonpositively curved spaces, and a tangent-space Weiszfeld median for
//! the sphere.

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Space, SpacePoint};
use crate::spaces::sphere::{self, SpherePoint};

/// Iteration and termination controls shared by the iterative solvers.
///
/// The proximal step size follows the schedule `λ_s = step_constant / s`
/// with `s` the sweep index; `max_iterations` counts full sweeps over the
/// sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub max_iterations: usize,
    pub step_constant: f64,
    pub objective_tolerance: f64,
    pub displacement_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            step_constant: 1.0,
            objective_tolerance: 1e-9,
            displacement_tolerance: 1e-8,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        for (name, v) in [
            ("step_constant", self.step_constant),
            ("objective_tolerance", self.objective_tolerance),
            ("displacement_tolerance", self.displacement_tolerance),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be a positive real")));
            }
        }
        Ok(())
    }
}

/// A finite sample with normalized nonnegative weights.
#[derive(Debug, Clone)]
pub struct WeightedSample {
    points: Vec<SpacePoint>,
    weights: Vec<f64>,
}

impl WeightedSample {
    /// Uniform weights `1/n`.
    pub fn uniform(points: Vec<SpacePoint>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::invalid("sample must contain at least one point"));
        }
        let w = 1.0 / n as f64;
        Ok(Self {
            points,
            weights: vec![w; n],
        })
    }

    /// Explicit weights; they must be nonnegative with a positive sum and
    /// are normalized to sum to 1.
    pub fn weighted(points: Vec<SpacePoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("sample must contain at least one point"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid("one weight per point required"));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::invalid("weights must be nonnegative reals"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("weights must not all be zero"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { points, weights })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SpacePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Result of an iterative solver, with convergence diagnostics.
///
/// `converged` is true when the per-sweep displacement criterion fired
/// before `max_iterations`; otherwise the best iterate found so far is
/// still returned. `objective_trace` records the accepted (best-so-far)
/// objective after each sweep, so it is non-increasing by construction.
#[derive(Debug, Clone)]
pub struct SolverOutput {
    pub point: SpacePoint,
    pub converged: bool,
    pub sweeps: usize,
    pub objective: f64,
    pub objective_trace: Vec<f64>,
}

/// Weighted Fréchet objective `Σ_j w_j d(x, x_j)^power` with `power ∈ {1, 2}`.
pub fn frechet_objective(
    space: &Space,
    sample: &WeightedSample,
    x: &SpacePoint,
    power: u32,
) -> Result<f64> {
    if power != 1 && power != 2 {
        return Err(Error::invalid(format!("power must be 1 or 2, got {power}")));
    }
    let mut total = 0.0;
    for (p, &w) in sample.points().iter().zip(sample.weights()) {
        let d = space.distance(x, p)?;
        total += w * if power == 1 { d } else { d * d };
    }
    Ok(total)
}

/// Streaming geodesic mean `s_i = interpolate(s_{i−1}, x_i, 1/i)`.
///
/// Coincides with the arithmetic mean in Euclidean space but depends on
/// the data order elsewhere.
pub fn inductive_mean(space: &Space, points: &[SpacePoint]) -> Result<SpacePoint> {
    let Some(first) = points.first() else {
        return Err(Error::invalid("inductive mean of an empty list"));
    };
    let mut s = first.clone();
    for (i, x) in points.iter().enumerate().skip(1) {
        s = space.interpolate(&s, x, 1.0 / (i as f64 + 1.0))?;
    }
    Ok(s)
}

/// Cyclic proximal-point minimizer of the squared-distance objective.
///
/// Each sweep applies, per point, the exact quadratic proximal step: move
/// toward `x_j` by fraction `w_j λ_s / (1 + w_j λ_s)`. Starts from the
/// inductive mean; only sweeps that improve the objective replace the
/// returned iterate, so the output is never worse than the warm start.
pub fn empirical_frechet_mean(
    space: &Space,
    sample: &WeightedSample,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolverOutput> {
    settings.validate()?;
    proximal_point_loop(space, sample, settings, seed, 2, false)
}

/// Cyclic proximal-point Fréchet median for nonpositively curved spaces.
///
/// Per point the exact proximal step of `w·d(·, x_j)` moves toward `x_j`
/// by arc length `min(w_j λ_s, d)`. The returned point is the best
/// objective value seen among the warm start, sweep iterates and the
/// input points themselves, so its objective never exceeds the objective
/// at any input point.
pub fn frechet_median_npc(
    space: &Space,
    sample: &WeightedSample,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolverOutput> {
    if !space.curvature().is_nonpositive() {
        return Err(Error::UnsupportedSpace(format!(
            "frechet_median_npc requires kappa <= 0; {} has kappa = {}",
            space.name(),
            space.curvature().kappa
        )));
    }
    settings.validate()?;
    cyclic_proximal_median(space, sample, settings, seed)
}

/// Proximal-point median loop without the curvature gate. Used directly
/// for the floor-restricted Bures–Wasserstein geometry, whose geodesics
/// are unique in the cone even though its curvature bound is positive.
pub(crate) fn cyclic_proximal_median(
    space: &Space,
    sample: &WeightedSample,
    settings: &SolverSettings,
    seed: u64,
) -> Result<SolverOutput> {
    settings.validate()?;
    proximal_point_loop(space, sample, settings, seed, 1, true)
}

fn proximal_point_loop(
    space: &Space,
    sample: &WeightedSample,
    settings: &SolverSettings,
    seed: u64,
    power: u32,
    consider_input_points: bool,
) -> Result<SolverOutput> {
    if sample.is_empty() {
        return Err(Error::invalid("solver needs a nonempty sample"));
    }

    let mut order: Vec<usize> = (0..sample.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut x = inductive_mean(space, sample.points())?;
    let mut best = x.clone();
    let mut best_obj = frechet_objective(space, sample, &x, power)?;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut sweeps = 0;

    for sweep in 1..=settings.max_iterations {
        sweeps = sweep;
        let lambda = settings.step_constant / sweep as f64;
        let sweep_start = x.clone();
        for &j in &order {
            let target = &sample.points()[j];
            let w = sample.weights()[j];
            if w == 0.0 {
                continue;
            }
            let d = space.distance(&x, target)?;
            if d == 0.0 {
                continue;
            }
            let t = if power == 1 {
                ((w * lambda) / d).min(1.0)
            } else {
                (w * lambda) / (1.0 + w * lambda)
            };
            x = space.interpolate(&x, target, t)?;
        }
        let obj = frechet_objective(space, sample, &x, power)?;
        if obj < best_obj {
            best_obj = obj;
            best = x.clone();
        }
        trace.push(best_obj);
        let displacement = space.distance(&sweep_start, &x)?;
        if displacement < settings.displacement_tolerance {
            converged = true;
            break;
        }
    }

    if consider_input_points {
        for p in sample.points() {
            let obj = frechet_objective(space, sample, p, power)?;
            if obj + settings.objective_tolerance < best_obj {
                best_obj = obj;
                best = p.clone();
            }
        }
    }

    Ok(SolverOutput {
        point: best,
        converged,
        sweeps,
        objective: best_obj,
        objective_trace: trace,
    })
}

/// Geometric median on the unit sphere via tangent-space Weiszfeld steps:
/// log-map the points at the current estimate, apply the Euclidean
/// Weiszfeld update in the tangent plane, exp-map back.
///
/// Requires the sample to fit in an open ball of radius π/2; this is
/// verified against the returned candidate and violated inputs are
/// rejected.
pub fn frechet_median_sphere(
    points: &[SpherePoint],
    settings: &SolverSettings,
) -> Result<SolverOutput> {
    settings.validate()?;
    if points.is_empty() {
        return Err(Error::invalid("median of an empty point list"));
    }
    let space = Space::sphere();

    // chordal mean projected back to the sphere as the starting guess
    let mut sum = Vector3::zeros();
    for p in points {
        sum += p.vector();
    }
    let mut x = if sum.norm() > 1e-9 {
        SpherePoint::from_vector(sum)?
    } else {
        points[0]
    };

    let mut converged = false;
    let mut sweeps = 0;
    for iter in 1..=settings.max_iterations {
        sweeps = iter;
        // Weiszfeld weights 1/d blow up on a data point; nudge off it
        if points.iter().any(|p| sphere::distance(&x, p) < 1e-12) {
            x = perturb_on_sphere(&x)?;
        }
        let mut num = Vector3::zeros();
        let mut denom = 0.0;
        for p in points {
            let d = sphere::distance(&x, p);
            if d < 1e-12 {
                continue;
            }
            num += sphere::log_map(&x, p) / d;
            denom += 1.0 / d;
        }
        if denom == 0.0 {
            // all points coincide with the iterate
            converged = true;
            break;
        }
        let step = num / denom;
        let next = sphere::exp_map(&x, &step)?;
        let moved = sphere::distance(&x, &next);
        x = next;
        if moved < settings.displacement_tolerance {
            converged = true;
            break;
        }
    }

    let candidate = SpacePoint::Sphere(x);
    let tagged: Vec<SpacePoint> = points.iter().map(|&p| SpacePoint::Sphere(p)).collect();
    if !space.validate_support_radius(&tagged, &candidate)? {
        return Err(Error::invalid(
            "sample does not fit in an open ball of radius pi/2 about the median candidate",
        ));
    }
    let sample = WeightedSample::uniform(tagged)?;
    let objective = frechet_objective(&space, &sample, &candidate, 1)?;
    Ok(SolverOutput {
        point: candidate,
        converged,
        sweeps,
        objective,
        objective_trace: Vec::new(),
    })
}

fn perturb_on_sphere(x: &SpherePoint) -> Result<SpherePoint> {
    // fixed tangent direction: any unit vector orthogonal to x
    let v = x.vector();
    let helper = if v.x.abs() < 0.9 {
        Vector3::new(1.0, 0.0, 0.0)
    } else {
        Vector3::new(0.0, 1.0, 0.0)
    };
    let tangent = (helper - v * v.dot(&helper)).normalize() * 1e-9;
    sphere::exp_map(x, &tangent)
}
