//! Fréchet median-of-estimators boosting: split the data into blocks,
//! run the base estimator per block, and return the Fréchet median of the
//! block estimates. Includes the concentration constants ψ(α, p) and C_α,
//! the block-count selector, and the theoretical radius/failure-probability
//! calculators.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{CurvatureBound, Space, SpacePoint};
use crate::solvers::{
    cyclic_proximal_median, frechet_median_sphere, SolverOutput, SolverSettings, WeightedSample,
};

/// Chernoff exponent `ψ(α, p) = (1−α) log((1−α)/(1−p)) + α log(α/p)`.
///
/// Defined for `0 < p ≤ α < 1`; vanishes at `p = α` and is strictly
/// positive for `p < α`.
pub fn psi(alpha: f64, p: f64) -> Result<f64> {
    if !(0.0 < p && p <= alpha && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "psi requires 0 < p <= alpha < 1, got alpha = {alpha}, p = {p}"
        )));
    }
    Ok((1.0 - alpha) * ((1.0 - alpha) / (1.0 - p)).ln() + alpha * (alpha / p).ln())
}

/// Geometric inflation constant `C_α = (1−α)(1−2α)^{−1/2}` for `α ∈ (0, ½)`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 0.5) {
        return Err(Error::invalid(format!(
            "c_alpha requires alpha in (0, 1/2), got {alpha}"
        )));
    }
    Ok((1.0 - alpha) / (1.0 - 2.0 * alpha).sqrt())
}

/// The pair (ψ, C_α) for a given (α, p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationConstants {
    pub psi: f64,
    pub c_alpha: f64,
}

impl ConcentrationConstants {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        Ok(Self {
            psi: psi(alpha, p)?,
            c_alpha: c_alpha(alpha)?,
        })
    }
}

/// Smallest block count driving the failure probability below `delta`:
/// `⌊log(1/δ)/ψ(α, p)⌋ + 1`.
pub fn select_block_count(delta: f64, alpha: f64, p: f64) -> Result<usize> {
    if !(0.0 < delta && delta <= 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    if !(p < alpha) {
        return Err(Error::invalid(format!(
            "select_block_count requires p < alpha, got alpha = {alpha}, p = {p}"
        )));
    }
    let exponent = psi(alpha, p)?;
    Ok(((1.0 / delta).ln() / exponent).floor() as usize + 1)
}

/// Concentration parameters for one boost call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    /// Number of blocks.
    pub k: usize,
    /// Confidence split point, `α ∈ (0, ½)`.
    pub alpha: f64,
    /// Per-block weak-concentration level, `p ∈ (0, α)`.
    pub p: f64,
    /// Target failure probability, `δ ∈ (0, 1)`.
    pub delta: f64,
    /// Assign the `n mod k` leftover points to the final block instead of
    /// dropping them. Off by default: blocks hold exactly `⌊n/k⌋` points.
    pub include_remainder: bool,
    /// Shuffle the data (seeded) before blocking; off by default since
    /// i.i.d. data needs no shuffle.
    pub shuffle_data: bool,
}

impl BoostConfig {
    pub fn new(k: usize, alpha: f64, p: f64, delta: f64) -> Result<Self> {
        let cfg = Self {
            k,
            alpha,
            p,
            delta,
            include_remainder: false,
            shuffle_data: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Preset (α, p) = (7/18, 1/10) used for mean-type estimators.
    pub fn mean_preset(k: usize) -> Self {
        Self::new(k, 7.0 / 18.0, 0.1, 0.05).expect("preset parameters are valid")
    }

    /// Preset (α, p) = (0.4, 0.1) used for covariance estimators.
    pub fn covariance_preset(k: usize) -> Self {
        Self::new(k, 0.4, 0.1, 0.05).expect("preset parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("block count k must be at least 1"));
        }
        if !(0.0 < self.p && self.p < self.alpha && self.alpha < 0.5) {
            return Err(Error::invalid(format!(
                "need 0 < p < alpha < 0.5, got alpha = {}, p = {}",
                self.alpha, self.p
            )));
        }
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn constants(&self) -> ConcentrationConstants {
        ConcentrationConstants::new(self.alpha, self.p).expect("validated parameters")
    }
}

/// Splits `0..n` into `k` disjoint contiguous ranges of `⌊n/k⌋` indices
/// each; the trailing `n mod k` indices are left out.
pub fn split_blocks(n: usize, k: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if k == 0 {
        return Err(Error::invalid("block count k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!(
            "cannot split n = {n} points into k = {k} blocks"
        )));
    }
    let len = n / k;
    Ok((0..k).map(|j| j * len..(j + 1) * len).collect())
}

/// Inflated radius and failure probability from one application of the
/// boosting bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `C_α ε` for κ ≤ 0, `(π/2) C_α ε` for κ > 0.
    pub radius: f64,
    /// `exp(−k ψ(α, p))`, divided by `1 − p^k` in the conditional form.
    pub failure_probability: f64,
}

/// Evaluates the boosting bound for a block tolerance `epsilon`.
///
/// For κ > 0 the tolerance must satisfy `ε < D_κ/(π C_α)`; beyond it the
/// bound does not apply and the call is rejected.
pub fn theoretical_bound(
    config: &BoostConfig,
    epsilon: f64,
    curvature: &CurvatureBound,
    conditional: bool,
) -> Result<BoundReport> {
    config.validate()?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon must be a positive real"));
    }
    let constants = config.constants();
    let radius = if let Some(diameter) = curvature.diameter_bound {
        let cutoff = diameter / (PI * constants.c_alpha);
        if epsilon >= cutoff {
            return Err(Error::invalid(format!(
                "epsilon = {epsilon} must be below D_kappa/(pi C_alpha) = {cutoff}"
            )));
        }
        0.5 * PI * constants.c_alpha * epsilon
    } else {
        constants.c_alpha * epsilon
    };
    let mut failure_probability = (-(config.k as f64) * constants.psi).exp();
    if conditional {
        failure_probability /= 1.0 - config.p.powi(config.k as i32);
    }
    Ok(BoundReport {
        radius,
        failure_probability: failure_probability.min(1.0),
    })
}

/// Radius `11 √(σ² log(1.4/δ) / n)` of the boosted Fréchet-mean bound.
pub fn fmom_radius(sigma2: f64, n: usize, delta: f64) -> Result<f64> {
    if !(sigma2 > 0.0) || n == 0 || !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid(
            "fmom_radius needs sigma2 > 0, n >= 1 and delta in (0, 1)",
        ));
    }
    Ok(11.0 * (sigma2 * (1.4 / delta).ln() / n as f64).sqrt())
}

/// Outcome of a boost call: the boosted estimate plus the per-block
/// estimates and solver diagnostics the harness records.
#[derive(Debug, Clone)]
pub struct BoostOutput {
    pub estimate: SpacePoint,
    pub block_estimates: Vec<SpacePoint>,
    /// Median solver diagnostics; `None` when `k = 1` (no median taken).
    pub median_solver: Option<SolverOutput>,
    /// For κ > 0 spaces: whether every block estimate lay strictly inside
    /// the ball of radius `D_κ/2` about the boosted estimate. `None` on
    /// nonpositively curved spaces where the condition is vacuous.
    pub support_radius_ok: Option<bool>,
}

/// Runs the base estimator on each of `k` disjoint blocks and returns the
/// Fréchet median of the block estimates.
///
/// With `k = 1` the single block estimate is returned unchanged. Per-block
/// seeds are derived as `seed ⊕ block index`, so results do not depend on
/// how block work is scheduled.
pub fn boost<T, F>(
    space: &Space,
    data: &[T],
    base_estimator: F,
    config: &BoostConfig,
    settings: &SolverSettings,
    seed: u64,
) -> Result<BoostOutput>
where
    T: Clone,
    F: Fn(&[T], u64) -> Result<SpacePoint>,
{
    config.validate()?;
    settings.validate()?;
    let n = data.len();
    let blocks = split_blocks(n, config.k)?;

    let shuffled;
    let working: &[T] = if config.shuffle_data {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5b5a_d312_9c3f_41e7);
        let mut v = data.to_vec();
        v.shuffle(&mut rng);
        shuffled = v;
        &shuffled
    } else {
        data
    };

    let mut block_estimates = Vec::with_capacity(config.k);
    for (j, range) in blocks.iter().enumerate() {
        let mut range = range.clone();
        if config.include_remainder && j + 1 == config.k {
            range.end = n;
        }
        let block_seed = seed ^ j as u64;
        let estimate = base_estimator(&working[range], block_seed).map_err(|e| {
            Error::BlockEstimator {
                block: j,
                source: Box::new(e),
            }
        })?;
        block_estimates.push(estimate);
    }

    if config.k == 1 {
        return Ok(BoostOutput {
            estimate: block_estimates[0].clone(),
            block_estimates,
            median_solver: None,
            support_radius_ok: None,
        });
    }

    let sample = WeightedSample::uniform(block_estimates.clone())?;
    let curvature = space.curvature();
    let solver = if curvature.is_nonpositive() {
        cyclic_proximal_median(space, &sample, settings, seed)?
    } else {
        match space {
            Space::Sphere => {
                let pts: Vec<_> = block_estimates
                    .iter()
                    .map(|p| match p {
                        SpacePoint::Sphere(s) => Ok(*s),
                        other => Err(Error::PointSpaceMismatch {
                            space: space.name(),
                            point: other.kind(),
                        }),
                    })
                    .collect::<Result<_>>()?;
                frechet_median_sphere(&pts, settings)?
            }
            // Geodesics of the floor-restricted Bures-Wasserstein region
            // are unique in the cone, so the proximal median applies; the
            // support-radius condition is reported below.
            Space::SpdBuresWasserstein { .. } => {
                cyclic_proximal_median(space, &sample, settings, seed)?
            }
            other => {
                return Err(Error::UnsupportedSpace(format!(
                    "no Frechet median routine for positively curved space {}",
                    other.name()
                )))
            }
        }
    };

    let support_radius_ok = if curvature.is_nonpositive() {
        None
    } else {
        Some(space.validate_support_radius(&block_estimates, &solver.point)?)
    };
    if matches!(space, Space::Sphere) && support_radius_ok == Some(false) {
        return Err(Error::invalid(
            "block estimates violate the D_kappa/2 support ball around the median",
        ));
    }

    Ok(BoostOutput {
        estimate: solver.point.clone(),
        block_estimates,
        median_solver: Some(solver),
        support_radius_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn ev(v: f64) -> SpacePoint {
        SpacePoint::Euclidean(DVector::from_row_slice(&[v]))
    }

    // frozen by high-precision evaluation of the closed forms
    const PSI_MEAN: f64 = 0.291588262512928542;
    const PSI_COV: f64 = 0.311238679583057618;
    const C_ALPHA_MEAN: f64 = 1.296362432175337128;
    const C_ALPHA_COV: f64 = 1.341640786499873818;

    #[test]
    fn psi_matches_oracle_values() {
        assert_eq!(psi(0.3, 0.3).unwrap(), 0.0);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(psi(7.0 / 18.0, 0.1).unwrap(), PSI_MEAN) < 1e-12);
        assert!(rel(psi(0.4, 0.1).unwrap(), PSI_COV) < 1e-12);
        assert!(psi(0.6, 0.7).is_err());
        assert!(psi(0.4, 0.0).is_err());
    }

    #[test]
    fn c_alpha_matches_oracle_values() {
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(c_alpha(7.0 / 18.0).unwrap(), C_ALPHA_MEAN) < 1e-12);
        assert!(rel(c_alpha(0.4).unwrap(), C_ALPHA_COV) < 1e-12);
        assert!(c_alpha(0.5).is_err());
        assert!(c_alpha(0.0).is_err());
        // decreases toward 1 as alpha -> 0+
        let mut prev = c_alpha(0.49).unwrap();
        for i in (1..49).rev() {
            let a = i as f64 / 100.0;
            let v = c_alpha(a).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(prev > 1.0);
    }

    #[test]
    fn psi_positive_and_decreasing_in_p() {
        for &alpha in &[0.1, 0.25, 7.0 / 18.0, 0.45] {
            let mut prev = f64::INFINITY;
            for i in 1..40 {
                let p = alpha * i as f64 / 40.0;
                let v = psi(alpha, p).unwrap();
                assert!(v > 0.0);
                assert!(v < prev + 1e-12, "psi must decrease in p");
                prev = v;
            }
        }
    }

    #[test]
    fn block_count_selector() {
        assert_eq!(select_block_count(1.0, 7.0 / 18.0, 0.1).unwrap(), 1);
        assert_eq!(select_block_count(0.05, 7.0 / 18.0, 0.1).unwrap(), 11);
        assert_eq!(select_block_count(0.05, 0.4, 0.1).unwrap(), 10);
        assert!(select_block_count(0.0, 0.4, 0.1).is_err());
        assert!(select_block_count(0.05, 0.1, 0.4).is_err());
    }

    #[test]
    fn block_count_drives_failure_probability_below_delta() {
        for &delta in &[0.2, 0.05, 0.01, 1e-4] {
            for &(alpha, p) in &[(7.0 / 18.0, 0.1), (0.4, 0.1), (0.3, 0.05)] {
                let k = select_block_count(delta, alpha, p).unwrap();
                let bound = (-(k as f64) * psi(alpha, p).unwrap()).exp();
                assert!(bound <= delta * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn split_blocks_examples() {
        let b = split_blocks(100, 10).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b.iter().all(|r| r.len() == 10));
        assert_eq!(b[0], 0..10);
        assert_eq!(b[9], 90..100);

        let b = split_blocks(7, 3).unwrap();
        assert!(b.iter().all(|r| r.len() == 2));
        assert_eq!(b[2].end, 6); // index 6 unused

        let b = split_blocks(5, 5).unwrap();
        assert!(b.iter().all(|r| r.len() == 1));

        assert!(split_blocks(3, 4).is_err());
    }

    #[test]
    fn boost_k1_is_the_base_estimator() {
        let space = Space::euclidean(1).unwrap();
        let data: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let base = |block: &[f64], _seed: u64| {
            Ok(ev(block.iter().sum::<f64>() / block.len() as f64))
        };
        let cfg = BoostConfig::new(1, 7.0 / 18.0, 0.1, 0.05).unwrap();
        let out = boost(&space, &data, base, &cfg, &SolverSettings::default(), 42).unwrap();
        let direct = base(&data, 42).unwrap();
        assert_eq!(out.estimate, direct);
        assert!(out.median_solver.is_none());
    }

    #[test]
    fn boost_identical_estimates_return_that_point() {
        let space = Space::euclidean(1).unwrap();
        let data = vec![0.0; 30];
        let base = |_block: &[f64], _seed: u64| Ok(ev(2.5));
        let cfg = BoostConfig::mean_preset(5);
        let out = boost(&space, &data, base, &cfg, &SolverSettings::default(), 7).unwrap();
        let SpacePoint::Euclidean(v) = &out.estimate else { panic!() };
        assert!((v[0] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn boost_discards_one_contaminated_block() {
        // 10 blocks of 10: nine blocks of zeros, one block of huge values
        let space = Space::euclidean(1).unwrap();
        let mut data = vec![0.0_f64; 90];
        data.extend(std::iter::repeat(1e6).take(10));
        let base = |block: &[f64], _seed: u64| {
            Ok(ev(block.iter().sum::<f64>() / block.len() as f64))
        };
        let cfg = BoostConfig::mean_preset(10);
        let out = boost(&space, &data, base, &cfg, &SolverSettings::default(), 3).unwrap();
        let SpacePoint::Euclidean(v) = &out.estimate else { panic!() };
        assert!(v[0].abs() < 1e-3, "boosted estimate {} should be near 0", v[0]);
        // while the pooled mean is far away
        let pooled: f64 = data.iter().sum::<f64>() / data.len() as f64;
        assert!(pooled > 1e4);
    }

    #[test]
    fn boost_propagates_block_failures_with_index() {
        let space = Space::euclidean(1).unwrap();
        let data: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let base = |block: &[f64], _seed: u64| {
            if block[0] >= 20.0 {
                Err(Error::invalid("broken block"))
            } else {
                Ok(ev(0.0))
            }
        };
        let cfg = BoostConfig::mean_preset(4);
        let err = boost(&space, &data, base, &cfg, &SolverSettings::default(), 0).unwrap_err();
        match err {
            Error::BlockEstimator { block, .. } => assert_eq!(block, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn theoretical_bound_flat_and_curved() {
        let cfg = BoostConfig::new(11, 7.0 / 18.0, 0.1, 0.05).unwrap();
        let flat = CurvatureBound::nonpositive(0.0).unwrap();
        let report = theoretical_bound(&cfg, 1.0, &flat, false).unwrap();
        assert!((report.radius - C_ALPHA_MEAN).abs() < 1e-12);
        let expected = (-11.0 * PSI_MEAN).exp();
        assert!((report.failure_probability - expected).abs() <= 1e-12 * expected);
        assert!(report.failure_probability <= 0.05);

        // kappa = 1: D = pi, cutoff = 1/C_alpha ~ 0.7714
        let curved = CurvatureBound::positive(1.0).unwrap();
        assert!(theoretical_bound(&cfg, 1.0, &curved, false).is_err());
        let ok = theoretical_bound(&cfg, 0.5, &curved, false).unwrap();
        assert!((ok.radius - 0.5 * PI * C_ALPHA_MEAN * 0.5).abs() < 1e-12);

        // conditional variant divides by 1 - p^k
        let cond = theoretical_bound(&cfg, 1.0, &flat, true).unwrap();
        let plain = theoretical_bound(&cfg, 1.0, &flat, false).unwrap();
        let scale = 1.0 - 0.1_f64.powi(11);
        assert!((cond.failure_probability - plain.failure_probability / scale).abs() < 1e-15);
    }

    #[test]
    fn fmom_radius_examples() {
        // algebraic identity: sigma2 = 1, n = 121 log(1.4/delta) gives radius 1
        let delta = 0.05_f64;
        let n = (121.0 * (1.4 / delta).ln()).round() as usize;
        let r = fmom_radius(1.0, n, delta).unwrap();
        assert!((r - 1.0).abs() < 2e-3); // n rounded to an integer
        let r100 = fmom_radius(1.0, 100, 0.05).unwrap();
        assert!((r100 - 2.0079759603421543).abs() < 1e-12);
        // monotone decreasing in n
        let mut prev = f64::INFINITY;
        for n in [10, 30, 100, 300, 1000, 10_000] {
            let v = fmom_radius(1.0, n, 0.05).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }
}
