//! Monte Carlo experiment runner: declarative configs, seeded parallel
//! replication, summary statistics (mean squared error and 95% percentile
//! intervals), and CSV emission.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DVector;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::sample_covariance;
use crate::error::{Error, Result};
use crate::fmoe::{boost, BoostConfig};
use crate::geometry::{Space, SpacePoint};
use crate::sampling::{
    generate_spd_with_spectrum, sample_disk_mixture, sample_multivariate_t, sample_spider_mixture,
    RngStream, SpiderMixtureParams,
};
use crate::solvers::{empirical_frechet_mean, inductive_mean, SolverSettings, WeightedSample};
use crate::spaces::spd::{sym_eigen, SpdMatrix};
use crate::spaces::{DiskPoint, SpiderPoint};

/// The benchmark experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spider5,
    Poincare,
    CovAi,
    CovBw,
    EuclideanDemo,
}

impl Experiment {
    pub fn label(&self) -> &'static str {
        match self {
            Experiment::Spider5 => "spider5",
            Experiment::Poincare => "poincare",
            Experiment::CovAi => "cov_ai",
            Experiment::CovBw => "cov_bw",
            Experiment::EuclideanDemo => "euclidean_demo",
        }
    }

    fn is_covariance(&self) -> bool {
        matches!(self, Experiment::CovAi | Experiment::CovBw)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spider5" => Ok(Experiment::Spider5),
            "poincare" => Ok(Experiment::Poincare),
            "cov_ai" => Ok(Experiment::CovAi),
            "cov_bw" => Ok(Experiment::CovBw),
            "euclidean_demo" => Ok(Experiment::EuclideanDemo),
            other => Err(Error::Config(format!(
                "unknown experiment '{other}' (expected spider5, poincare, cov_ai, cov_bw or euclidean_demo)"
            ))),
        }
    }
}

/// Pooled comparator and per-block estimator for the point experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BaseEstimatorKind {
    #[default]
    InductiveMean,
    EmpiricalFrechetMean,
}

/// A fully resolved experiment campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub k: usize,
    pub sims: usize,
    pub alpha_outlier: Option<f64>,
    pub nu: Option<f64>,
    pub dimension: Option<usize>,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub base_estimator: BaseEstimatorKind,
}

impl ExperimentConfig {
    /// Campaign defaults for each experiment (sample sizes, block counts
    /// and population parameters used by the benchmark tables).
    pub fn defaults(experiment: Experiment) -> Self {
        let base = Self {
            experiment,
            n: 100,
            k: 10,
            sims: 1000,
            alpha_outlier: None,
            nu: None,
            dimension: None,
            master_seed: 42,
            output_path: None,
            base_estimator: BaseEstimatorKind::InductiveMean,
        };
        match experiment {
            Experiment::Spider5 => Self {
                alpha_outlier: Some(0.1),
                ..base
            },
            Experiment::Poincare => Self {
                k: 50,
                sims: 100,
                alpha_outlier: Some(0.1),
                ..base
            },
            Experiment::CovAi | Experiment::CovBw => Self {
                n: 100_000,
                k: 5,
                nu: Some(2.5),
                dimension: Some(10),
                ..base
            },
            Experiment::EuclideanDemo => Self {
                nu: Some(2.5),
                dimension: Some(1),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.sims == 0 || self.k == 0 {
            return Err(Error::Config(
                "n, k and sims must all be at least 1".into(),
            ));
        }
        if self.k > self.n {
            return Err(Error::Config(format!(
                "block count k = {} exceeds sample size n = {}",
                self.k, self.n
            )));
        }
        match self.experiment {
            Experiment::Spider5 | Experiment::Poincare => {
                let alpha = self.alpha_outlier.ok_or_else(|| {
                    Error::Config("alpha_outlier is required for this experiment".into())
                })?;
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::Config(format!(
                        "alpha_outlier must lie in [0, 1], got {alpha}"
                    )));
                }
            }
            Experiment::CovAi | Experiment::CovBw | Experiment::EuclideanDemo => {
                let nu = self
                    .nu
                    .ok_or_else(|| Error::Config("nu is required for this experiment".into()))?;
                if !(nu > 2.0) {
                    return Err(Error::Config(format!("nu must exceed 2, got {nu}")));
                }
                let d = self.dimension.ok_or_else(|| {
                    Error::Config("dimension is required for this experiment".into())
                })?;
                if d == 0 {
                    return Err(Error::Config("dimension must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Optional fields collected from a JSON config file or CLI flags; later
/// overlays win field-by-field.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverlay {
    pub schema: Option<u32>,
    pub experiment: Option<Experiment>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub sims: Option<usize>,
    pub alpha_outlier: Option<f64>,
    pub nu: Option<f64>,
    pub dimension: Option<usize>,
    pub master_seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub base_estimator: Option<BaseEstimatorKind>,
}

impl ConfigOverlay {
    /// Parses the JSON config format. Unknown keys are rejected, and the
    /// file must declare `"schema": 1`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let overlay: ConfigOverlay =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config JSON: {e}")))?;
        match overlay.schema {
            Some(1) => Ok(overlay),
            Some(v) => Err(Error::Config(format!(
                "unsupported config schema {v}, expected 1"
            ))),
            None => Err(Error::Config("config file must declare \"schema\": 1".into())),
        }
    }

    /// Applies `self` on top of `base`: fields set here win.
    pub fn merged_over(self, base: ConfigOverlay) -> ConfigOverlay {
        ConfigOverlay {
            schema: self.schema.or(base.schema),
            experiment: self.experiment.or(base.experiment),
            n: self.n.or(base.n),
            k: self.k.or(base.k),
            sims: self.sims.or(base.sims),
            alpha_outlier: self.alpha_outlier.or(base.alpha_outlier),
            nu: self.nu.or(base.nu),
            dimension: self.dimension.or(base.dimension),
            master_seed: self.master_seed.or(base.master_seed),
            output_path: self.output_path.or(base.output_path),
            base_estimator: self.base_estimator.or(base.base_estimator),
        }
    }

    /// Fills unset fields from the experiment defaults and validates.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let experiment = self
            .experiment
            .ok_or_else(|| Error::Config("an experiment must be selected".into()))?;
        let defaults = ExperimentConfig::defaults(experiment);
        // the covariance default n tracks the resolved dimension (n = 10 d^4)
        let dimension = self.dimension.or(defaults.dimension);
        let default_n = if experiment.is_covariance() {
            dimension.map_or(defaults.n, |d| 10 * d.pow(4))
        } else {
            defaults.n
        };
        let cfg = ExperimentConfig {
            experiment,
            n: self.n.unwrap_or(default_n),
            k: self.k.unwrap_or(defaults.k),
            sims: self.sims.unwrap_or(defaults.sims),
            alpha_outlier: self.alpha_outlier.or(defaults.alpha_outlier),
            nu: self.nu.or(defaults.nu),
            dimension,
            master_seed: self.master_seed.unwrap_or(defaults.master_seed),
            output_path: self.output_path.clone().or(defaults.output_path),
            base_estimator: self.base_estimator.unwrap_or(defaults.base_estimator),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Per-replication diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiagnosticFlags {
    /// The median solver hit `max_iterations` without meeting the
    /// displacement tolerance.
    pub solver_nonconverged: bool,
    /// Some block estimate (or the boosted estimate) fell below the
    /// declared eigenvalue floor λ₀.
    pub floor_violation: bool,
    /// On a positively curved space, some block estimate left the open
    /// ball of radius D_κ/2 around the boosted estimate.
    pub support_violation: bool,
    /// The replication failed outright; its errors are NaN and it is
    /// excluded from the summary statistics.
    pub failed: bool,
}

impl DiagnosticFlags {
    pub fn render(&self) -> String {
        let mut tokens = Vec::new();
        if self.solver_nonconverged {
            tokens.push("nonconverged");
        }
        if self.floor_violation {
            tokens.push("floor");
        }
        if self.support_violation {
            tokens.push("support");
        }
        if self.failed {
            tokens.push("failed");
        }
        tokens.join("|")
    }
}

/// Distances to the population target for one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub replication_id: usize,
    /// `d(θ̂, θ)` for the pooled base estimator on all n points.
    pub base_error: f64,
    /// `d(θ̂_FMoE, θ)` for the boosted estimator.
    pub fmoe_error: f64,
    pub flags: DiagnosticFlags,
}

/// Campaign summary: mean squared errors and 95% percentile intervals of
/// the unsquared errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mse_base: f64,
    pub mse_fmoe: f64,
    pub ci_base: (f64, f64),
    pub ci_fmoe: (f64, f64),
    pub sims: usize,
    pub floor_violation_rate: f64,
}

/// Linear-interpolation quantile (the R-7 convention) of pre-sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
}

/// Aggregates replication results. Failed replications are excluded from
/// the error statistics; the floor-violation rate counts all replications.
pub fn summarize(results: &[ReplicationResult]) -> Result<SummaryStats> {
    if results.is_empty() {
        return Err(Error::invalid("summarize needs at least one replication"));
    }
    let ok: Vec<&ReplicationResult> = results.iter().filter(|r| !r.flags.failed).collect();
    if ok.is_empty() {
        return Err(Error::invalid("every replication failed"));
    }
    let m = ok.len() as f64;
    let mut base: Vec<f64> = ok.iter().map(|r| r.base_error).collect();
    let mut fmoe: Vec<f64> = ok.iter().map(|r| r.fmoe_error).collect();
    base.sort_by(|a, b| a.total_cmp(b));
    fmoe.sort_by(|a, b| a.total_cmp(b));
    // summing in sorted order makes the result permutation-invariant
    let mse_base = base.iter().map(|e| e * e).sum::<f64>() / m;
    let mse_fmoe = fmoe.iter().map(|e| e * e).sum::<f64>() / m;
    let floor_violation_rate = results.iter().filter(|r| r.flags.floor_violation).count() as f64
        / results.len() as f64;
    Ok(SummaryStats {
        mse_base,
        mse_fmoe,
        ci_base: (quantile_sorted(&base, 0.025), quantile_sorted(&base, 0.975)),
        ci_fmoe: (quantile_sorted(&fmoe, 0.025), quantile_sorted(&fmoe, 0.975)),
        sims: results.len(),
        floor_violation_rate,
    })
}

/// Runs a campaign and returns the summary plus per-replication records,
/// ordered by replication id.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(SummaryStats, Vec<ReplicationResult>)> {
    run_experiment_with_progress(config, None)
}

/// As `run_experiment`; `progress(done, total)` fires after each
/// completed replication (from worker threads).
pub fn run_experiment_with_progress(
    config: &ExperimentConfig,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<(SummaryStats, Vec<ReplicationResult>)> {
    config.validate()?;
    let results = match config.experiment {
        Experiment::Spider5 => {
            let alpha = config.alpha_outlier.expect("validated");
            let params = SpiderMixtureParams::new(5, alpha, 1.0, 100.0, 1.0)?;
            run_point_campaign(
                config,
                Space::spider(5)?,
                SpacePoint::Spider(SpiderPoint::center()),
                move |rng| SpacePoint::Spider(sample_spider_mixture(&params, rng)),
                progress,
            )?
        }
        Experiment::Poincare => {
            let alpha = config.alpha_outlier.expect("validated");
            run_point_campaign(
                config,
                Space::poincare_disk(),
                SpacePoint::Disk(DiskPoint::origin()),
                move |rng| SpacePoint::Disk(sample_disk_mixture(alpha, 0.2, rng)),
                progress,
            )?
        }
        Experiment::EuclideanDemo => {
            let nu = config.nu.expect("validated");
            let d = config.dimension.expect("validated");
            let normal = Normal::new(0.0, 1.0).expect("unit normal");
            let chi2 =
                ChiSquared::new(nu).map_err(|e| Error::Config(format!("chi-squared: {e}")))?;
            run_point_campaign(
                config,
                Space::euclidean(d)?,
                SpacePoint::Euclidean(DVector::zeros(d)),
                move |rng| {
                    let z = DVector::from_fn(d, |_, _| normal.sample(rng));
                    let w: f64 = chi2.sample(rng);
                    SpacePoint::Euclidean(z * (nu / w).sqrt())
                },
                progress,
            )?
        }
        Experiment::CovAi | Experiment::CovBw => run_covariance_campaign(config, progress)?,
    };
    let stats = summarize(&results)?;
    Ok((stats, results))
}

/// Deterministic per-replication auxiliary seed (solver shuffles, block
/// seeds); splitmix-style mixing of the master seed and replication id.
fn mix_seed(seed: u64, r: u64) -> u64 {
    let mut z = seed ^ r
        .wrapping_add(1)
        .wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn run_point_campaign(
    config: &ExperimentConfig,
    space: Space,
    target: SpacePoint,
    sampler: impl Fn(&mut ChaCha8Rng) -> SpacePoint + Sync,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<Vec<ReplicationResult>> {
    let settings = SolverSettings::default();
    let boost_cfg = BoostConfig::mean_preset(config.k);
    let kind = config.base_estimator;
    let done = std::sync::atomic::AtomicUsize::new(0);

    let estimate_block = move |space: &Space, block: &[SpacePoint], seed: u64| -> Result<SpacePoint> {
        match kind {
            BaseEstimatorKind::InductiveMean => inductive_mean(space, block),
            BaseEstimatorKind::EmpiricalFrechetMean => {
                let sample = WeightedSample::uniform(block.to_vec())?;
                Ok(empirical_frechet_mean(space, &sample, &settings, seed)?.point)
            }
        }
    };

    let results: Vec<ReplicationResult> = (0..config.sims)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(config.master_seed, r as u64 + 1).rng();
            let data: Vec<SpacePoint> = (0..config.n).map(|_| sampler(&mut rng)).collect();
            let aux_seed = mix_seed(config.master_seed, r as u64);
            let outcome = (|| -> Result<(f64, f64, DiagnosticFlags)> {
                let pooled = estimate_block(&space, &data, aux_seed)?;
                let out = boost(
                    &space,
                    &data,
                    |block, seed| estimate_block(&space, block, seed),
                    &boost_cfg,
                    &settings,
                    aux_seed,
                )?;
                let flags = DiagnosticFlags {
                    solver_nonconverged: out
                        .median_solver
                        .as_ref()
                        .map_or(false, |s| !s.converged),
                    support_violation: out.support_radius_ok == Some(false),
                    ..DiagnosticFlags::default()
                };
                Ok((
                    space.distance(&pooled, &target)?,
                    space.distance(&out.estimate, &target)?,
                    flags,
                ))
            })();
            if let Some(cb) = progress {
                cb(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1, config.sims);
            }
            match outcome {
                Ok((base_error, fmoe_error, flags)) => ReplicationResult {
                    replication_id: r,
                    base_error,
                    fmoe_error,
                    flags,
                },
                Err(_) => ReplicationResult {
                    replication_id: r,
                    base_error: f64::NAN,
                    fmoe_error: f64::NAN,
                    flags: DiagnosticFlags {
                        failed: true,
                        ..DiagnosticFlags::default()
                    },
                },
            }
        })
        .collect();
    Ok(results)
}

fn run_covariance_campaign(
    config: &ExperimentConfig,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<Vec<ReplicationResult>> {
    let d = config.dimension.expect("validated");
    let nu = config.nu.expect("validated");
    let spectrum: Vec<f64> = (1..=d).map(|j| j as f64).collect();
    // one population Sigma per campaign, from the dedicated stream 0
    let mut campaign_rng = RngStream::new(config.master_seed, 0).rng();
    let sigma = generate_spd_with_spectrum(&spectrum, &mut campaign_rng)?;
    let scale = nu / (nu - 2.0);
    let target_matrix = sigma.matrix() * scale;
    let target = SpacePoint::Spd(SpdMatrix::new(target_matrix.clone())?);
    let lambda0 = sym_eigen(&target_matrix).values[0] / 2.0;
    let (space, check_floor) = match config.experiment {
        Experiment::CovAi => (Space::spd_affine_invariant(d)?, false),
        Experiment::CovBw => (Space::spd_bures_wasserstein(d, lambda0)?, true),
        _ => unreachable!("covariance campaign on a point experiment"),
    };
    let settings = SolverSettings::default();
    let boost_cfg = BoostConfig::covariance_preset(config.k);
    let done = std::sync::atomic::AtomicUsize::new(0);

    let results: Vec<ReplicationResult> = (0..config.sims)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(config.master_seed, r as u64 + 1).rng();
            let aux_seed = mix_seed(config.master_seed, r as u64);
            let outcome = (|| -> Result<(f64, f64, DiagnosticFlags)> {
                let data = sample_multivariate_t(nu, &sigma, config.n, &mut rng)?;
                let pooled = SpacePoint::Spd(sample_covariance(&data)?.into_spd()?);
                let out = boost(
                    &space,
                    &data,
                    |block, _seed| Ok(SpacePoint::Spd(sample_covariance(block)?.into_spd()?)),
                    &boost_cfg,
                    &settings,
                    aux_seed,
                )?;
                let mut flags = DiagnosticFlags {
                    solver_nonconverged: out
                        .median_solver
                        .as_ref()
                        .map_or(false, |s| !s.converged),
                    support_violation: out.support_radius_ok == Some(false),
                    ..DiagnosticFlags::default()
                };
                if check_floor {
                    let below_floor = |p: &SpacePoint| {
                        p.as_spd().map_or(true, |m| m.lambda_min() < lambda0)
                    };
                    flags.floor_violation =
                        out.block_estimates.iter().any(below_floor) || below_floor(&out.estimate);
                }
                Ok((
                    space.distance(&pooled, &target)?,
                    space.distance(&out.estimate, &target)?,
                    flags,
                ))
            })();
            if let Some(cb) = progress {
                cb(done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1, config.sims);
            }
            match outcome {
                Ok((base_error, fmoe_error, flags)) => ReplicationResult {
                    replication_id: r,
                    base_error,
                    fmoe_error,
                    flags,
                },
                Err(_) => ReplicationResult {
                    replication_id: r,
                    base_error: f64::NAN,
                    fmoe_error: f64::NAN,
                    flags: DiagnosticFlags {
                        failed: true,
                        ..DiagnosticFlags::default()
                    },
                },
            }
        })
        .collect();
    Ok(results)
}

/// Renders a float with 17 significant digits, enough to round-trip f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the per-replication CSV to `path` and the one-row campaign
/// summary to `<path>.summary` (UTF-8, LF line endings).
pub fn emit_csv(
    config: &ExperimentConfig,
    stats: &SummaryStats,
    results: &[ReplicationResult],
    path: &Path,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut body = String::from("experiment,replication,base_error,fmoe_error,flags\n");
    for r in results {
        body.push_str(&format!(
            "{},{},{},{},{}\n",
            config.experiment.label(),
            r.replication_id,
            fmt_g17(r.base_error),
            fmt_g17(r.fmoe_error),
            r.flags.render()
        ));
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(body.as_bytes()).map_err(io_err)?;

    let summary_path = summary_path_for(path);
    let io_err_summary = |source| Error::Io {
        path: summary_path.clone(),
        source,
    };
    let header = "experiment,n,k,sims,mse_base,mse_fmoe,ci_base_lo,ci_base_hi,ci_fmoe_lo,ci_fmoe_hi,floor_violation_rate\n";
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        config.experiment.label(),
        config.n,
        config.k,
        stats.sims,
        fmt_g17(stats.mse_base),
        fmt_g17(stats.mse_fmoe),
        fmt_g17(stats.ci_base.0),
        fmt_g17(stats.ci_base.1),
        fmt_g17(stats.ci_fmoe.0),
        fmt_g17(stats.ci_fmoe.1),
        fmt_g17(stats.floor_violation_rate),
    );
    let mut file = std::fs::File::create(&summary_path).map_err(io_err_summary)?;
    file.write_all(header.as_bytes()).map_err(io_err_summary)?;
    file.write_all(row.as_bytes()).map_err(io_err_summary)?;
    Ok(())
}

/// `<path>.summary` next to the per-replication file.
pub fn summary_path_for(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".summary");
    PathBuf::from(s)
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub alpha_outlier: Option<f64>,
    pub nu: Option<f64>,
    pub k: usize,
    pub stats: SummaryStats,
}

/// Runs the cartesian product of the supplied parameter lists over the
/// base campaign. Empty lists fall back to the base value; `alpha_list`
/// applies to the point experiments and `nu_list` to the heavy-tailed
/// ones. Every cell reuses the base master seed, so the population (and
/// Σ, for covariance campaigns) is shared across cells.
pub fn run_sweep(
    base: &ExperimentConfig,
    k_list: &[usize],
    alpha_list: &[f64],
    nu_list: &[f64],
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<Vec<SweepCell>> {
    base.validate()?;
    let uses_alpha = matches!(base.experiment, Experiment::Spider5 | Experiment::Poincare);
    if uses_alpha && !nu_list.is_empty() {
        return Err(Error::Config(format!(
            "{} sweeps over alpha, not nu",
            base.experiment
        )));
    }
    if !uses_alpha && !alpha_list.is_empty() {
        return Err(Error::Config(format!(
            "{} sweeps over nu, not alpha",
            base.experiment
        )));
    }
    let ks: Vec<usize> = if k_list.is_empty() {
        vec![base.k]
    } else {
        k_list.to_vec()
    };
    let outer: Vec<(Option<f64>, Option<f64>)> = if uses_alpha {
        let alphas = if alpha_list.is_empty() {
            vec![base.alpha_outlier.expect("validated")]
        } else {
            alpha_list.to_vec()
        };
        alphas.into_iter().map(|a| (Some(a), base.nu)).collect()
    } else {
        let nus = if nu_list.is_empty() {
            vec![base.nu.expect("validated")]
        } else {
            nu_list.to_vec()
        };
        nus.into_iter().map(|v| (base.alpha_outlier, Some(v))).collect()
    };

    let mut cells = Vec::with_capacity(outer.len() * ks.len());
    for (alpha, nu) in &outer {
        for &k in &ks {
            let cfg = ExperimentConfig {
                k,
                alpha_outlier: *alpha,
                nu: *nu,
                output_path: None,
                ..base.clone()
            };
            let (stats, _) = run_experiment_with_progress(&cfg, progress)?;
            cells.push(SweepCell {
                alpha_outlier: if uses_alpha { *alpha } else { None },
                nu: if uses_alpha { None } else { *nu },
                k,
                stats,
            });
        }
    }
    Ok(cells)
}

/// Writes the sweep summary table (one row per cell).
pub fn emit_sweep_csv(base: &ExperimentConfig, cells: &[SweepCell], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut body = String::from(
        "experiment,alpha,nu,k,n,sims,mse_base,mse_fmoe,ci_base_lo,ci_base_hi,ci_fmoe_lo,ci_fmoe_hi,floor_violation_rate\n",
    );
    for cell in cells {
        body.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            base.experiment.label(),
            cell.alpha_outlier.map(fmt_g17).unwrap_or_default(),
            cell.nu.map(fmt_g17).unwrap_or_default(),
            cell.k,
            base.n,
            cell.stats.sims,
            fmt_g17(cell.stats.mse_base),
            fmt_g17(cell.stats.mse_fmoe),
            fmt_g17(cell.stats.ci_base.0),
            fmt_g17(cell.stats.ci_base.1),
            fmt_g17(cell.stats.ci_fmoe.0),
            fmt_g17(cell.stats.ci_fmoe.1),
            fmt_g17(cell.stats.floor_violation_rate),
        ));
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(body.as_bytes()).map_err(io_err)?;
    Ok(())
}
