//! Benchmark CLI: seeded Monte Carlo campaigns for Fréchet
//! median-of-estimators boosting, parameter sweeps, and the concentration
//! constants.
//!
//! Exit codes: 0 on success, 1 on configuration/usage errors, 2 on I/O
//! errors.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fmoe_core::error::Error;
use fmoe_core::fmoe::{c_alpha, psi, select_block_count};
use fmoe_core::harness::{
    emit_csv, emit_sweep_csv, fmt_g17, run_experiment_with_progress, run_sweep, BaseEstimatorKind,
    ConfigOverlay, Experiment, ExperimentConfig, SummaryStats,
};

#[derive(Parser)]
#[command(
    name = "fmoe",
    about = "Monte Carlo benchmarks for Fréchet median-of-estimators boosting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one campaign and write per-replication + summary CSVs
    Run(RunArgs),
    /// Run the cartesian product over --k-list and --alpha-list/--nu-list
    Sweep(SweepArgs),
    /// Print psi(alpha, p), C_alpha and the block-count selector
    Constants(ConstantsArgs),
}

#[derive(Args, Clone)]
struct CampaignArgs {
    /// spider5 | poincare | cov_ai | cov_bw | euclidean_demo
    #[arg(long)]
    experiment: Option<Experiment>,
    /// Sample size per replication
    #[arg(long)]
    n: Option<usize>,
    /// Number of blocks
    #[arg(long)]
    k: Option<usize>,
    /// Outlier fraction (spider5, poincare)
    #[arg(long)]
    alpha: Option<f64>,
    /// Degrees of freedom of the t population (cov_*, euclidean_demo)
    #[arg(long)]
    nu: Option<f64>,
    /// Matrix / vector dimension (cov_*, euclidean_demo)
    #[arg(long)]
    dim: Option<usize>,
    /// Number of Monte Carlo replications
    #[arg(long)]
    sims: Option<usize>,
    /// Master seed; replication r uses stream r+1, the campaign stream 0
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (default: <experiment>.csv)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the replication pool (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base estimator for the point experiments: inductive_mean |
    /// empirical_frechet_mean
    #[arg(long)]
    estimator: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Comma-separated block counts, e.g. --k-list 1,5,10,50
    #[arg(long = "k-list", value_delimiter = ',')]
    k_list: Vec<usize>,
    /// Comma-separated outlier fractions (spider5, poincare)
    #[arg(long = "alpha-list", value_delimiter = ',')]
    alpha_list: Vec<f64>,
    /// Comma-separated t degrees of freedom (cov_*, euclidean_demo)
    #[arg(long = "nu-list", value_delimiter = ',')]
    nu_list: Vec<f64>,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    delta: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Constants(args) => cmd_constants(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn build_config(args: &CampaignArgs) -> Result<ExperimentConfig, Error> {
    let base_estimator = match args.estimator.as_deref() {
        None => None,
        Some("inductive_mean") | Some("inductive") => Some(BaseEstimatorKind::InductiveMean),
        Some("empirical_frechet_mean") | Some("empirical") => {
            Some(BaseEstimatorKind::EmpiricalFrechetMean)
        }
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown estimator '{other}' (expected inductive_mean or empirical_frechet_mean)"
            )))
        }
    };
    let flags = ConfigOverlay {
        schema: None,
        experiment: args.experiment,
        n: args.n,
        k: args.k,
        sims: args.sims,
        alpha_outlier: args.alpha,
        nu: args.nu,
        dimension: args.dim,
        master_seed: args.seed,
        output_path: args.out.clone(),
        base_estimator,
    };
    let merged = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            flags.merged_over(ConfigOverlay::from_json_str(&text)?)
        }
        None => flags,
    };
    merged.resolve()
}

fn init_threads(threads: Option<usize>) -> Result<(), Error> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn progress_printer(enabled: bool) -> Option<Box<dyn Fn(usize, usize) + Sync>> {
    if !enabled {
        return None;
    }
    Some(Box::new(|done, total| {
        eprint!("\rreplication {done}/{total}");
        if done == total {
            eprintln!();
        }
        let _ = std::io::stderr().flush();
    }))
}

fn print_summary(cfg: &ExperimentConfig, stats: &SummaryStats) {
    println!("experiment = {}", cfg.experiment);
    println!(
        "n = {}, k = {}, sims = {}, seed = {}",
        cfg.n, cfg.k, stats.sims, cfg.master_seed
    );
    println!(
        "mse_base = {}  ci_base = [{}, {}]",
        fmt_g17(stats.mse_base),
        fmt_g17(stats.ci_base.0),
        fmt_g17(stats.ci_base.1)
    );
    println!(
        "mse_fmoe = {}  ci_fmoe = [{}, {}]",
        fmt_g17(stats.mse_fmoe),
        fmt_g17(stats.ci_fmoe.0),
        fmt_g17(stats.ci_fmoe.1)
    );
    println!(
        "floor_violation_rate = {}",
        fmt_g17(stats.floor_violation_rate)
    );
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let cfg = build_config(&args.campaign)?;
    init_threads(args.campaign.threads)?;
    let show_progress = std::io::stderr().is_terminal() && cfg.sims >= 20;
    let progress = progress_printer(show_progress);
    let (stats, results) =
        run_experiment_with_progress(&cfg, progress.as_deref())?;
    let out = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.experiment)));
    emit_csv(&cfg, &stats, &results, &out)?;
    print_summary(&cfg, &stats);
    println!(
        "wrote {} and {}",
        out.display(),
        fmoe_core::harness::summary_path_for(&out).display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Error> {
    let cfg = build_config(&args.campaign)?;
    init_threads(args.campaign.threads)?;
    let show_progress = std::io::stderr().is_terminal() && cfg.sims >= 20;
    let progress = progress_printer(show_progress);
    let cells = run_sweep(
        &cfg,
        &args.k_list,
        &args.alpha_list,
        &args.nu_list,
        progress.as_deref(),
    )?;
    let out = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}_sweep.csv", cfg.experiment)));
    emit_sweep_csv(&cfg, &cells, &out)?;
    println!("experiment = {}", cfg.experiment);
    for cell in &cells {
        let param = match (cell.alpha_outlier, cell.nu) {
            (Some(a), _) => format!("alpha = {a}"),
            (_, Some(v)) => format!("nu = {v}"),
            _ => String::new(),
        };
        println!(
            "{param}, k = {}: mse_base = {}, mse_fmoe = {}",
            cell.k,
            fmt_g17(cell.stats.mse_base),
            fmt_g17(cell.stats.mse_fmoe)
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_constants(args: ConstantsArgs) -> Result<(), Error> {
    let psi_value = psi(args.alpha, args.p)?;
    let c_value = c_alpha(args.alpha)?;
    let k = select_block_count(args.delta, args.alpha, args.p)?;
    println!("alpha = {}", fmt_g17(args.alpha));
    println!("p = {}", fmt_g17(args.p));
    println!("delta = {}", fmt_g17(args.delta));
    println!("psi(alpha, p) = {}", fmt_g17(psi_value));
    println!("C_alpha = {}", fmt_g17(c_value));
    println!("k = {k}");
    Ok(())
}
