//! `cyclodet` — calibrate thresholds, estimate ROC curves and Pd-vs-SNR
//! sweeps for the two-channel cyclostationary detection experiments, and
//! write plot-ready CSV/JSON tables.

mod output;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cyclodet::experiments::{NullModel, SweepOptions};
use cyclodet::{
    calibrate_threshold, calibrate_threshold_full, pd_vs_snr, roc_curve, single_trial,
    DetectorKind, ScenarioConfig,
};
use output::Format;

#[derive(Parser)]
#[command(
    name = "cyclodet",
    about = "Two-channel cyclostationary passive-detection experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate detection thresholds from null-hypothesis trials.
    Calibrate(CalibrateArgs),
    /// Per-trial statistics under both hypotheses and the empirical ROC.
    Roc(RocArgs),
    /// Detection probability versus SNR at a fixed false-alarm target.
    Sweep(SweepArgs),
    /// One synthesis trial with all detector statistics.
    SingleTrial(SingleTrialArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario configuration (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output artifact path.
    #[arg(long)]
    out: PathBuf,
    /// Artifact format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Master seed; falls back to CYCLODET_SEED, then the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Detectors to run (repeatable).
    #[arg(long = "detector", value_parser = parse_detector)]
    detectors: Vec<DetectorKind>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Null-hypothesis trials.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// False-alarm targets (repeatable).
    #[arg(long = "pfa", default_values_t = [0.1, 0.05, 0.01])]
    pfa_targets: Vec<f64>,
    /// Null model used for calibration.
    #[arg(long, value_enum, default_value_t = NullModelArg::White)]
    null_model: NullModelArg,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trials per hypothesis.
    #[arg(long, default_value_t = 2000)]
    trials: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trials per SNR point.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Calibration trials per threshold.
    #[arg(long, default_value_t = 10_000)]
    cal_trials: usize,
    /// False-alarm target.
    #[arg(long, default_value_t = 0.01)]
    pfa: f64,
    /// Grid start, dB (snr_s = snr_r).
    #[arg(long, default_value_t = -25.0, allow_hyphen_values = true)]
    snr_min: f64,
    /// Grid end, dB.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    snr_max: f64,
    /// Grid step, dB.
    #[arg(long, default_value_t = 5.0)]
    snr_step: f64,
    /// Null model used for calibration.
    #[arg(long, value_enum, default_value_t = NullModelArg::FullPipeline)]
    null_model: NullModelArg,
}

#[derive(Args)]
struct SingleTrialArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NullModelArg {
    White,
    FullPipeline,
}

impl From<NullModelArg> for NullModel {
    fn from(n: NullModelArg) -> NullModel {
        match n {
            NullModelArg::White => NullModel::WhiteGaussian,
            NullModelArg::FullPipeline => NullModel::FullPipeline,
        }
    }
}

fn parse_detector(s: &str) -> Result<DetectorKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Calibrate(args) => run_calibrate(args),
        Command::Roc(args) => run_roc(args),
        Command::Sweep(args) => run_sweep(args),
        Command::SingleTrial(args) => run_single_trial(args),
    }
}

/// Loads and validates the scenario, naming the offending file on failure.
fn load_config(path: &Option<PathBuf>) -> Result<ScenarioConfig> {
    let cfg = match path {
        None => ScenarioConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            parse_config(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a JSON scenario document; unknown keys and constraint violations
/// are errors with positional / named diagnostics.
fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_seed(flag: Option<u64>, cfg: &ScenarioConfig) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("CYCLODET_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .with_context(|| format!("CYCLODET_SEED='{text}' is not a u64")),
        Err(_) => Ok(cfg.seed),
    }
}

fn detectors_or_default(list: &[DetectorKind]) -> Vec<DetectorKind> {
    if list.is_empty() {
        DetectorKind::ALL.to_vec()
    } else {
        list.to_vec()
    }
}

/// Runs `f` on a dedicated pool when a worker count is given; results are
/// identical for any worker count.
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon_pool(workers)?;
    Ok(pool.install(f))
}

fn rayon_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .context("building worker pool")
}

fn run_calibrate(args: CalibrateArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = load_config(&args.common.config)?;
    let seed = resolve_seed(args.common.seed, &cfg)?;
    let detectors = detectors_or_default(&args.common.detectors);
    let dims = cfg.dims()?;
    let null_model: NullModel = args.null_model.into();

    let tables = with_workers(args.common.workers, || {
        detectors
            .iter()
            .map(|&d| match null_model {
                NullModel::WhiteGaussian => {
                    calibrate_threshold(d, &dims, &args.pfa_targets, args.trials, seed)
                }
                NullModel::FullPipeline => {
                    calibrate_threshold_full(d, &cfg, &args.pfa_targets, args.trials, seed)
                }
            })
            .collect::<cyclodet::Result<Vec<_>>>()
    })??;

    let bytes = output::render_calibrate(&tables, &cfg, seed, args.common.format.into())?;
    output::write_atomic(&args.common.out, &bytes)?;

    let minimum = args
        .pfa_targets
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let etas: Vec<String> = tables
        .iter()
        .map(|t| {
            format!(
                "{}:eta({minimum})={:.4}",
                t.detector,
                t.threshold_for(minimum).unwrap_or(f64::NAN)
            )
        })
        .collect();
    println!(
        "calibrate {} trials={} seed={} wall={:.1}s out={}",
        etas.join(" "),
        args.trials,
        seed,
        start.elapsed().as_secs_f64(),
        args.common.out.display()
    );
    Ok(())
}

fn run_roc(args: RocArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = load_config(&args.common.config)?;
    let seed = resolve_seed(args.common.seed, &cfg)?;
    let detectors = detectors_or_default(&args.common.detectors);

    let result = with_workers(args.common.workers, || {
        roc_curve(&cfg, &detectors, args.trials, seed)
    })??;

    let bytes = output::render_roc(&result, args.common.format.into())?;
    output::write_atomic(&args.common.out, &bytes)?;

    let summary: Vec<String> = result
        .pd_at_pfa
        .iter()
        .filter(|p| p.pfa == 0.1)
        .map(|p| format!("{}:pd(0.1)={:.3}", p.detector, p.pd))
        .collect();
    println!(
        "roc {} trials={} seed={} wall={:.1}s out={}",
        summary.join(" "),
        args.trials,
        seed,
        start.elapsed().as_secs_f64(),
        args.common.out.display()
    );
    Ok(())
}

fn run_sweep(args: SweepArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = load_config(&args.common.config)?;
    let seed = resolve_seed(args.common.seed, &cfg)?;
    let detectors = detectors_or_default(&args.common.detectors);

    if args.snr_step <= 0.0 {
        bail!("--snr-step must be positive");
    }
    if args.snr_max < args.snr_min {
        bail!("--snr-max must be >= --snr-min");
    }
    let mut grid = Vec::new();
    let mut v = args.snr_min;
    while v <= args.snr_max + 1e-9 {
        grid.push(v);
        v += args.snr_step;
    }

    let opts = SweepOptions {
        pfa: args.pfa,
        trials_per_point: args.trials,
        cal_trials: args.cal_trials,
        null_model: args.null_model.into(),
    };
    let result = with_workers(args.common.workers, || {
        pd_vs_snr(&cfg, &detectors, &grid, &opts, seed)
    })??;

    let bytes = output::render_sweep(&result, args.pfa, args.common.format.into())?;
    output::write_atomic(&args.common.out, &bytes)?;

    println!(
        "sweep points={} pfa={} trials_per_point={} seed={} wall={:.1}s out={}",
        grid.len(),
        args.pfa,
        args.trials,
        seed,
        start.elapsed().as_secs_f64(),
        args.common.out.display()
    );
    Ok(())
}

fn run_single_trial(args: SingleTrialArgs) -> Result<()> {
    let start = Instant::now();
    let cfg = load_config(&args.common.config)?;
    let seed = resolve_seed(args.common.seed, &cfg)?;
    let detectors = detectors_or_default(&args.common.detectors);

    let stats = with_workers(args.common.workers, || single_trial(&cfg, &detectors, seed))??;

    let mut rows = Vec::new();
    for s in &stats {
        rows.push(output::TrialRow {
            detector: s.detector,
            hypothesis: "h0",
            statistic: s.h0[0],
        });
        rows.push(output::TrialRow {
            detector: s.detector,
            hypothesis: "h1",
            statistic: s.h1[0],
        });
    }
    let bytes = output::render_single_trial(&rows, &cfg, seed, args.common.format.into())?;
    output::write_atomic(&args.common.out, &bytes)?;

    let summary: Vec<String> = stats
        .iter()
        .map(|s| format!("{}:h0={:.4},h1={:.4}", s.detector, s.h0[0], s.h1[0]))
        .collect();
    println!(
        "single-trial {} seed={} wall={:.1}s out={}",
        summary.join(" "),
        seed,
        start.elapsed().as_secs_f64(),
        args.common.out.display()
    );
    Ok(())
}
