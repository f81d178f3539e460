//! Command-line front end: `sample`, `estimate`, `select`, `bounds`, `table` and `rate-study`.
//!
//! Process and experiment settings come from an optional TOML file whose keys mirror the
//! field names; command-line flags override the file.  Every file written gets a
//! `<path>.json` sidecar with the resolved settings.  Exit codes: 0 on success, 2 for invalid
//! input, 3 for numerical failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::estimators::{
    benchmark_density, benchmark_density_auto, default_x_grid, optimal_cutoff_log_n, relative_l2_error,
    theoretical_bounds, Deconvolver, EstimatorKind,
};
use crate::experiments::{
    oracle_cutoff, rate_study, reproduce_table_with, resolve_threads, with_threads, CutoffMode,
    RateStudySpec, TableId,
};
use crate::models::{ProcessConfig, TemperedStableParams};
use crate::sampling::{sample_full_increments_with, CpOptions, IncrementSample, Seed};
use crate::selection::{CutoffGrid, SelectionPlan, DEFAULT_KAPPA};

/// Exit code for invalid input.
pub const EXIT_VALIDATION: u8 = 2;
/// Exit code for numerical failure.
pub const EXIT_NUMERIC: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "levy-sj",
    version,
    about = "Estimate the small-jump density of a tempered stable Levy process from discrete increments"
)]
pub struct Cli {
    /// Worker threads [default: LEVY_THREADS, else all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file with settings; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Log progress to stderr
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw seeded increments and write them as CSV
    Sample(SampleArgs),
    /// Estimate the small-jump density from a sample file or a seeded draw
    Estimate(EstimateArgs),
    /// Select the cutoff by penalized contrast and write the trace
    Select(SelectArgs),
    /// Print the bias and variance bounds and the optimal cutoff
    Bounds(BoundsArgs),
    /// Reproduce a simulation table (T1, T2, T3, T4, T4-alt)
    Table(TableArgs),
    /// Risk against sample size at the oracle cutoff
    RateStudy(RateArgs),
}

/// Process parameters; unset values fall back to the config file, then to the defaults shown.
#[derive(Debug, Clone, Default, Args)]
pub struct ProcessArgs {
    /// Weight of positive jumps [default: 1]
    #[arg(long)]
    pub p: Option<f64>,
    /// Weight of negative jumps [default: 1]
    #[arg(long)]
    pub q: Option<f64>,
    /// Tempering of positive jumps [default: 0]
    #[arg(long)]
    pub a: Option<f64>,
    /// Tempering of negative jumps [default: 0]
    #[arg(long)]
    pub b: Option<f64>,
    /// Stability index in (0, 2) [default: 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Small-jump threshold in (0, 1] [default: 1]
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sampling interval [default: 1]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Brownian volatility [default: 0]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of increments [default: 1000]
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DrawArgs {
    /// Seed of the generator [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Compound Poisson truncation for tempered models [default: 0.001]
    #[arg(long)]
    pub trunc_eta: Option<f64>,
    /// Drop the Gaussian replacing truncated jumps
    #[arg(long)]
    pub no_variance_matching: bool,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub draw: DrawArgs,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub draw: DrawArgs,
    /// Sample CSV to use instead of a seeded draw
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// known-noise, direct or gaussian-noise [default: known-noise, gaussian-noise if sigma > 0]
    #[arg(long)]
    pub kind: Option<EstimatorKind>,
    /// adaptive, oracle or a fixed cutoff value [default: adaptive]
    #[arg(long)]
    pub cutoff: Option<String>,
    /// Penalty constant for adaptive selection [default: 0.9]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Also compare against the exact-CF benchmark with this cutoff [default: auto]
    #[arg(long)]
    pub benchmark_ell: Option<f64>,
    /// Skip the benchmark comparison
    #[arg(long)]
    pub no_benchmark: bool,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Selection trace CSV (adaptive cutoff only)
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    #[command(flatten)]
    pub draw: DrawArgs,
    /// Sample CSV to use instead of a seeded draw
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// known-noise, direct or gaussian-noise [default: known-noise, gaussian-noise if sigma > 0]
    #[arg(long)]
    pub kind: Option<EstimatorKind>,
    /// Penalty constant [default: 0.9]
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Trace CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Cutoff at which to evaluate the bounds [default: the optimal cutoff, else pi/(2 epsilon)]
    #[arg(long)]
    pub m: Option<f64>,
    /// Use this value of log n instead of log of --n
    #[arg(long)]
    pub log_n: Option<f64>,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// T1, T2, T3, T4 or T4-alt
    pub table: String,
    /// Base seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replications per cell [default: 100]
    #[arg(long)]
    pub replications: Option<usize>,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub process: ProcessArgs,
    /// Comma-separated sample sizes [default: 500,2000,8000,32000]
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    /// known-noise, direct or gaussian-noise [default: known-noise, gaussian-noise if sigma > 0]
    #[arg(long)]
    pub kind: Option<EstimatorKind>,
    /// Replications per sample size [default: 100]
    #[arg(long)]
    pub replications: Option<usize>,
    /// Base seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Settings file; every key is optional and mirrors a field name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub trunc_eta: Option<f64>,
    pub gaussian_matching: Option<bool>,
    pub estimator_kind: Option<EstimatorKind>,
    pub cutoff: Option<String>,
    pub kappa: Option<f64>,
    pub benchmark_ell: Option<f64>,
    pub replications: Option<usize>,
    pub n_values: Option<Vec<usize>>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

impl CliConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config file: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Process configuration with flags taking precedence; all problems are reported together.
    pub fn process(&self, flags: &ProcessArgs) -> Result<ProcessConfig> {
        let pick = |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
        let params = TemperedStableParams {
            p: pick(flags.p, self.p, 1.0),
            q: pick(flags.q, self.q, 1.0),
            a: pick(flags.a, self.a, 0.0),
            b: pick(flags.b, self.b, 0.0),
            alpha: pick(flags.alpha, self.alpha, 1.0),
        };
        let config = ProcessConfig {
            params,
            epsilon: pick(flags.epsilon, self.epsilon, 1.0),
            delta: pick(flags.delta, self.delta, 1.0),
            sigma: pick(flags.sigma, self.sigma, 0.0),
            n: flags.n.or(self.n).unwrap_or(1000),
        };
        config.validate()?;
        Ok(config)
    }

    fn cp(&self, draw: &DrawArgs) -> Result<CpOptions> {
        let cp = CpOptions {
            trunc_eta: draw.trunc_eta.or(self.trunc_eta).unwrap_or(CpOptions::default().trunc_eta),
            gaussian_matching: !draw.no_variance_matching && self.gaussian_matching.unwrap_or(true),
        };
        if !(cp.trunc_eta > 0.0 && cp.trunc_eta < 1.0) {
            return Err(Error::InvalidParams(format!("trunc_eta must lie in (0, 1) (got {})", cp.trunc_eta)));
        }
        Ok(cp)
    }
}

fn write_output(path: Option<&Path>, body: &str, meta: serde_json::Value) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
                // A closed reader (`| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
        Some(p) => {
            std::fs::write(p, body)?;
            let mut side = p.as_os_str().to_owned();
            side.push(".json");
            let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
            std::fs::write(PathBuf::from(side), text + "\n")?;
            Ok(())
        }
    }
}

fn default_kind(config: &ProcessConfig) -> EstimatorKind {
    if config.sigma > 0.0 {
        EstimatorKind::GaussianNoise
    } else {
        EstimatorKind::KnownNoise
    }
}

fn check_kind(kind: EstimatorKind, config: &ProcessConfig) -> Result<()> {
    match kind {
        EstimatorKind::Benchmark => Err(Error::InvalidParams(
            "the benchmark is not an estimator; use known-noise, direct or gaussian-noise".into(),
        )),
        EstimatorKind::GaussianNoise if config.sigma <= 0.0 => Err(Error::InvalidParams(
            "--kind gaussian-noise needs sigma > 0; use --kind known-noise when sigma = 0".into(),
        )),
        _ => Ok(()),
    }
}

/// Sample from `--input`, or a seeded draw.  Returns the sample and its description.
fn obtain_sample(file: &CliConfig, process: &ProcessArgs, draw: &DrawArgs, input: Option<&Path>) -> Result<IncrementSample> {
    match input {
        Some(path) => {
            let mut sample = IncrementSample::read_csv(path)?;
            // Flags may override recorded parameters (e.g. to deconvolve under another model).
            let recorded = sample.config;
            let merged = CliConfig {
                p: Some(recorded.params.p),
                q: Some(recorded.params.q),
                a: Some(recorded.params.a),
                b: Some(recorded.params.b),
                alpha: Some(recorded.params.alpha),
                epsilon: Some(recorded.epsilon),
                delta: Some(recorded.delta),
                sigma: Some(recorded.sigma),
                n: Some(sample.values.len()),
                ..CliConfig::default()
            };
            let mut flags = process.clone();
            flags.n = None;
            sample.config = merged.process(&flags)?;
            Ok(sample)
        }
        None => {
            let config = file.process(process)?;
            let seed = draw.seed.or(file.seed).unwrap_or(0);
            sample_full_increments_with(&config, Seed::new(seed, 0), file.cp(draw)?)
        }
    }
}

fn sample_meta(sample: &IncrementSample) -> serde_json::Value {
    json!({
        "config": sample.config,
        "seed": sample.seed,
        "stream": sample.stream,
        "sampler": sample.sampler.name(),
        "cp": sample.cp,
    })
}

fn cmd_sample(file: &CliConfig, args: &SampleArgs) -> Result<()> {
    let config = file.process(&args.process)?;
    let seed = args.draw.seed.or(file.seed).unwrap_or(0);
    let sample = sample_full_increments_with(&config, Seed::new(seed, 0), file.cp(&args.draw)?)?;
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &sample.to_csv(),
        json!({"command": "sample", "version": env!("CARGO_PKG_VERSION"), "sample": sample_meta(&sample)}),
    )
}

fn cmd_estimate(file: &CliConfig, args: &EstimateArgs) -> Result<()> {
    let sample = obtain_sample(file, &args.process, &args.draw, args.input.as_deref())?;
    let config = sample.config;
    let kind = args.kind.or(file.estimator_kind).unwrap_or_else(|| default_kind(&config));
    check_kind(kind, &config)?;
    let mode: CutoffMode = args.cutoff.as_deref().or(file.cutoff.as_deref()).unwrap_or("adaptive").parse()?;
    let kappa = args.kappa.or(file.kappa).unwrap_or(DEFAULT_KAPPA);
    let grid = default_x_grid(&config)?;

    let (m, trace) = match mode {
        CutoffMode::Adaptive { .. } => {
            let plan = SelectionPlan::for_kind(&config, kind, CutoffGrid::default_for(&config)?, kappa)?;
            let trace = plan.select(&sample.values)?;
            (trace.m_hat, Some(trace))
        }
        CutoffMode::Fixed { m } => (m, None),
        CutoffMode::Oracle => (oracle_cutoff(&config)?, None),
    };
    let est = Deconvolver::new(&config, kind, &grid, m)?.estimate(&sample, m)?;

    let risk = if args.no_benchmark || config.epsilon != 1.0 {
        None
    } else {
        let bench = match args.benchmark_ell.or(file.benchmark_ell) {
            Some(ell) => benchmark_density(&config, ell, &grid)?,
            None => benchmark_density_auto(&config, &grid)?,
        };
        let r = relative_l2_error(&est, &bench)?;
        eprintln!("relative L2 error vs benchmark (ell = {}): {r:.6e}", bench.m);
        Some((r, bench.m))
    };
    eprintln!("cutoff m = {m:.6}");

    if let Some(trace) = &trace {
        if let Some(path) = &args.trace {
            write_output(
                Some(path),
                &trace.to_csv(),
                json!({"command": "estimate", "trace_of": args.out, "kind": kind, "kappa": kappa}),
            )?;
        }
    }
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &est.to_csv(),
        json!({
            "command": "estimate",
            "version": env!("CARGO_PKG_VERSION"),
            "sample": sample_meta(&sample),
            "kind": kind,
            "cutoff_mode": mode,
            "kappa": kappa,
            "m": m,
            "x_grid": grid,
            "relative_l2_error": risk.map(|r| r.0),
            "benchmark_ell": risk.map(|r| r.1),
            "below_theoretical_kappa": trace.as_ref().map(|t| t.below_theoretical_kappa),
        }),
    )
}

fn cmd_select(file: &CliConfig, args: &SelectArgs) -> Result<()> {
    let sample = obtain_sample(file, &args.process, &args.draw, args.input.as_deref())?;
    let config = sample.config;
    let kind = args.kind.or(file.estimator_kind).unwrap_or_else(|| default_kind(&config));
    check_kind(kind, &config)?;
    let kappa = args.kappa.or(file.kappa).unwrap_or(DEFAULT_KAPPA);
    let plan = SelectionPlan::for_kind(&config, kind, CutoffGrid::default_for(&config)?, kappa)?;
    let trace = plan.select(&sample.values)?;
    eprintln!("selected m = {:.6}", trace.m_hat);
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &trace.to_csv(),
        json!({
            "command": "select",
            "version": env!("CARGO_PKG_VERSION"),
            "sample": sample_meta(&sample),
            "kind": kind,
            "kappa": kappa,
            "m_hat": trace.m_hat,
            "grid": "geometric from pi/(2 epsilon), ratio 1.01, up to n",
        }),
    )
}

fn cmd_bounds(file: &CliConfig, args: &BoundsArgs) -> Result<()> {
    let mut config = file.process(&args.process)?;
    let log_n = match args.log_n {
        Some(l) if l > 0.0 && l.is_finite() => {
            config.n = l.exp().round().max(1.0) as usize;
            l
        }
        Some(l) => return Err(Error::InvalidParams(format!("--log-n must be positive (got {l})"))),
        None => (config.n as f64).ln(),
    };
    let m_star = match optimal_cutoff_log_n(&config, log_n) {
        Ok(m) => Some(m),
        Err(e @ Error::UndefinedCutoff { .. }) => {
            eprintln!("m* undefined: {e}; the noise level exceeds what n observations can resolve");
            None
        }
        Err(e) => return Err(e),
    };
    let m = args.m.or(m_star).unwrap_or(std::f64::consts::PI / (2.0 * config.epsilon));
    let report = theoretical_bounds(&config, m, config.n)?;
    let body = format!(
        "m,n,log_n,bias_bound,variance_bound,m_star,orey_m,c,big_c,lambda_delta\n{:.12e},{},{:.12e},{:.12e},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e}\n",
        m,
        config.n,
        log_n,
        report.bias_bound,
        report.variance_bound,
        m_star.map(|v| format!("{v:.15e}")).unwrap_or_default(),
        report.orey_m,
        report.c,
        report.big_c,
        report.lambda_delta
    );
    if let Some(ms) = m_star {
        eprintln!("m* = {ms:.15}");
    }
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &body,
        json!({"command": "bounds", "version": env!("CARGO_PKG_VERSION"), "config": config, "log_n": log_n, "m_star": m_star}),
    )
}

fn cmd_table(file: &CliConfig, args: &TableArgs) -> Result<()> {
    let id: TableId = args.table.parse()?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let reps = args.replications.or(file.replications).unwrap_or(100);
    if reps == 0 {
        return Err(Error::InvalidParams("replications must be at least 1".into()));
    }
    let report = reproduce_table_with(id, seed, reps)?;
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &report.to_csv(),
        json!({
            "command": "table",
            "version": env!("CARGO_PKG_VERSION"),
            "table": id,
            "base_seed": seed,
            "replications": reps,
            "cells": report.rows.iter().map(|r| json!({
                "config": r.cell.config,
                "kind": r.cell.estimator_kind,
                "paper": r.cell.paper,
                "failed": r.report.failed,
                "benchmark_ell": r.report.benchmark_ell,
                "x_grid": r.report.x_grid,
            })).collect::<Vec<_>>(),
        }),
    )
}

fn cmd_rate(file: &CliConfig, args: &RateArgs) -> Result<()> {
    let config = file.process(&args.process)?;
    let kind = args.kind.or(file.estimator_kind).unwrap_or_else(|| default_kind(&config));
    check_kind(kind, &config)?;
    let n_values = args
        .n_values
        .clone()
        .or_else(|| file.n_values.clone())
        .unwrap_or_else(|| vec![500, 2000, 8000, 32000]);
    let mut spec = RateStudySpec::new(config, n_values);
    spec.estimator_kind = kind;
    spec.replications = args.replications.or(file.replications).unwrap_or(100);
    spec.base_seed = args.seed.or(file.seed).unwrap_or(0);
    let study = rate_study(&spec)?;
    eprintln!("log-log slope = {:.4}", study.slope);
    let out = args.out.as_deref().or(file.out.as_deref());
    write_output(
        out,
        &study.to_csv(),
        json!({"command": "rate-study", "version": env!("CARGO_PKG_VERSION"), "spec": spec, "slope": study.slope}),
    )
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        e if e.is_validation() => EXIT_VALIDATION,
        Error::Io(_) | Error::Csv(_) | Error::UndefinedCutoff { .. } => EXIT_VALIDATION,
        _ => EXIT_NUMERIC,
    }
}

/// Run a parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => CliConfig::read(path)?,
        None => CliConfig::default(),
    };
    let threads = resolve_threads(cli.threads.or(file.threads))?;
    with_threads(threads, || match &cli.command {
        Command::Sample(a) => cmd_sample(&file, a),
        Command::Estimate(a) => cmd_estimate(&file, a),
        Command::Select(a) => cmd_select(&file, a),
        Command::Bounds(a) => cmd_bounds(&file, a),
        Command::Table(a) => cmd_table(&file, a),
        Command::RateStudy(a) => cmd_rate(&file, a),
    })?
}
