//! Seeded Monte Carlo engine: replications, risk tables, rate studies and plot data.
//!
//! Replication `r` of an experiment with base seed `s` draws its sample from the ChaCha8
//! stream `(s, r)`, so results do not depend on scheduling or thread count.  Per-replication
//! results are collected in index order and reduced sequentially.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::ProcessCf;
use crate::error::{Error, Result};
use crate::estimators::{
    benchmark_density, benchmark_density_auto, default_x_grid, optimal_cutoff, relative_l2_error, Deconvolver,
    EstimatorKind, SpectralEstimate, XGrid,
};
use crate::models::{ProcessConfig, TemperedStableParams};
use crate::sampling::{sample_full_increments_with, CpOptions, IncrementSample, Seed};
use crate::selection::{CutoffGrid, SelectionPlan, DEFAULT_KAPPA};

/// Environment variable read when no thread count is given explicitly.
pub const THREADS_ENV: &str = "LEVY_THREADS";

/// Largest tolerated fraction of failed replications.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

/// How the cutoff of each replication is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CutoffMode {
    /// Penalized contrast over the default geometric grid.
    Adaptive { kappa: f64 },
    /// The same cutoff for every replication.
    Fixed { m: f64 },
    /// The cutoff minimizing the theoretical bounds, floored at `π/(2ε)`.
    Oracle,
}

impl Default for CutoffMode {
    fn default() -> Self {
        CutoffMode::Adaptive { kappa: DEFAULT_KAPPA }
    }
}

impl FromStr for CutoffMode {
    type Err = Error;

    /// `adaptive`, `oracle` or a positive number for a fixed cutoff.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(CutoffMode::default()),
            "oracle" => Ok(CutoffMode::Oracle),
            other => match other.parse::<f64>() {
                Ok(m) if m > 0.0 && m.is_finite() => Ok(CutoffMode::Fixed { m }),
                _ => Err(Error::Parse(format!(
                    "cutoff must be 'adaptive', 'oracle' or a positive number (got '{other}')"
                ))),
            },
        }
    }
}

/// Cutoff ℓ of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkEll {
    /// Default ℓ doubled until the benchmark stops changing.
    #[default]
    Auto,
    Fixed(f64),
}

/// Everything needed to run one Monte Carlo cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub config: ProcessConfig,
    pub estimator_kind: EstimatorKind,
    pub replications: usize,
    pub base_seed: u64,
    pub cutoff_mode: CutoffMode,
    pub benchmark_ell: BenchmarkEll,
    pub cp: CpOptions,
}

impl ExperimentSpec {
    /// 100 adaptive replications with seed 0; known noise without a Brownian part,
    /// Gaussian noise with one.
    pub fn new(config: ProcessConfig) -> Self {
        let estimator_kind = if config.sigma > 0.0 {
            EstimatorKind::GaussianNoise
        } else {
            EstimatorKind::KnownNoise
        };
        Self {
            config,
            estimator_kind,
            replications: 100,
            base_seed: 0,
            cutoff_mode: CutoffMode::default(),
            benchmark_ell: BenchmarkEll::Auto,
            cp: CpOptions::default(),
        }
    }

    pub fn with_kind(mut self, kind: EstimatorKind) -> Self {
        self.estimator_kind = kind;
        self
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_cutoff(mut self, mode: CutoffMode) -> Self {
        self.cutoff_mode = mode;
        self
    }

    pub fn with_benchmark_ell(mut self, ell: BenchmarkEll) -> Self {
        self.benchmark_ell = ell;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let mut problems = Vec::new();
        if self.replications == 0 {
            problems.push("replications must be at least 1".to_string());
        }
        if self.estimator_kind == EstimatorKind::Benchmark {
            problems.push("the benchmark is not an estimator".to_string());
        }
        if self.estimator_kind == EstimatorKind::GaussianNoise && self.config.sigma <= 0.0 {
            problems.push("the gaussian-noise estimator needs sigma > 0; use known-noise when sigma = 0".to_string());
        }
        match self.cutoff_mode {
            CutoffMode::Adaptive { kappa } if !(kappa > 0.0 && kappa.is_finite()) => {
                problems.push(format!("kappa must be positive (got {kappa})"));
            }
            CutoffMode::Fixed { m } if !(m > 0.0 && m.is_finite()) => {
                problems.push(format!("cutoff m must be positive (got {m})"));
            }
            _ => {}
        }
        if let BenchmarkEll::Fixed(ell) = self.benchmark_ell {
            if !(ell > 0.0 && ell.is_finite()) {
                problems.push(format!("benchmark ell must be positive (got {ell})"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }
}

/// Theoretical cutoff `m*` for `config`, floored at `π/(2ε)`; the floor is also used when
/// `m*` is undefined because `log n` is too small.
pub fn oracle_cutoff(config: &ProcessConfig) -> Result<f64> {
    let floor = PI / (2.0 * config.epsilon);
    match optimal_cutoff(config, config.n) {
        Ok(m) => Ok(m.max(floor)),
        Err(Error::UndefinedCutoff { .. }) => Ok(floor),
        Err(e) => Err(e),
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub index: u64,
    pub m: f64,
    pub risk: f64,
    pub estimate: SpectralEstimate,
}

/// Mean and spread of the relative L² risk and of the cutoff over replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub mean_rel_l2: f64,
    pub std_rel_l2: f64,
    pub mean_m_hat: f64,
    pub std_m_hat: f64,
    /// Replications that succeeded.
    pub replications: usize,
    pub failed: usize,
    pub risks: Vec<f64>,
    pub m_hats: Vec<f64>,
    /// Final cutoff of the benchmark.
    pub benchmark_ell: f64,
    pub x_grid: XGrid,
    pub spec: ExperimentSpec,
}

impl RiskReport {
    /// Pretty JSON echo of the report and its spec.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Sample mean and standard deviation with divisor `n - 1` (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// A prepared Monte Carlo cell: grid, benchmark, noise tables and selection plan are
/// computed once and shared by every replication.
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    spec: ExperimentSpec,
    grid: XGrid,
    benchmark: SpectralEstimate,
    deconvolver: Deconvolver,
    plan: Option<SelectionPlan>,
    fixed_m: Option<f64>,
}

impl MonteCarlo {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let config = &spec.config;
        let grid = default_x_grid(config)?;
        let benchmark = match spec.benchmark_ell {
            BenchmarkEll::Auto => benchmark_density_auto(config, &grid)?,
            BenchmarkEll::Fixed(ell) => benchmark_density(config, ell, &grid)?,
        };
        let (plan, fixed_m) = match spec.cutoff_mode {
            CutoffMode::Adaptive { kappa } => {
                let cutoffs = CutoffGrid::default_for(config)?;
                (Some(SelectionPlan::for_kind(config, spec.estimator_kind, cutoffs, kappa)?), None)
            }
            CutoffMode::Fixed { m } => (None, Some(m)),
            CutoffMode::Oracle => (None, Some(oracle_cutoff(config)?)),
        };
        let m_max = match (&plan, fixed_m) {
            (Some(p), _) => p.grid().max(),
            (None, Some(m)) => m,
            (None, None) => unreachable!("either a plan or a fixed cutoff"),
        };
        let deconvolver = Deconvolver::new(config, spec.estimator_kind, &grid, m_max)?;
        Ok(Self {
            spec,
            grid,
            benchmark,
            deconvolver,
            plan,
            fixed_m,
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn grid(&self) -> &XGrid {
        &self.grid
    }

    pub fn benchmark(&self) -> &SpectralEstimate {
        &self.benchmark
    }

    pub fn plan(&self) -> Option<&SelectionPlan> {
        self.plan.as_ref()
    }

    /// The cutoff used by every replication, unless selection is adaptive.
    pub fn fixed_cutoff(&self) -> Option<f64> {
        self.fixed_m
    }

    /// Sample of replication `r`.
    pub fn sample(&self, r: u64) -> Result<IncrementSample> {
        sample_full_increments_with(&self.spec.config, Seed::new(self.spec.base_seed, r), self.spec.cp)
    }

    /// Cutoff for a sample.
    pub fn cutoff(&self, values: &[f64]) -> Result<f64> {
        match (&self.plan, self.fixed_m) {
            (Some(plan), _) => Ok(plan.select(values)?.m_hat),
            (None, Some(m)) => Ok(m),
            (None, None) => unreachable!("either a plan or a fixed cutoff"),
        }
    }

    /// Run replication `r` and keep its estimate.
    pub fn replicate(&self, r: u64) -> Result<Replicate> {
        let sample = self.sample(r)?;
        let m = self.cutoff(&sample.values)?;
        let estimate = self.deconvolver.estimate(&sample, m)?;
        let risk = relative_l2_error(&estimate, &self.benchmark)?;
        Ok(Replicate {
            index: r,
            m,
            risk,
            estimate,
        })
    }

    /// All replications, in parallel, summarized in index order.
    pub fn run(&self) -> Result<RiskReport> {
        let reps = self.spec.replications;
        let outcomes: Vec<Result<(f64, f64)>> = (0..reps as u64)
            .into_par_iter()
            .map(|r| self.replicate(r).map(|x| (x.risk, x.m)))
            .collect();
        let mut risks = Vec::with_capacity(reps);
        let mut m_hats = Vec::with_capacity(reps);
        let mut failures = Vec::new();
        for (r, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok((risk, m)) => {
                    risks.push(risk);
                    m_hats.push(m);
                }
                Err(e) => {
                    log::warn!("replication {r} failed: {e}");
                    failures.push(format!("replication {r}: {e}"));
                }
            }
        }
        check_failures(&failures, reps)?;
        let (mean_rel_l2, std_rel_l2) = mean_std(&risks);
        let (mean_m_hat, std_m_hat) = mean_std(&m_hats);
        Ok(RiskReport {
            mean_rel_l2,
            std_rel_l2,
            mean_m_hat,
            std_m_hat,
            replications: risks.len(),
            failed: failures.len(),
            risks,
            m_hats,
            benchmark_ell: self.benchmark.m,
            x_grid: self.grid,
            spec: self.spec,
        })
    }

    /// Risk of every grid cutoff and of the selected one, per replication, in the
    /// frequency domain (adaptive mode only).
    ///
    /// By Plancherel the risk at cutoff `m` is
    /// `[∫_0^m |φ̃ - φ_Z|² + ∫_m^ℓ |φ_Z|²] / ∫_0^ℓ |φ_Z|²`, where `φ̃` is the deconvolved
    /// empirical CF; all integrals use the selection nodes.
    pub fn oracle_comparison(&self) -> Result<OracleComparison> {
        let plan = self.plan.as_ref().ok_or_else(|| {
            Error::InvalidParams("oracle comparison needs the adaptive cutoff mode".into())
        })?;
        let cf = ProcessCf::new(&self.spec.config)?;
        let h = plan.u_step();
        let phi_lattice: Vec<Complex64> = (0..plan.lattice_len())
            .into_par_iter()
            .map(|k| cf.small(k as f64 * h))
            .collect::<Result<_>>()?;
        let phi_grid: Vec<Complex64> = plan.grid().m_values.par_iter().map(|&m| cf.small(m)).collect::<Result<_>>()?;
        let sq = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).collect::<Vec<f64>>();
        let signal = plan.cumulative(&sq(&phi_lattice), &sq(&phi_grid));
        let total = PI * self.benchmark.spectral_norm_sq();
        if !(total > 0.0) {
            return Err(Error::ZeroBenchmark);
        }

        let reps = self.spec.replications;
        let outcomes: Vec<Result<(Vec<f64>, usize)>> = (0..reps as u64)
            .into_par_iter()
            .map(|r| {
                let sample = self.sample(r)?;
                let (lattice, at_grid) = plan.deconvolved(&sample.values)?;
                let trace = plan.trace_from(&plan.contrasts_from(&lattice, &at_grid), sample.values.len());
                let err = |a: &[Complex64], b: &[Complex64]| {
                    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).collect::<Vec<f64>>()
                };
                let noise = plan.cumulative(&err(&lattice, &phi_lattice), &err(&at_grid, &phi_grid));
                let risk = noise
                    .iter()
                    .zip(&signal)
                    .map(|(e, s)| (e + (total - s).max(0.0)) / total)
                    .collect();
                Ok((risk, trace.index))
            })
            .collect();

        let grid_len = plan.grid().len();
        let mut sum = vec![0.0; grid_len];
        let mut adaptive = Vec::with_capacity(reps);
        let mut m_hats = Vec::with_capacity(reps);
        let mut failures = Vec::new();
        for (r, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Ok((risk, index)) => {
                    for (s, v) in sum.iter_mut().zip(&risk) {
                        *s += v;
                    }
                    adaptive.push(risk[index]);
                    m_hats.push(plan.grid().m_values[index]);
                }
                Err(e) => failures.push(format!("replication {r}: {e}")),
            }
        }
        check_failures(&failures, reps)?;
        let count = adaptive.len() as f64;
        let mean_risk: Vec<f64> = sum.iter().map(|s| s / count).collect();
        let best_index = mean_risk
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v < mean_risk[best] { i } else { best });
        Ok(OracleComparison {
            m_values: plan.grid().m_values.clone(),
            best_m: plan.grid().m_values[best_index],
            best_risk: mean_risk[best_index],
            mean_risk,
            best_index,
            adaptive_risk: mean_std(&adaptive).0,
            mean_m_hat: mean_std(&m_hats).0,
            replications: adaptive.len(),
            n: self.spec.config.n,
        })
    }
}

fn check_failures(failures: &[String], total: usize) -> Result<()> {
    if failures.len() as f64 > MAX_FAILURE_FRACTION * total as f64 || failures.len() == total {
        return Err(Error::Replications {
            failed: failures.len(),
            total,
            first: failures[0].clone(),
        });
    }
    Ok(())
}

/// Mean risk of each fixed grid cutoff against the adaptive choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub m_values: Vec<f64>,
    pub mean_risk: Vec<f64>,
    pub best_index: usize,
    pub best_m: f64,
    pub best_risk: f64,
    /// Mean risk at the selected cutoff.
    pub adaptive_risk: f64,
    pub mean_m_hat: f64,
    pub replications: usize,
    pub n: usize,
}

impl OracleComparison {
    /// `adaptive ≤ factor · best + slack / n`.
    pub fn holds(&self, factor: f64, slack: f64) -> bool {
        self.adaptive_risk <= factor * self.best_risk + slack / self.n as f64
    }
}

/// Run one Monte Carlo cell.
///
/// ```no_run
/// use smalljumps::prelude::*;
///
/// let params = TemperedStableParams::stable(1.0, 1.0, 1.1).unwrap();
/// let config = ProcessConfig::jumps_only(params, 0.1, 1000).unwrap();
/// let report = run_monte_carlo(ExperimentSpec::new(config).with_seed(7)).unwrap();
/// println!("{:.3e} ({:.3e})", report.mean_rel_l2, report.std_rel_l2);
/// ```
pub fn run_monte_carlo(spec: ExperimentSpec) -> Result<RiskReport> {
    MonteCarlo::new(spec)?.run()
}

/// The simulation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableId {
    /// Symmetric stable, `P = Q = 1`.
    T1,
    /// One-sided stable, `P = 2, Q = 0`.
    T2,
    /// One-sided tempered stable, `P = 2, Q = 0, A = 1`, `Δ = 1`.
    T3,
    /// Symmetric 1-stable plus a Brownian part, `Δ = 1`, `n = 5000`.
    T4,
    /// As `T4` with `Δ = 0.1`.
    T4Alt,
}

impl TableId {
    pub const ALL: [TableId; 5] = [TableId::T1, TableId::T2, TableId::T3, TableId::T4, TableId::T4Alt];

    pub fn name(&self) -> &'static str {
        match self {
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T3 => "T3",
            TableId::T4 => "T4",
            TableId::T4Alt => "T4-alt",
        }
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T1" => Ok(TableId::T1),
            "T2" => Ok(TableId::T2),
            "T3" => Ok(TableId::T3),
            "T4" => Ok(TableId::T4),
            "T4-ALT" | "T4ALT" => Ok(TableId::T4Alt),
            _ => Err(Error::InvalidParams(format!(
                "unknown table '{s}'; expected one of T1, T2, T3, T4, T4-alt"
            ))),
        }
    }
}

impl std::fmt::Display for TableId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Published mean and standard deviation of the risk and of `m̂` for one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaperValue {
    pub mean: f64,
    pub std: f64,
    pub m_mean: f64,
    pub m_std: f64,
}

impl PaperValue {
    const fn new(mean: f64, std: f64, m_mean: f64, m_std: f64) -> Self {
        Self {
            mean,
            std,
            m_mean,
            m_std,
        }
    }

    /// Standard error of a 100-replication mean.
    pub fn std_error(&self) -> f64 {
        self.std / 10.0
    }

    /// `|mean - published| / (published std / √100)`.
    pub fn z_score(&self, mean: f64) -> f64 {
        (mean - self.mean).abs() / self.std_error()
    }

    /// Acceptance half-width: three standard errors or 25% of the mean, whichever is larger.
    pub fn band(&self) -> f64 {
        (3.0 * self.std_error()).max(0.25 * self.mean)
    }

    pub fn contains(&self, mean: f64) -> bool {
        (mean - self.mean).abs() <= self.band()
    }

    /// Three standard errors of the published `m̂` mean.
    pub fn contains_m(&self, m_mean: f64) -> bool {
        (m_mean - self.m_mean).abs() <= 3.0 * self.m_std / 10.0
    }
}

/// One cell of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableCell {
    pub config: ProcessConfig,
    pub estimator_kind: EstimatorKind,
    pub paper: Option<PaperValue>,
}

type Pv = PaperValue;

// Rows: alpha in {0.7, 1.1, 1.7} x n in {500, 1000, 10000}; columns: delta in {1, 0.1, 0.01}.
const T1_VALUES: [[Pv; 3]; 9] = [
    [Pv::new(4.21e-1, 0.36, 1.57, 0.02), Pv::new(2.30e-2, 0.01, 16.92, 3.19), Pv::new(2.65e-2, 0.01, 428.14, 87.22)],
    [Pv::new(1.90e-1, 0.15, 1.57, 0.02), Pv::new(1.50e-2, 0.01, 19.30, 3.22), Pv::new(1.41e-2, 0.49e-2, 524.73, 80.92)],
    [Pv::new(2.90e-2, 0.02, 1.58, 0.03), Pv::new(2.23e-3, 0.75e-3, 28.74, 3.47), Pv::new(1.82e-3, 0.54e-3, 821.53, 89.02)],
    [Pv::new(1.18e-1, 0.13, 1.60, 0.10), Pv::new(1.12e-2, 0.01, 7.61, 1.40), Pv::new(1.24e-2, 0.58e-2, 62.05, 11.73)],
    [Pv::new(5.74e-2, 0.06, 1.58, 0.06), Pv::new(6.51e-3, 3.40e-3, 8.47, 1.53), Pv::new(7.35e-3, 0.35e-2, 67.98, 11.06)],
    [Pv::new(6.48e-3, 0.05, 1.58, 0.05), Pv::new(7.50e-4, 0.30e-3, 11.07, 1.24), Pv::new(7.62e-4, 0.30e-3, 91.09, 8.76)],
    [Pv::new(7.78e-2, 0.06, 1.58, 0.06), Pv::new(7.19e-3, 0.68e-3, 3.04, 0.67), Pv::new(7.42e-3, 5.80e-3, 11.54, 2.20)],
    [Pv::new(3.72e-2, 0.03, 1.57, 0.04), Pv::new(3.83e-3, 0.28e-3, 3.04, 0.24), Pv::new(4.48e-3, 2.80e-3, 12.97, 2.97)],
    [Pv::new(3.90e-3, 0.01, 1.57, 0.04), Pv::new(8.6e-4, 0.50e-3, 3.73, 0.30), Pv::new(1.25e-3, 0.60e-3, 14.89, 2.08)],
];

const T2_VALUES: [[Pv; 3]; 9] = [
    [Pv::new(3.48e-1, 0.27, 1.58, 0.03), Pv::new(3.76e-2, 1.50e-2, 15.91, 3.01), Pv::new(1.11e-1, 0.28e-1, 461.14, 76.86)],
    [Pv::new(1.62e-1, 0.11, 1.58, 0.03), Pv::new(2.67e-2, 0.80e-2, 19.31, 2.69), Pv::new(9.90e-2, 0.17e-1, 527.81, 81.93)],
    [Pv::new(5.14e-2, 0.03, 1.58, 0.05), Pv::new(1.90e-2, 0.24e-2, 29.16, 3.21), Pv::new(8.66e-2, 0.64e-2, 810.72, 78.32)],
    [Pv::new(8.55e-2, 0.10, 1.59, 0.05), Pv::new(9.96e-3, 0.60e-3, 7.53, 1.41), Pv::new(1.06e-2, 0.60e-2, 60.95, 9.94)],
    [Pv::new(4.11e-2, 0.05, 1.58, 0.05), Pv::new(5.57e-3, 0.30e-3, 8.32, 1.19), Pv::new(5.96e-3, 0.27e-2, 68.05, 11.17)],
    [Pv::new(5.14e-3, 0.40e-2, 1.60, 0.10), Pv::new(7.51e-4, 0.30e-3, 11.14, 1.41), Pv::new(8.09e-4, 0.04e-2, 89.81, 9.62)],
    [Pv::new(7.58e-2, 0.07, 1.59, 0.07), Pv::new(7.29e-3, 5.90e-3, 3.02, 0.58), Pv::new(8.14e-3, 0.75e-2, 11.69, 2.47)],
    [Pv::new(3.28e-2, 0.02, 1.58, 0.05), Pv::new(3.95e-3, 2.50e-3, 3.12, 0.38), Pv::new(4.51e-3, 0.26e-2, 12.20, 1.72)],
    [Pv::new(4.24e-3, 0.34e-2, 1.59, 0.08), Pv::new(8.82e-4, 0.50e-3, 3.82, 0.44), Pv::new(1.28e-3, 0.05e-2, 15.04, 1.57)],
];

// Rows: n in {500, 1000}; columns: alpha in {0.7, 1.1}.
const T3_VALUES: [[Pv; 2]; 2] = [
    [Pv::new(2.78e-2, 0.016, 2.44, 0.40), Pv::new(9.43e-3, 0.007, 1.87, 0.27)],
    [Pv::new(1.89e-2, 0.019, 2.63, 0.30), Pv::new(4.62e-3, 0.002, 1.99, 0.24)],
];

// sigma in {0, 0.2, 0.5, 1}.
const T4_VALUES: [Pv; 4] = [
    Pv::new(1.72e-2, 0.016, 1.597, 0.08),
    Pv::new(1.91e-2, 0.022, 1.596, 0.08),
    Pv::new(2.11e-2, 0.020, 1.582, 0.04),
    Pv::new(9.97e-2, 0.12, 1.589, 0.06),
];

const STABLE_ALPHAS: [f64; 3] = [0.7, 1.1, 1.7];
const STABLE_NS: [usize; 3] = [500, 1000, 10_000];
const STABLE_DELTAS: [f64; 3] = [1.0, 0.1, 0.01];
const SIGMAS: [f64; 4] = [0.0, 0.2, 0.5, 1.0];

fn brownian_cell(delta: f64, sigma: f64, paper: Option<PaperValue>) -> Result<TableCell> {
    let params = TemperedStableParams::stable(1.0, 1.0, 1.0)?;
    let config = ProcessConfig::new(params, 1.0, delta, sigma, 5000)?;
    let kind = if sigma > 0.0 {
        EstimatorKind::GaussianNoise
    } else {
        EstimatorKind::KnownNoise
    };
    Ok(TableCell {
        config,
        estimator_kind: kind,
        paper,
    })
}

/// Cells of a table in the published row order.
pub fn table_cells(id: TableId) -> Result<Vec<TableCell>> {
    let mut cells = Vec::new();
    match id {
        TableId::T1 | TableId::T2 => {
            let (p, q, values) = if id == TableId::T1 {
                (1.0, 1.0, &T1_VALUES)
            } else {
                (2.0, 0.0, &T2_VALUES)
            };
            for (i, &alpha) in STABLE_ALPHAS.iter().enumerate() {
                for (j, &n) in STABLE_NS.iter().enumerate() {
                    for (k, &delta) in STABLE_DELTAS.iter().enumerate() {
                        let params = TemperedStableParams::stable(p, q, alpha)?;
                        cells.push(TableCell {
                            config: ProcessConfig::jumps_only(params, delta, n)?,
                            estimator_kind: EstimatorKind::KnownNoise,
                            paper: Some(values[3 * i + j][k]),
                        });
                    }
                }
            }
        }
        TableId::T3 => {
            for (j, &n) in [500usize, 1000].iter().enumerate() {
                for (i, &alpha) in [0.7, 1.1].iter().enumerate() {
                    let params = TemperedStableParams::new(2.0, 0.0, 1.0, 0.0, alpha)?;
                    cells.push(TableCell {
                        config: ProcessConfig::jumps_only(params, 1.0, n)?,
                        estimator_kind: EstimatorKind::KnownNoise,
                        paper: Some(T3_VALUES[j][i]),
                    });
                }
            }
        }
        TableId::T4 => {
            for (&sigma, &paper) in SIGMAS.iter().zip(&T4_VALUES) {
                cells.push(brownian_cell(1.0, sigma, Some(paper))?);
            }
        }
        TableId::T4Alt => {
            for &sigma in &SIGMAS {
                cells.push(brownian_cell(0.1, sigma, None)?);
            }
        }
    }
    Ok(cells)
}

/// Published values for a configuration, if it is a table cell.
pub fn paper_value(id: TableId, config: &ProcessConfig) -> Result<Option<PaperValue>> {
    Ok(table_cells(id)?.into_iter().find(|c| c.config == *config).and_then(|c| c.paper))
}

/// Base seed of cell `index` of a table run with `base_seed`.
pub fn cell_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ ((index as u64 + 1) << 40)
}

/// Spec used for cell `index` of a table.
pub fn cell_spec(cell: &TableCell, base_seed: u64, index: usize, replications: usize) -> ExperimentSpec {
    ExperimentSpec::new(cell.config)
        .with_kind(cell.estimator_kind)
        .with_seed(cell_seed(base_seed, index))
        .with_replications(replications)
}

/// One reproduced cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub cell: TableCell,
    pub report: RiskReport,
}

/// A reproduced table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub id: TableId,
    pub base_seed: u64,
    pub replications: usize,
    pub rows: Vec<TableRow>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

impl TableReport {
    /// Columns `alpha,delta,n,sigma,mean_rel_l2,std_rel_l2,mean_m_hat,std_m_hat,paper_mean,paper_std,z_score`;
    /// the paper columns are empty for cells without published values.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# table={},base_seed={},replications={},cutoff=adaptive,kappa={},grid=geometric-1.01",
            self.id, self.base_seed, self.replications, DEFAULT_KAPPA
        );
        s.push_str("alpha,delta,n,sigma,mean_rel_l2,std_rel_l2,mean_m_hat,std_m_hat,paper_mean,paper_std,z_score\n");
        for row in &self.rows {
            let c = &row.cell.config;
            let r = &row.report;
            let paper = row.cell.paper;
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{},{},{}",
                c.params.alpha,
                c.delta,
                c.n,
                c.sigma,
                r.mean_rel_l2,
                r.std_rel_l2,
                r.mean_m_hat,
                r.std_m_hat,
                fmt_opt(paper.map(|p| p.mean)),
                fmt_opt(paper.map(|p| p.std)),
                fmt_opt(paper.map(|p| p.z_score(r.mean_rel_l2))),
            );
        }
        s
    }
}

/// Every cell of a table with 100 replications.
pub fn reproduce_table(id: TableId, base_seed: u64) -> Result<TableReport> {
    reproduce_table_with(id, base_seed, 100)
}

/// Every cell of a table with a chosen replication count.
pub fn reproduce_table_with(id: TableId, base_seed: u64, replications: usize) -> Result<TableReport> {
    let cells = table_cells(id)?;
    let mut rows = Vec::with_capacity(cells.len());
    for (i, cell) in cells.iter().enumerate() {
        let c = &cell.config;
        log::info!(
            "{id} cell {}/{}: alpha={} delta={} n={} sigma={}",
            i + 1,
            cells.len(),
            c.params.alpha,
            c.delta,
            c.n,
            c.sigma
        );
        let report = run_monte_carlo(cell_spec(cell, base_seed, i, replications))?;
        rows.push(TableRow { cell: *cell, report });
    }
    Ok(TableReport {
        id,
        base_seed,
        replications,
        rows,
    })
}

/// The rate `(log n / Δ)^{1/α} e^{4λΔ} / n` attained at the theoretical cutoff.
pub fn theoretical_rate(config: &ProcessConfig) -> Result<f64> {
    let n = config.n as f64;
    let ld = config.lambda_delta()?;
    Ok((n.ln() / config.delta).powf(1.0 / config.params.alpha) * (4.0 * ld).exp() / n)
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, _) = mean_std(&lx);
    let (my, _) = mean_std(&ly);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Sample sizes and Monte Carlo settings of a rate study at the oracle cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudySpec {
    pub config: ProcessConfig,
    pub n_values: Vec<usize>,
    pub estimator_kind: EstimatorKind,
    pub replications: usize,
    pub base_seed: u64,
}

impl RateStudySpec {
    pub fn new(config: ProcessConfig, n_values: Vec<usize>) -> Self {
        let kind = ExperimentSpec::new(config).estimator_kind;
        Self {
            config,
            n_values,
            estimator_kind: kind,
            replications: 100,
            base_seed: 0,
        }
    }
}

/// One sample size of a rate study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub m: f64,
    pub mean_rel_l2: f64,
    pub std_rel_l2: f64,
    pub theoretical_rate: f64,
}

/// Risk against `n` and the fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStudy {
    pub spec: RateStudySpec,
    pub rows: Vec<RateRow>,
    pub slope: f64,
}

impl RateStudy {
    pub fn to_csv(&self) -> String {
        let c = &self.spec.config;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# alpha={},delta={},sigma={},kind={},replications={},base_seed={},cutoff=oracle,slope={:.6e}",
            c.params.alpha, c.delta, c.sigma, self.spec.estimator_kind, self.spec.replications, self.spec.base_seed, self.slope
        );
        s.push_str("n,m,mean_rel_l2,std_rel_l2,theoretical_rate\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.6e},{:.6e},{:.6e},{:.6e}",
                r.n, r.m, r.mean_rel_l2, r.std_rel_l2, r.theoretical_rate
            );
        }
        s
    }
}

/// Monte Carlo risk at the oracle cutoff for each `n`, with the theoretical rate curve.
pub fn rate_study(spec: &RateStudySpec) -> Result<RateStudy> {
    if spec.n_values.len() < 2 {
        return Err(Error::InvalidParams("a rate study needs at least two sample sizes".into()));
    }
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for (i, &n) in spec.n_values.iter().enumerate() {
        let config = spec.config.with_n(n);
        let exp = ExperimentSpec::new(config)
            .with_kind(spec.estimator_kind)
            .with_cutoff(CutoffMode::Oracle)
            .with_replications(spec.replications)
            .with_seed(cell_seed(spec.base_seed, i));
        let mc = MonteCarlo::new(exp)?;
        let report = mc.run()?;
        rows.push(RateRow {
            n,
            m: mc.fixed_cutoff().expect("oracle cutoff is fixed"),
            mean_rel_l2: report.mean_rel_l2,
            std_rel_l2: report.std_rel_l2,
            theoretical_rate: theoretical_rate(&config)?,
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let risks: Vec<f64> = rows.iter().map(|r| r.mean_rel_l2).collect();
    Ok(RateStudy {
        spec: spec.clone(),
        slope: log_log_slope(&ns, &risks),
        rows,
    })
}

/// CSV `x,benchmark,estimate_rep1..estimate_repK` for overlay plots of the first `k`
/// replications of `spec`.
pub fn plot_data(spec: &ExperimentSpec, k: usize) -> Result<String> {
    if k == 0 {
        return Err(Error::InvalidParams("need at least one replication to plot".into()));
    }
    let mc = MonteCarlo::new(spec.with_replications(k))?;
    let reps: Vec<Replicate> = (0..k as u64).into_par_iter().map(|r| mc.replicate(r)).collect::<Result<_>>()?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# kind={},base_seed={},m_hats={}",
        spec.estimator_kind,
        spec.base_seed,
        reps.iter().map(|r| format!("{:.6e}", r.m)).collect::<Vec<_>>().join(";")
    );
    s.push_str("x,benchmark");
    for r in 1..=k {
        let _ = write!(s, ",estimate_rep{r}");
    }
    s.push('\n');
    for (i, b) in mc.benchmark().values.iter().enumerate() {
        let _ = write!(s, "{:.6e},{:.6e}", mc.grid().point(i), b);
        for r in &reps {
            let _ = write!(s, ",{:.6e}", r.estimate.values[i]);
        }
        s.push('\n');
    }
    Ok(s)
}

/// Thread count from an explicit value or the `LEVY_THREADS` environment variable.
pub fn resolve_threads(explicit: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = explicit {
        if t == 0 {
            return Err(Error::InvalidParams("thread count must be at least 1".into()));
        }
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::InvalidParams(format!("{THREADS_ENV} must be a positive integer (got '{v}')"))),
        },
        _ => Ok(None),
    }
}

/// Run `f` on a dedicated pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParams(format!("could not start {t} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
