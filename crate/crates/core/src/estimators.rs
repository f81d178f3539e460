//! Spectral cutoff estimators of `g_Δ`, the exact benchmark, risks and theoretical bounds.
//!
//! Every estimator is a Fourier inversion `(1/2π) ∫_{-m}^{m} φ(u) e^{-iux} du` evaluated by
//! the trapezoid rule on `u ∈ [0, m]` using Hermitian symmetry.  The frequency nodes are
//! `0, h, 2h, ...` plus the endpoint `m` when `m` is not a multiple of `h`, so the noise CF
//! can be tabulated once per configuration and reused for every cutoff.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::{check_noise, empirical_cf_uniform, empirical_cf_values, geometric_sums, ProcessCf};
use crate::error::{Error, Result};
use crate::models::{big_jump_intensity, orey_constants, small_jump_drift, ProcessConfig};
use crate::quadrature::{integrate, QuadOptions};
use crate::sampling::IncrementSample;
use crate::special::upper_incomplete_gamma;

/// Largest trapezoid step in frequency.
pub const MAX_U_STEP: f64 = 0.05;
/// Target for the benchmark mass outside the default x-grid.
pub const TAIL_MASS_TARGET: f64 = 1e-4;
/// Sup-norm change below which doubling the benchmark cutoff is considered converged.
pub const ELL_STABILITY: f64 = 1e-6;

const MAX_GAUSSIAN_EXPONENT: f64 = 700.0;
const MAX_X_POINTS: usize = 1 << 16;

/// Uniform evaluation grid `start + k·step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl XGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) || len < 2 {
            return Err(Error::InvalidParams(format!(
                "x-grid needs a finite start, step > 0 and at least 2 points (got {start}, {step}, {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `len` points spanning `[center - half_width, center + half_width]`.
    pub fn centered(center: f64, half_width: f64, len: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidParams(format!("half width must be positive (got {half_width})")));
        }
        if len < 2 {
            return Err(Error::InvalidParams("x-grid needs at least 2 points".into()));
        }
        Self::new(center - half_width, 2.0 * half_width / (len - 1) as f64, len)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.point(k)).collect()
    }

    pub fn end(&self) -> f64 {
        self.point(self.len - 1)
    }

    pub fn max_abs(&self) -> f64 {
        self.start.abs().max(self.end().abs())
    }

    /// Largest frequency step that keeps the inversion free of aliasing on this grid.
    pub fn max_u_step(&self) -> f64 {
        (PI / (4.0 * self.max_abs())).min(MAX_U_STEP)
    }
}

/// Which estimator produced a [`SpectralEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// Divide the empirical CF by the big-jump CF.
    KnownNoise,
    /// Invert the empirical CF directly.
    Direct,
    /// Divide by the big-jump CF times the Gaussian CF.
    GaussianNoise,
    /// Exact small-jump CF.
    Benchmark,
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::KnownNoise => "known-noise",
            EstimatorKind::Direct => "direct",
            EstimatorKind::GaussianNoise => "gaussian-noise",
            EstimatorKind::Benchmark => "benchmark",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "known-noise" => EstimatorKind::KnownNoise,
            "direct" => EstimatorKind::Direct,
            "gaussian-noise" => EstimatorKind::GaussianNoise,
            "benchmark" => EstimatorKind::Benchmark,
            other => {
                return Err(Error::Parse(format!(
                    "unknown estimator '{other}' (expected known-noise, direct or gaussian-noise)"
                )))
            }
        })
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A density estimate on an x-grid together with the CF it was inverted from.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub kind: EstimatorKind,
    pub m: f64,
    /// Trapezoid step of the frequency quadrature.
    pub u_step: f64,
    pub x_grid: XGrid,
    pub values: Vec<f64>,
    /// Frequency nodes in `[0, m]` and the (deconvolved) CF there.
    pub u_nodes: Vec<f64>,
    pub cf_nodes: Vec<Complex64>,
    pub config: ProcessConfig,
    /// Sample size and seed, when the estimate comes from data.
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

impl SpectralEstimate {
    /// `Σ values² Δx` on the grid.
    pub fn l2_norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() * self.x_grid.step
    }

    /// `(1/2π) ∫_{-m}^{m} |φ(u)|² du` by the same trapezoid rule as the inversion.
    pub fn spectral_norm_sq(&self) -> f64 {
        let w = trapezoid_weights(&self.u_nodes);
        w.iter()
            .zip(&self.cf_nodes)
            .map(|(w, c)| w * c.norm_sqr())
            .sum::<f64>()
            / PI
    }

    /// `Σ values Δx` with trapezoid end weights.
    pub fn mass(&self) -> f64 {
        grid_integral(&self.values, self.x_grid.step)
    }

    /// CSV with a metadata header and columns `x,value`.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let p = &c.params;
        let mut s = String::new();
        let _ = writeln!(s, "# smalljumps density estimate");
        let _ = writeln!(s, "# kind={},m={:e},u_step={:e}", self.kind.name(), self.m, self.u_step);
        if let Some(n) = self.n {
            let _ = writeln!(s, "# n={n}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed={seed}");
        }
        let _ = writeln!(
            s,
            "# p={:e},q={:e},a={:e},b={:e},alpha={:e},epsilon={:e},delta={:e},sigma={:e}",
            p.p, p.q, p.a, p.b, p.alpha, c.epsilon, c.delta, c.sigma
        );
        s.push_str("x,value\n");
        for (k, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{:e},{:e}", self.x_grid.point(k), v);
        }
        s
    }
}

/// Trapezoid rule on `[0, m]`: uniform nodes `k h` with `k h ≤ m`, plus `m` itself if needed.
pub fn frequency_nodes(m: f64, h: f64) -> Vec<f64> {
    frequency_nodes_split(m, h).0
}

/// [`frequency_nodes`] and the number of leading nodes on the lattice `k h`.
fn frequency_nodes_split(m: f64, h: f64) -> (Vec<f64>, usize) {
    let k_max = (m / h * (1.0 + 1e-12)).floor() as usize;
    let mut u: Vec<f64> = (0..=k_max).map(|k| k as f64 * h).collect();
    let uniform = u.len();
    let last = u[uniform - 1];
    if m - last > 1e-9 * h {
        u.push(m);
    }
    (u, uniform)
}

/// Trapezoid weights for arbitrary increasing nodes.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let mut w = vec![0.0; nodes.len()];
    for i in 1..nodes.len() {
        let half = 0.5 * (nodes[i] - nodes[i - 1]);
        w[i - 1] += half;
        w[i] += half;
    }
    w
}

fn grid_integral(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    let inner: f64 = values.iter().sum();
    (inner - 0.5 * (values[0] + values[n - 1])) * step
}

/// `(1/π) Re Σ_j w_j φ(u_j) e^{-i u_j x_k}` over the grid.
fn invert_nodes(nodes: &[f64], cf: &[Complex64], grid: &XGrid) -> Vec<f64> {
    let w = trapezoid_weights(nodes);
    let amps: Vec<Complex64> = nodes
        .iter()
        .zip(cf)
        .zip(&w)
        .map(|((&u, &c), &w)| {
            let (s, co) = (-u * grid.start).sin_cos();
            c * Complex64::new(co, s) * w
        })
        .collect();
    let thetas: Vec<f64> = nodes.iter().map(|&u| -u * grid.step).collect();
    geometric_sums(&amps, &thetas, grid.len)
        .into_iter()
        .map(|z| z.re / PI)
        .collect()
}

/// `(1/2π) ∫_{-m}^{m} cf(u) e^{-iux} du` on `grid`, with `cf(-u) = conj cf(u)`.
///
/// The trapezoid step is `min(π/(4 max|x|), 0.05)`.
///
/// ```
/// use smalljumps::estimators::{fourier_invert, XGrid};
/// use num_complex::Complex64;
/// let grid = XGrid::centered(0.0, 5.0, 101).unwrap();
/// let g = fourier_invert(|u| Ok(Complex64::new((-0.5 * u * u).exp(), 0.0)), 40.0, &grid).unwrap();
/// assert!((g[50] - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-6);
/// ```
pub fn fourier_invert<F>(cf: F, m: f64, grid: &XGrid) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    fourier_invert_with_step(cf, m, grid, grid.max_u_step())
}

/// [`fourier_invert`] with an explicit frequency step; warns when it exceeds the aliasing bound.
pub fn fourier_invert_with_step<F>(cf: F, m: f64, grid: &XGrid, h: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("cutoff m must be positive (got {m})")));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("frequency step must be positive (got {h})")));
    }
    if h > grid.max_u_step() * (1.0 + 1e-12) {
        log::warn!(
            "frequency step {h} exceeds the aliasing bound {} for this x-grid",
            grid.max_u_step()
        );
    }
    let nodes = frequency_nodes(m, h);
    let values: Vec<Complex64> = nodes.par_iter().map(|&u| cf(u)).collect::<Result<_>>()?;
    Ok(invert_nodes(&nodes, &values, grid))
}

/// Deconvolution estimator with the noise CF tabulated once for a configuration.
///
/// Reuse one instance across replications; it is `Sync`.
#[derive(Debug, Clone)]
pub struct Deconvolver {
    kind: EstimatorKind,
    config: ProcessConfig,
    cf: ProcessCf,
    grid: XGrid,
    h: f64,
    /// `1 / noise(k h)`.
    inv_noise: Vec<Complex64>,
}

impl Deconvolver {
    /// Prepare `kind` on `grid`, tabulating the noise CF up to `m_max`.
    pub fn new(config: &ProcessConfig, kind: EstimatorKind, grid: &XGrid, m_max: f64) -> Result<Self> {
        config.validate()?;
        if kind == EstimatorKind::Benchmark {
            return Err(Error::InvalidParams("use benchmark_density for the benchmark".into()));
        }
        if kind == EstimatorKind::GaussianNoise && config.sigma <= 0.0 {
            return Err(Error::InvalidParams(
                "the gaussian-noise estimator needs sigma > 0; use known-noise when sigma = 0".into(),
            ));
        }
        let cf = ProcessCf::new(config)?;
        let h = grid.max_u_step();
        let mut d = Self {
            kind,
            config: *config,
            cf,
            grid: *grid,
            h,
            inv_noise: Vec::new(),
        };
        if kind != EstimatorKind::Direct {
            let mut m_max = m_max.max(0.0);
            if kind == EstimatorKind::GaussianNoise {
                // beyond this the Gaussian factor underflows; such cutoffs are rejected anyway
                let s2d = config.sigma * config.sigma * config.delta;
                let room = (MAX_GAUSSIAN_EXPONENT - 20.0 - 2.0 * config.lambda_delta()?).max(0.0);
                m_max = m_max.min((2.0 * room / s2d).sqrt());
            }
            let k_max = (m_max / h).floor() as usize;
            d.inv_noise = (0..=k_max)
                .into_par_iter()
                .map(|k| d.inv_noise_at(k as f64 * h))
                .collect::<Result<_>>()?;
        }
        Ok(d)
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn grid(&self) -> &XGrid {
        &self.grid
    }

    pub fn u_step(&self) -> f64 {
        self.h
    }

    fn noise_at(&self, u: f64) -> Result<Complex64> {
        Ok(match self.kind {
            EstimatorKind::Direct | EstimatorKind::Benchmark => Complex64::new(1.0, 0.0),
            EstimatorKind::KnownNoise => self.cf.big(u)?,
            EstimatorKind::GaussianNoise => self.cf.noise(u)?,
        })
    }

    fn inv_noise_at(&self, u: f64) -> Result<Complex64> {
        let z = self.noise_at(u)?;
        check_noise(u, z)?;
        Ok(1.0 / z)
    }

    /// Smallest admissible cutoff for this estimator.
    pub fn min_cutoff(&self) -> f64 {
        match self.kind {
            EstimatorKind::KnownNoise | EstimatorKind::GaussianNoise => PI / (2.0 * self.config.epsilon),
            _ => 0.0,
        }
    }

    fn check_cutoff(&self, m: f64) -> Result<()> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParams(format!("cutoff m must be positive (got {m})")));
        }
        let threshold = self.min_cutoff();
        if m < threshold * (1.0 - 1e-12) {
            return Err(Error::CutoffBelowThreshold { m, threshold });
        }
        if self.kind == EstimatorKind::GaussianNoise {
            let exponent = 0.5 * self.config.sigma.powi(2) * self.config.delta * m * m;
            if exponent > MAX_GAUSSIAN_EXPONENT {
                return Err(Error::GaussianOverflow { m, exponent });
            }
        }
        Ok(())
    }

    /// Deconvolved empirical CF at the trapezoid nodes of `[0, m]`.
    pub fn deconvolved_nodes(&self, values: &[f64], m: f64) -> Result<(Vec<f64>, Vec<Complex64>)> {
        if values.is_empty() {
            return Err(Error::InvalidParams("sample is empty".into()));
        }
        self.check_cutoff(m)?;
        let (nodes, k_uniform) = frequency_nodes_split(m, self.h);
        let mut cf = empirical_cf_uniform(values, self.h, k_uniform);
        for &u in &nodes[k_uniform..] {
            cf.push(empirical_cf_values(values, u));
        }
        if self.kind != EstimatorKind::Direct {
            for (i, (c, &u)) in cf.iter_mut().zip(&nodes).enumerate() {
                let inv = match self.inv_noise.get(i) {
                    Some(v) if i < k_uniform => *v,
                    _ => self.inv_noise_at(u)?,
                };
                *c *= inv;
            }
        }
        Ok((nodes, cf))
    }

    /// Estimate from raw increments at cutoff `m`.
    pub fn estimate_values(&self, values: &[f64], m: f64) -> Result<SpectralEstimate> {
        let (u_nodes, cf_nodes) = self.deconvolved_nodes(values, m)?;
        let est = invert_nodes(&u_nodes, &cf_nodes, &self.grid);
        Ok(SpectralEstimate {
            kind: self.kind,
            m,
            u_step: self.h,
            x_grid: self.grid,
            values: est,
            u_nodes,
            cf_nodes,
            config: self.config,
            n: Some(values.len()),
            seed: None,
        })
    }

    pub fn estimate(&self, sample: &IncrementSample, m: f64) -> Result<SpectralEstimate> {
        let mut est = self.estimate_values(&sample.values, m)?;
        est.seed = Some(sample.seed);
        Ok(est)
    }
}

/// Known big-jump noise: `φ̂_{Z_Δ} = φ̂_{X_Δ} / φ_{X^B_Δ}`, requires `m ≥ π/(2ε)`.
pub fn estimate_known_noise(sample: &IncrementSample, m: f64, x_grid: &XGrid) -> Result<SpectralEstimate> {
    Deconvolver::new(&sample.config, EstimatorKind::KnownNoise, x_grid, m)?.estimate(sample, m)
}

/// High-frequency estimator: inversion of the empirical CF itself.
pub fn estimate_direct(sample: &IncrementSample, m: f64, x_grid: &XGrid) -> Result<SpectralEstimate> {
    Deconvolver::new(&sample.config, EstimatorKind::Direct, x_grid, 0.0)?.estimate(sample, m)
}

/// Brownian case: divides by `φ_{X^B_Δ}(u) e^{-σ²Δu²/2}`; needs `σ > 0` and `m ≥ π/(2ε)`.
pub fn estimate_gaussian_noise(sample: &IncrementSample, m: f64, x_grid: &XGrid) -> Result<SpectralEstimate> {
    Deconvolver::new(&sample.config, EstimatorKind::GaussianNoise, x_grid, m)?.estimate(sample, m)
}

/// The cutoff ℓ used for the benchmark before any doubling.
pub fn default_benchmark_ell(config: &ProcessConfig) -> f64 {
    match (config.params.is_stable(), config.delta < 1.0) {
        (true, true) => 1000.0,
        (true, false) => 100.0,
        (false, true) => 50.0,
        (false, false) => 10.0,
    }
}

/// Exact-CF benchmark `g_{Δ,ℓ}` (with the `1/(2π)` factor); requires `ε = 1`.
pub fn benchmark_density(config: &ProcessConfig, ell: f64, x_grid: &XGrid) -> Result<SpectralEstimate> {
    let cf = ProcessCf::new(config)?;
    if config.epsilon != 1.0 {
        return Err(Error::UnsupportedThreshold(config.epsilon));
    }
    let h = x_grid.max_u_step();
    let u_nodes = frequency_nodes(ell, h);
    let cf_nodes: Vec<Complex64> = u_nodes.par_iter().map(|&u| cf.small(u)).collect::<Result<_>>()?;
    let values = invert_nodes(&u_nodes, &cf_nodes, x_grid);
    Ok(SpectralEstimate {
        kind: EstimatorKind::Benchmark,
        m: ell,
        u_step: h,
        x_grid: *x_grid,
        values,
        u_nodes,
        cf_nodes,
        config: *config,
        n: None,
        seed: None,
    })
}

/// Benchmark with ℓ doubled from its default until the sup-norm change is below 1e-6.
///
/// Each doubling only adds the band `[ℓ, 2ℓ]`, so the cost is that of the final ℓ.
pub fn benchmark_density_auto(config: &ProcessConfig, x_grid: &XGrid) -> Result<SpectralEstimate> {
    let mut ell = default_benchmark_ell(config);
    let mut est = benchmark_density(config, ell, x_grid)?;
    let cf = ProcessCf::new(config)?;
    let h = est.u_step;
    for _ in 0..16 {
        // Band [ℓ, 2ℓ] on nodes continuing the same uniform lattice.
        let k0 = (ell / h).round() as usize;
        let band_end = 2.0 * ell;
        let mut band: Vec<f64> = frequency_nodes(band_end, h).into_iter().skip(k0).collect();
        if band.is_empty() || (band[0] - ell).abs() > 1e-9 * h {
            band.insert(0, ell);
        }
        let band_cf: Vec<Complex64> = band.par_iter().map(|&u| cf.small(u)).collect::<Result<_>>()?;
        let delta_values = invert_nodes(&band, &band_cf, x_grid);
        let change = delta_values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (v, d) in est.values.iter_mut().zip(&delta_values) {
            *v += d;
        }
        // Keep node list increasing without duplicating the shared endpoint.
        let skip = usize::from(est.u_nodes.last().is_some_and(|&u| (u - band[0]).abs() <= 1e-9 * h));
        est.u_nodes.extend_from_slice(&band[skip..]);
        est.cf_nodes.extend_from_slice(&band_cf[skip..]);
        ell = band_end;
        est.m = ell;
        if change < ELL_STABILITY {
            return Ok(est);
        }
    }
    log::warn!("benchmark cutoff did not stabilize by ell = {ell}");
    Ok(est)
}

/// `E[Z_Δ] = Δ b_ν`, the center of the default grid.
pub fn small_jump_mean(config: &ProcessConfig) -> Result<f64> {
    Ok(config.delta * small_jump_drift(&config.params, config.epsilon)?)
}

/// Smallest `u` with `|φ_{Z_Δ}(u)| ≤ level`.
pub fn cf_effective_support(config: &ProcessConfig, level: f64) -> Result<f64> {
    let cf = ProcessCf::new(config)?;
    let target = level.ln() / config.delta;
    let below = |u: f64| -> Result<bool> { Ok(cf.small_exponent(u)?.re <= target) };
    let mut hi = 1.0;
    while !below(hi)? {
        hi *= 2.0;
        if hi > 1e8 {
            return Ok(hi);
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Characteristic width used to start the default grid: `(ΔM)^{1/α} ∨ Δ^{1/α}`.
pub fn density_scale(config: &ProcessConfig) -> f64 {
    let a = config.params.alpha;
    let base = config.delta.powf(1.0 / a);
    match orey_constants(&config.params, config.epsilon) {
        Ok((m, _)) => (config.delta * m).powf(1.0 / a).max(base),
        Err(_) => base,
    }
}

/// Default x-grid: centered at `E[Z_Δ]`, half-width doubled from `15·scale` until the
/// benchmark mass outside is below 1e-4, step fine enough to resolve `φ_{Z_Δ}` down to 1e-4.
pub fn default_x_grid(config: &ProcessConfig) -> Result<XGrid> {
    let center = small_jump_mean(config)?;
    let u_eff = cf_effective_support(config, TAIL_MASS_TARGET)?;
    let ell = default_benchmark_ell(config);
    let mut half = 15.0 * density_scale(config);
    for _ in 0..40 {
        let grid = grid_for(center, half, u_eff)?;
        if grid.len >= MAX_X_POINTS {
            log::warn!("default x-grid capped at {MAX_X_POINTS} points");
            return Ok(grid);
        }
        let bench = benchmark_density(config, ell, &grid)?;
        if (1.0 - bench.mass()).abs() < TAIL_MASS_TARGET {
            return Ok(grid);
        }
        half *= 2.0;
    }
    Err(Error::InvalidParams("could not find an x-grid holding the benchmark mass".into()))
}

fn grid_for(center: f64, half: f64, u_eff: f64) -> Result<XGrid> {
    let dx = (half / 1024.0).min(PI / (2.0 * u_eff));
    let needed = (2.0 * half / dx).ceil() as usize + 1;
    let len = needed.next_power_of_two().clamp(2048, MAX_X_POINTS);
    XGrid::centered(center, half, len)
}

/// `Σ (est - bench)² Δx / Σ bench² Δx`.
pub fn relative_l2_error(estimate: &SpectralEstimate, benchmark: &SpectralEstimate) -> Result<f64> {
    relative_l2_error_values(&estimate.values, &estimate.x_grid, &benchmark.values, &benchmark.x_grid)
}

pub fn relative_l2_error_values(est: &[f64], est_grid: &XGrid, bench: &[f64], bench_grid: &XGrid) -> Result<f64> {
    if est_grid != bench_grid || est.len() != bench.len() {
        return Err(Error::GridMismatch);
    }
    let denom: f64 = bench.iter().map(|b| b * b).sum::<f64>() * bench_grid.step;
    if !(denom >= 1e-300) {
        return Err(Error::ZeroBenchmark);
    }
    let num: f64 = est.iter().zip(bench).map(|(e, b)| (e - b) * (e - b)).sum::<f64>() * est_grid.step;
    Ok(num / denom)
}

/// Bias and variance bounds at a cutoff and the cutoff minimizing their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub m: f64,
    pub n: usize,
    pub bias_bound: f64,
    pub variance_bound: f64,
    /// `None` when `log n` does not exceed the noise level (see [`optimal_cutoff`]).
    pub m_star: Option<f64>,
    pub orey_m: f64,
    /// `c = 2^{α+1} M / π^α`.
    pub c: f64,
    /// `C = 1 / (2α (2MΔ)^{1/α})`.
    pub big_c: f64,
    pub lambda_delta: f64,
}

/// Bias bound `C Γ(1/α, c Δ m^α)`.
pub fn bias_bound(config: &ProcessConfig, m: f64) -> Result<f64> {
    let (orey_m, a) = orey_constants(&config.params, config.epsilon)?;
    let d = config.delta;
    let big_c = 1.0 / (2.0 * a * (2.0 * orey_m * d).powf(1.0 / a));
    let c = 2f64.powf(a + 1.0) * orey_m / PI.powf(a);
    Ok(big_c * upper_incomplete_gamma(1.0 / a, c * d * m.powf(a))?)
}

/// Variance bound `e^{4λΔ}/(πn) ∫_0^m e^{σ²Δu²} du` (equal to `e^{4λΔ} m/(πn)` for `σ = 0`).
pub fn variance_bound(config: &ProcessConfig, m: f64, n: usize) -> Result<f64> {
    let ld = config.lambda_delta()?;
    let s2d = config.sigma * config.sigma * config.delta;
    let integral = if s2d == 0.0 {
        m
    } else {
        integrate(|u: f64| (s2d * u * u).exp(), 0.0, m, QuadOptions::rel(1e-13))?.value
    };
    Ok((4.0 * ld).exp() * integral / (PI * n as f64))
}

/// Cutoff balancing the bounds.
///
/// Without a Brownian part, `m* = (π/2) ((log n - 4λΔ)/(2MΔ))^{1/α}`.  With `σ > 0`, `m*`
/// solves `σ²Δm² + cΔm^α = log(c_λ n)` with `c_λ = π c C' e^{-4λΔ}` and `C' = Δ C`; the
/// positive root is closed form for `α = 1` and found by bisection otherwise.
pub fn optimal_cutoff(config: &ProcessConfig, n: usize) -> Result<f64> {
    optimal_cutoff_log_n(config, (n as f64).ln())
}

/// [`optimal_cutoff`] for a real-valued `log n`.
pub fn optimal_cutoff_log_n(config: &ProcessConfig, log_n: f64) -> Result<f64> {
    let (orey_m, a) = orey_constants(&config.params, config.epsilon)?;
    let d = config.delta;
    let ld = config.lambda_delta()?;
    let c = 2f64.powf(a + 1.0) * orey_m / PI.powf(a);
    if config.sigma == 0.0 {
        if log_n <= 4.0 * ld {
            return Err(Error::UndefinedCutoff {
                log_n,
                bound: 4.0 * ld,
            });
        }
        return Ok(0.5 * PI * ((log_n - 4.0 * ld) / (2.0 * orey_m * d)).powf(1.0 / a));
    }
    let big_c = d / (2.0 * a * (2.0 * orey_m * d).powf(1.0 / a));
    let rhs = (PI * c * big_c).ln() - 4.0 * ld + log_n;
    if rhs <= 0.0 {
        return Err(Error::UndefinedCutoff {
            log_n,
            bound: 4.0 * ld - (PI * c * big_c).ln(),
        });
    }
    let s2d = config.sigma * config.sigma * d;
    if a == 1.0 {
        let b = c * d;
        return Ok((-b + (b * b + 4.0 * s2d * rhs).sqrt()) / (2.0 * s2d));
    }
    let f = |m: f64| s2d * m * m + c * d * m.powf(a) - rhs;
    let mut hi = (rhs / s2d).sqrt().max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bias bound, variance bound and optimal cutoff for `config` at cutoff `m` and size `n`.
pub fn theoretical_bounds(config: &ProcessConfig, m: f64, n: usize) -> Result<BoundReport> {
    let (orey_m, a) = orey_constants(&config.params, config.epsilon)?;
    let d = config.delta;
    let m_star = match optimal_cutoff(config, n) {
        Ok(v) => Some(v),
        Err(Error::UndefinedCutoff { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(BoundReport {
        m,
        n,
        bias_bound: bias_bound(config, m)?,
        variance_bound: variance_bound(config, m, n)?,
        m_star,
        orey_m,
        c: 2f64.powf(a + 1.0) * orey_m / PI.powf(a),
        big_c: 1.0 / (2.0 * a * (2.0 * orey_m * d).powf(1.0 / a)),
        lambda_delta: big_jump_intensity(&config.params, config.epsilon)? * d,
    })
}

/// Decay bound `e^{-(2^α M/π^α) |u|^α Δ}` on `|φ_{Z_Δ} φ_{X^B_Δ}|` for `|u| ≥ π/(2ε)`.
pub fn cf_decay_bound(config: &ProcessConfig, u: f64) -> Result<f64> {
    let (orey_m, a) = orey_constants(&config.params, config.epsilon)?;
    Ok((-(2f64.powf(a) * orey_m / PI.powf(a)) * u.abs().powf(a) * config.delta).exp())
}

/// Upper bound on `sup g_Δ`: `1/(2ε) + (π/α) Γ(1/α, ΔM/ε^α) / (2 (ΔM)^{1/α})`.
pub fn density_sup_bound(config: &ProcessConfig) -> Result<f64> {
    let (orey_m, a) = orey_constants(&config.params, config.epsilon)?;
    let eps = config.epsilon;
    let dm = config.delta * orey_m;
    Ok(1.0 / (2.0 * eps) + (PI / a) * upper_incomplete_gamma(1.0 / a, dm / eps.powf(a))? / (2.0 * dm.powf(1.0 / a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::TemperedStableParams;

    #[test]
    fn nodes_cover_cutoff() {
        let u = frequency_nodes(1.0, 0.3);
        assert_eq!(u.len(), 5);
        assert_eq!(*u.last().unwrap(), 1.0);
        let u = frequency_nodes(0.9, 0.3);
        assert_eq!(u.len(), 4);
        let w = trapezoid_weights(&u);
        assert!((w.iter().sum::<f64>() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn cauchy_inversion() {
        let grid = XGrid::centered(0.0, 4.0, 81).unwrap();
        let g = fourier_invert(|u| Ok(Complex64::new((-u).exp(), 0.0)), 200.0, &grid).unwrap();
        assert!((g[40] - 1.0 / PI).abs() < 1e-3);
    }

    #[test]
    fn remark_point_gives_pi() {
        // α = 1 and M = 1 need P + Q = 1 with A = B = 0; λ = 1 then.
        let params = TemperedStableParams::stable(0.5, 0.5, 1.0).unwrap();
        let config = ProcessConfig::jumps_only(params, 1.0, 10).unwrap();
        let m = optimal_cutoff_log_n(&config, 8.0).unwrap();
        assert!((m - PI).abs() < 1e-12);
    }
}
