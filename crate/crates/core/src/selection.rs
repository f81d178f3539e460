//! Data-driven cutoff selection by penalized contrast.
//!
//! The contrast of the cutoff-`m` estimator is `γ(m) = -‖ĝ_m‖² = -(1/2π) ∫_{-m}^{m} |φ̂(u)|² du`
//! and the penalty is `κ e^{4λΔ} m / n` (with `m` replaced by `∫_0^m e^{σ²Δu²} du` when the
//! Brownian part is deconvolved too); the selected cutoff minimizes their sum over a geometric
//! grid starting at `π/(2ε)`.
//!
//! The sinc basis `φ_{m,j}(x) = √(m/π) sinc(m x - jπ)` is orthonormal and spans the functions
//! with spectrum in `[-m, m]`; the coefficients of `ĝ_m` in it are `√(π/m) ĝ_m(jπ/m)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfn::{check_noise, empirical_cf_uniform, empirical_cf_values, geometric_sums, ProcessCf};
use crate::error::{Error, Result};
use crate::estimators::{trapezoid_weights, EstimatorKind};
use crate::models::ProcessConfig;
use crate::quadrature::{integrate, QuadOptions};
use crate::sampling::IncrementSample;

/// Frequency step of the contrast quadrature.
pub const SELECTION_STEP: f64 = 0.02;
/// Calibrated penalty constant.
pub const DEFAULT_KAPPA: f64 = 0.9;
/// Ratio between consecutive cutoffs of the default grid.
pub const GRID_RATIO: f64 = 1.01;

/// Largest `σ²Δm² + 4λΔ` for which `|1/noise|²` and the penalty stay finite.
const MAX_NOISE_EXPONENT: f64 = 690.0;

/// `∫_0^m e^{s u²} du` at each of the increasing cutoffs `ms`.
fn variance_integrals(ms: &[f64], s: f64) -> Result<Vec<f64>> {
    if s == 0.0 {
        return Ok(ms.to_vec());
    }
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        acc += integrate(|u: f64| (s * u * u).exp(), prev, m, QuadOptions::rel(1e-12))?.value;
        prev = m;
        out.push(acc);
    }
    Ok(out)
}

/// Smallest penalty constant covered by the oracle inequality, plus a margin.
pub fn theoretical_kappa() -> f64 {
    32.0 / (3.0 * PI) + 1e-6
}

/// Candidate cutoffs, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffGrid {
    pub m_values: Vec<f64>,
}

impl CutoffGrid {
    pub fn new(m_values: Vec<f64>) -> Result<Self> {
        if m_values.is_empty() {
            return Err(Error::EmptyGrid(0));
        }
        if m_values.iter().any(|m| !(*m > 0.0 && m.is_finite())) || m_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("cutoff grid must be positive and strictly increasing".into()));
        }
        Ok(Self { m_values })
    }

    /// `π/(2ε) r^k` for `k = 0, 1, ...` up to `n`.
    pub fn geometric(epsilon: f64, n: usize, ratio: f64) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(Error::InvalidParams(format!("grid ratio must exceed 1 (got {ratio})")));
        }
        let first = PI / (2.0 * epsilon);
        let cap = n as f64;
        if first > cap {
            return Err(Error::EmptyGrid(n));
        }
        let mut m_values = Vec::new();
        let mut k = 0i32;
        loop {
            let m = first * ratio.powi(k);
            if m > cap {
                break;
            }
            m_values.push(m);
            k += 1;
        }
        Ok(Self { m_values })
    }

    /// Geometric grid with ratio 1.01 for this configuration.
    pub fn default_for(config: &ProcessConfig) -> Result<Self> {
        Self::geometric(config.epsilon, config.n, GRID_RATIO)
    }

    pub fn len(&self) -> usize {
        self.m_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_values.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.m_values.last().expect("grid is nonempty")
    }
}

/// `κ e^{4λΔ} m / n`.
pub fn penalty(m: f64, lambda_delta: f64, n: usize, kappa: f64) -> f64 {
    kappa * (4.0 * lambda_delta).exp() * m / n as f64
}

/// `-(1/π) ∫_0^m |φ̂(u)/noise(u)|² du` on the trapezoid nodes `k h` plus `m`.
pub fn contrast_with_step<F>(values: &[f64], m: f64, noise_cf: &F, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let nodes = crate::estimators::frequency_nodes(m, h);
    contrast_on_nodes(values, &nodes, noise_cf)
}

/// `-(1/π) ∫ |φ̂/noise|²` by the trapezoid rule on the given increasing nodes starting at 0.
pub fn contrast_on_nodes<F>(values: &[f64], nodes: &[f64], noise_cf: &F) -> Result<f64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let w = trapezoid_weights(nodes);
    let f: Vec<f64> = nodes
        .par_iter()
        .map(|&u| {
            let z = noise_cf(u);
            check_noise(u, z)?;
            Ok((empirical_cf_values(values, u) / z).norm_sqr())
        })
        .collect::<Result<_>>()?;
    Ok(-w.iter().zip(&f).map(|(w, f)| w * f).sum::<f64>() / PI)
}

/// Contrast `-‖ĝ_m‖²`, halving the step from `min(0.02, π/(4·range))` until the relative change
/// is below 1e-6.
pub fn contrast<F>(sample: &IncrementSample, m: f64, noise_cf: F) -> Result<f64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("cutoff m must be positive (got {m})")));
    }
    // |φ̂|² oscillates at the pairwise differences, up to the sample range.
    let (lo, hi) = sample.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = hi - lo;
    let mut h = SELECTION_STEP.min(m);
    if range > 0.0 {
        h = h.min(PI / (4.0 * range));
    }
    let mut prev = contrast_with_step(&sample.values, m, &noise_cf, h)?;
    for _ in 0..14 {
        h *= 0.5;
        let next = contrast_with_step(&sample.values, m, &noise_cf, h)?;
        if (next - prev).abs() <= 1e-6 * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    log::warn!("contrast at m = {m} did not settle to 1e-6 by step {h:e}");
    Ok(prev)
}

/// One row of a selection trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub m: f64,
    pub contrast: f64,
    pub penalty: f64,
    pub objective: f64,
}

/// Full objective over the grid and the selected cutoff.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionTrace {
    pub rows: Vec<TraceRow>,
    pub m_hat: f64,
    pub index: usize,
    pub kappa: f64,
    pub lambda_delta: f64,
    pub n: usize,
    /// True when `κ` is below the theoretical constant `32/(3π)`.
    pub below_theoretical_kappa: bool,
}

impl SelectionTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# m_hat={:e},kappa={:e},lambda_delta={:e},n={},grid=geometric-1.01",
            self.m_hat, self.kappa, self.lambda_delta, self.n
        );
        s.push_str("m,contrast,penalty,objective\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:e},{:e},{:e},{:e}", r.m, r.contrast, r.penalty, r.objective);
        }
        s
    }
}

/// Precomputed noise weights for repeated selection under one configuration.
///
/// Nodes are the lattice `k·0.02` up to the largest cutoff merged with the grid cutoffs, so
/// the contrast at each grid point is a running trapezoid sum of nonnegative panels.
#[derive(Debug, Clone)]
pub struct SelectionPlan {
    grid: CutoffGrid,
    h: f64,
    n_lattice: usize,
    /// `1/noise` on the lattice and at each grid cutoff.
    lattice_inv: Vec<Complex64>,
    grid_inv: Vec<Complex64>,
    /// `∫_0^m e^{σ²Δu²} du` at each grid cutoff (just `m` without a Brownian part).
    variance_integral: Vec<f64>,
    lambda_delta: f64,
    kappa: f64,
}

impl SelectionPlan {
    /// Plan with an arbitrary noise CF and the linear penalty.
    pub fn with_noise<F>(grid: CutoffGrid, noise_cf: F, lambda_delta: f64, kappa: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        Self::build(grid, noise_cf, lambda_delta, kappa, 0.0)
    }

    fn build<F>(grid: CutoffGrid, noise_cf: F, lambda_delta: f64, kappa: f64, s2d: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParams(format!("kappa must be positive (got {kappa})")));
        }
        if grid.is_empty() {
            return Err(Error::EmptyGrid(0));
        }
        let h = SELECTION_STEP;
        let n_lattice = (grid.max() / h).floor() as usize + 1;
        let inv = |u: f64| -> Result<Complex64> {
            let z = noise_cf(u)?;
            check_noise(u, z)?;
            Ok(1.0 / z)
        };
        let lattice_inv = (0..n_lattice)
            .into_par_iter()
            .map(|k| inv(k as f64 * h))
            .collect::<Result<_>>()?;
        let grid_inv = grid.m_values.par_iter().map(|&m| inv(m)).collect::<Result<_>>()?;
        let variance_integral = variance_integrals(&grid.m_values, s2d)?;
        Ok(Self {
            grid,
            h,
            n_lattice,
            lattice_inv,
            grid_inv,
            variance_integral,
            lambda_delta,
            kappa,
        })
    }

    /// Plan for an estimator kind.
    ///
    /// The direct estimator uses no noise and `λΔ = 0` in the penalty.  The Gaussian
    /// estimator replaces `m` in the penalty by `V(m) = ∫_0^m e^{σ²Δu²} du` and keeps only
    /// cutoffs with `V(m) <= n`, the analogue of `m <= n` for the linear penalty.
    pub fn for_kind(config: &ProcessConfig, kind: EstimatorKind, grid: CutoffGrid, kappa: f64) -> Result<Self> {
        let cf = ProcessCf::new(config)?;
        match kind {
            EstimatorKind::Direct => Self::build(grid, |_| Ok(Complex64::new(1.0, 0.0)), 0.0, kappa, 0.0),
            EstimatorKind::KnownNoise => Self::build(grid, |u| cf.big(u), config.lambda_delta()?, kappa, 0.0),
            EstimatorKind::GaussianNoise => {
                if config.sigma <= 0.0 {
                    return Err(Error::InvalidParams(
                        "the gaussian-noise estimator needs sigma > 0; use known-noise when sigma = 0".into(),
                    ));
                }
                let ld = config.lambda_delta()?;
                let s2d = config.sigma * config.sigma * config.delta;
                let m_cap = ((MAX_NOISE_EXPONENT - 4.0 * ld).max(0.0) / s2d).sqrt();
                let below: Vec<f64> = grid.m_values.iter().copied().filter(|&m| m <= m_cap).collect();
                // Same role as `m <= n` in the linear case: keep the variance term below one.
                let v = variance_integrals(&below, s2d)?;
                let kept: Vec<f64> = below.iter().zip(&v).take_while(|(_, &v)| v <= config.n as f64).map(|(&m, _)| m).collect();
                if kept.is_empty() {
                    return Err(Error::EmptyGrid(config.n));
                }
                Self::build(CutoffGrid::new(kept)?, |u| cf.noise(u), ld, kappa, s2d)
            }
            EstimatorKind::Benchmark => Err(Error::InvalidParams("the benchmark has no cutoff to select".into())),
        }
    }

    /// Penalty at grid index `i` for sample size `n`.
    pub fn penalty_at(&self, i: usize, n: usize) -> f64 {
        penalty(self.variance_integral[i], self.lambda_delta, n, self.kappa)
    }

    /// Lattice step of the contrast quadrature.
    pub fn u_step(&self) -> f64 {
        self.h
    }

    /// Number of lattice nodes `k h`, `k = 0, 1, ...`.
    pub fn lattice_len(&self) -> usize {
        self.n_lattice
    }

    /// Deconvolved empirical CF on the lattice `k h` and at each grid cutoff.
    pub fn deconvolved(&self, values: &[f64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        if values.is_empty() {
            return Err(Error::InvalidParams("sample is empty".into()));
        }
        let mut lattice = empirical_cf_uniform(values, self.h, self.n_lattice);
        for (c, w) in lattice.iter_mut().zip(&self.lattice_inv) {
            *c *= w;
        }
        let at_grid: Vec<Complex64> = self
            .grid
            .m_values
            .par_iter()
            .zip(&self.grid_inv)
            .map(|(&m, w)| empirical_cf_values(values, m) * w)
            .collect();
        Ok((lattice, at_grid))
    }

    /// Running trapezoid integral of `f` over the merged nodes, read off at each grid cutoff.
    pub fn cumulative(&self, lattice: &[f64], at_grid: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.grid.len());
        let mut integral = 0.0;
        let (mut u_prev, mut f_prev) = (0.0, lattice[0]);
        let mut k = 1;
        for (i, &m) in self.grid.m_values.iter().enumerate() {
            while k < self.n_lattice && (k as f64) * self.h < m {
                let u = k as f64 * self.h;
                integral += 0.5 * (u - u_prev) * (f_prev + lattice[k]);
                u_prev = u;
                f_prev = lattice[k];
                k += 1;
            }
            integral += 0.5 * (m - u_prev) * (f_prev + at_grid[i]);
            u_prev = m;
            f_prev = at_grid[i];
            out.push(integral);
        }
        out
    }

    pub fn grid(&self) -> &CutoffGrid {
        &self.grid
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda_delta(&self) -> f64 {
        self.lambda_delta
    }

    /// Contrast at every grid cutoff.
    pub fn contrasts(&self, values: &[f64]) -> Result<Vec<f64>> {
        let (lattice, at_grid) = self.deconvolved(values)?;
        Ok(self.contrasts_from(&lattice, &at_grid))
    }

    /// Contrasts from a deconvolved CF already evaluated by [`SelectionPlan::deconvolved`].
    pub fn contrasts_from(&self, lattice: &[Complex64], at_grid: &[Complex64]) -> Vec<f64> {
        let f: Vec<f64> = lattice.iter().map(|c| c.norm_sqr()).collect();
        let g: Vec<f64> = at_grid.iter().map(|c| c.norm_sqr()).collect();
        self.cumulative(&f, &g).into_iter().map(|v| -v / PI).collect()
    }

    /// Merged trapezoid nodes up to grid cutoff `i` (for checking [`SelectionPlan::contrasts`]).
    pub fn nodes_up_to(&self, i: usize) -> Vec<f64> {
        let m = self.grid.m_values[i];
        let mut nodes: Vec<f64> = (0..self.n_lattice)
            .map(|k| k as f64 * self.h)
            .filter(|&u| u < m)
            .chain(self.grid.m_values[..=i].iter().copied())
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        nodes
    }

    /// Penalized contrast minimization; ties go to the smallest cutoff.
    pub fn select(&self, values: &[f64]) -> Result<SelectionTrace> {
        let contrasts = self.contrasts(values)?;
        Ok(self.trace_from(&contrasts, values.len()))
    }

    /// Selection trace from precomputed contrasts for sample size `n`.
    pub fn trace_from(&self, contrasts: &[f64], n: usize) -> SelectionTrace {
        let mut rows = Vec::with_capacity(contrasts.len());
        let mut best = 0;
        for (i, (&m, &c)) in self.grid.m_values.iter().zip(contrasts).enumerate() {
            let pen = self.penalty_at(i, n);
            rows.push(TraceRow {
                m,
                contrast: c,
                penalty: pen,
                objective: c + pen,
            });
            if rows[i].objective < rows[best].objective {
                best = i;
            }
        }
        SelectionTrace {
            m_hat: rows[best].m,
            index: best,
            rows,
            kappa: self.kappa,
            lambda_delta: self.lambda_delta,
            n,
            below_theoretical_kappa: self.kappa < 32.0 / (3.0 * PI),
        }
    }
}

/// Select `m̂` for one sample: build a plan for `noise_cf` and minimize the penalized contrast.
pub fn select_cutoff<F>(
    sample: &IncrementSample,
    grid: &CutoffGrid,
    noise_cf: F,
    lambda_delta: f64,
    kappa: f64,
) -> Result<(f64, SelectionTrace)>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if kappa < 32.0 / (3.0 * PI) {
        log::info!("kappa = {kappa} is below the theoretical constant 32/(3 pi)");
    }
    let plan = SelectionPlan::with_noise(grid.clone(), noise_cf, lambda_delta, kappa)?;
    let trace = plan.select(&sample.values)?;
    Ok((trace.m_hat, trace))
}

/// Coefficient of `ĝ_m` on `φ_{m,j}`: `(1/(2√(πm))) ∫_{-m}^{m} φ̂(u) e^{-iujπ/m} du`.
///
/// Real because `φ̂` is Hermitian.  Computed by the trapezoid rule with a step resolving
/// both the sample spread and the lattice point `jπ/m`.
pub fn sinc_basis_coefficient<F>(values: &[f64], m: f64, j: i64, noise_cf: F) -> Result<f64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let x = j as f64 * PI / m;
    let spread = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let h = (PI / (4.0 * (spread + x.abs()).max(1e-300))).min(SELECTION_STEP);
    let nodes = crate::estimators::frequency_nodes(m, h);
    let w = trapezoid_weights(&nodes);
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|&u| {
            let z = noise_cf(u);
            check_noise(u, z)?;
            let phi = empirical_cf_values(values, u) / z;
            Ok((phi * Complex64::new(0.0, -u * x).exp()).re)
        })
        .collect::<Result<_>>()?;
    let integral: f64 = w.iter().zip(&terms).map(|(w, t)| w * t).sum();
    Ok(integral / (PI * m).sqrt())
}

/// All coefficients `j = -j_max..=j_max` at once through the Fourier kernel.
pub fn sinc_basis_coefficients<F>(values: &[f64], m: f64, j_max: usize, noise_cf: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let x_step = PI / m;
    let x_start = -(j_max as f64) * x_step;
    let spread = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let h = (PI / (4.0 * (spread + x_start.abs()).max(1e-300))).min(SELECTION_STEP);
    let nodes = crate::estimators::frequency_nodes(m, h);
    let w = trapezoid_weights(&nodes);
    let amps: Vec<Complex64> = nodes
        .par_iter()
        .zip(&w)
        .map(|(&u, &w)| {
            let z = noise_cf(u);
            check_noise(u, z)?;
            let phi = empirical_cf_values(values, u) / z;
            Ok(phi * Complex64::new(0.0, -u * x_start).exp() * w)
        })
        .collect::<Result<_>>()?;
    let thetas: Vec<f64> = nodes.iter().map(|&u| -u * x_step).collect();
    let scale = 1.0 / (PI * m).sqrt();
    Ok(geometric_sums(&amps, &thetas, 2 * j_max + 1)
        .into_iter()
        .map(|z| z.re * scale)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn geometric_grid_bounds() {
        let g = CutoffGrid::geometric(1.0, 100, 1.01).unwrap();
        assert!((g.m_values[0] - PI / 2.0).abs() < 1e-15);
        assert!(g.max() <= 100.0);
        assert!(g.max() * 1.01 > 100.0);
        assert!(matches!(CutoffGrid::geometric(1.0, 1, 1.01), Err(Error::EmptyGrid(1))));
    }

    #[test]
    fn zero_sample_coefficients() {
        let zeros = vec![0.0; 5];
        let m = 7.0;
        let a0 = sinc_basis_coefficient(&zeros, m, 0, one).unwrap();
        assert!((a0 - (m / PI).sqrt()).abs() < 1e-12);
        let a3 = sinc_basis_coefficient(&zeros, m, 3, one).unwrap();
        assert!(a3.abs() < 1e-12);
    }
}
