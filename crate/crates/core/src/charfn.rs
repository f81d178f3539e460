//! Characteristic functions: exact small-jump and big-jump CFs, Gaussian CF, empirical CFs.
//!
//! Writing `z = iu - A`, every exponent is assembled from the two one-sided integrals
//!
//! * `J(z) = ∫_0^1 (e^{zx} - 1 [- zx]) x^{-1-α} dx` (bracket present for `α ≥ 1`),
//! * `T(z) = ∫_1^∞ e^{zx} x^{-1-α} dx`,
//!
//! and the closed-form full-line integral `K(z)` (the stable exponent).
//! For `|z| ≤ 40` the function `J` is computed by adaptive Gauss–Kronrod quadrature after
//! the substitution `x = t^p` that removes the singularity at 0, and `T` follows from
//! `K - J`.  For larger `|z|`, `T` is summed from its asymptotic expansion
//! `-(e^z / z) Σ_k (1+α)_k / z^k` (accurate to about 1e-15 there) and `J` follows from `K - T`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::{ProcessConfig, TemperedStableParams};
use crate::quadrature::{integrate_partition, QuadOptions};
use crate::sampling::IncrementSample;
use crate::special::{gamma, phi1, phi2, EULER_GAMMA};

/// Switch point in `|z|` between the quadrature and the asymptotic route.
pub const ROUTE_SWITCH: f64 = 40.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// How the one-sided exponent integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentRoute {
    /// Quadrature below [`ROUTE_SWITCH`], asymptotic expansion above.
    Auto,
    /// Always adaptive quadrature on `[0, 1]`.
    Quadrature,
    /// Always the closed form combined with the asymptotic tail expansion.
    Asymptotic,
}

/// Stability-index dependent building blocks `K`, `J`, `T`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    alpha: f64,
    gamma_neg_alpha: f64,
}

impl Kernel {
    fn new(alpha: f64) -> Self {
        let gamma_neg_alpha = if alpha == 1.0 { f64::NAN } else { gamma(-alpha) };
        Self {
            alpha,
            gamma_neg_alpha,
        }
    }

    fn compensated(&self) -> bool {
        self.alpha >= 1.0
    }

    /// `∫_0^∞ (e^{wx} - 1 [- w x 1_{x<1 or all x}]) x^{-1-α} dx` for `Re w ≤ 0`.
    fn k(&self, w: Complex64) -> Complex64 {
        if w == ZERO {
            return ZERO;
        }
        if self.alpha == 1.0 {
            -w * (-w).ln() + w * (1.0 - EULER_GAMMA)
        } else {
            (-w).powf(self.alpha) * self.gamma_neg_alpha
        }
    }

    /// Correction so that `J = K - T + corr` and `T = K - J + corr`.
    fn corr(&self, w: Complex64) -> Complex64 {
        let a = self.alpha;
        if a < 1.0 {
            Complex64::new(1.0 / a, 0.0)
        } else if a == 1.0 {
            ONE
        } else {
            w / (a - 1.0) + 1.0 / a
        }
    }

    fn j_quadrature(&self, w: Complex64) -> Result<Complex64> {
        if w == ZERO {
            return Ok(ZERO);
        }
        let a = self.alpha;
        // x = t^p with p chosen so that the transformed integrand is bounded at t = 0.
        let (p, power) = if self.compensated() {
            let p = (1.0 / (2.0 - a)).min(10.0);
            (p, p * (2.0 - a) - 1.0)
        } else {
            let p = (1.0 / (1.0 - a)).min(10.0);
            (p, p * (1.0 - a) - 1.0)
        };
        let comp = self.compensated();
        let f = |t: f64| -> Complex64 {
            let x = t.powf(p);
            let jac = p * if power == 0.0 { 1.0 } else { t.powf(power) };
            if comp {
                w * w * phi2(w * x) * jac
            } else {
                w * phi1(w * x) * jac
            }
        };
        let panels = (w.norm() / 2.0).ceil().max(4.0) as usize;
        let pts: Vec<f64> = (0..=panels).map(|k| k as f64 / panels as f64).collect();
        let opts = QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_intervals: 4000,
        };
        integrate_partition(f, &pts, opts)
            .map(|r| r.value)
            .map_err(|e| match e {
                Error::Quadrature { value, error, .. } => Error::Quadrature {
                    context: format!("small-jump exponent at |z| = {:.4}", w.norm()),
                    value,
                    error,
                },
                other => other,
            })
    }

    /// `T(w) = ∫_1^∞ e^{wx} x^{-1-α} dx` by its asymptotic series (valid for large `|w|`).
    fn t_asymptotic(&self, w: Complex64) -> Complex64 {
        let s = 1.0 + self.alpha;
        let inv = 1.0 / w;
        let mut term = ONE;
        let mut sum = ONE;
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            term *= inv * (s + k as f64);
            let mag = term.norm();
            if mag > prev {
                break;
            }
            sum += term;
            if mag < 1e-17 * sum.norm() {
                break;
            }
            prev = mag;
        }
        -(w.exp() * inv) * sum
    }

    fn j(&self, w: Complex64, route: ExponentRoute) -> Result<Complex64> {
        if use_asymptotic(w, route) {
            Ok(self.k(w) - self.t_asymptotic(w) + self.corr(w))
        } else {
            self.j_quadrature(w)
        }
    }

    fn t(&self, w: Complex64, route: ExponentRoute) -> Result<Complex64> {
        if use_asymptotic(w, route) {
            Ok(self.t_asymptotic(w))
        } else {
            Ok(self.k(w) - self.j_quadrature(w)? + self.corr(w))
        }
    }
}

fn use_asymptotic(w: Complex64, route: ExponentRoute) -> bool {
    match route {
        ExponentRoute::Auto => w.norm() > ROUTE_SWITCH,
        ExponentRoute::Quadrature => false,
        ExponentRoute::Asymptotic => true,
    }
}

/// One side (`x > 0`) of the tempered density with weight `w` and tempering `rate`.
#[derive(Debug, Clone, Copy)]
struct Side {
    weight: f64,
    rate: f64,
    j_rate: Complex64,
    t_rate: Complex64,
    drift_corr: f64,
}

impl Side {
    fn new(kernel: &Kernel, weight: f64, rate: f64) -> Result<Self> {
        let w = Complex64::new(-rate, 0.0);
        let (j_rate, t_rate) = if weight == 0.0 {
            (ZERO, ZERO)
        } else {
            (kernel.j(w, ExponentRoute::Auto)?, kernel.t(w, ExponentRoute::Auto)?)
        };
        let drift_corr = if weight != 0.0 && kernel.compensated() && rate > 0.0 {
            // ∫_0^1 (1 - e^{-rate x}) x^{-α} dx with x = t^p, p = 1/(2-α)
            let a = kernel.alpha;
            let p = 1.0 / (2.0 - a);
            let f = |t: f64| {
                let x = t.powf(p);
                p * (-(-rate * x).exp_m1()) / x
            };
            integrate_partition(f, &[0.0, 0.5, 1.0], QuadOptions::rel(1e-13))?.value
        } else {
            0.0
        };
        Ok(Self {
            weight,
            rate,
            j_rate,
            t_rate,
            drift_corr,
        })
    }

    /// `∫_0^1 (e^{iux} - 1 [- iux]) e^{-rate x} x^{-1-α} dx` for `u ≥ 0`.
    fn small(&self, kernel: &Kernel, u: f64, route: ExponentRoute) -> Result<Complex64> {
        if u == 0.0 || self.weight == 0.0 {
            return Ok(ZERO);
        }
        let z = Complex64::new(-self.rate, u);
        if !use_asymptotic(z, route) {
            return self.small_direct(kernel, u);
        }
        // e^{iux} - 1 - iux times e^{-rate x} equals
        // (e^{zx} - 1 - zx) - (e^{-rate x} - 1 + rate x) + iux (1 - e^{-rate x}).
        let base = kernel.j(z, route)? - self.j_rate;
        Ok(if kernel.compensated() {
            base + I * u * self.drift_corr
        } else {
            base
        })
    }

    /// Direct quadrature of the one-sided small-jump integral.
    fn small_direct(&self, kernel: &Kernel, u: f64) -> Result<Complex64> {
        let iu = Complex64::new(0.0, u);
        let a = kernel.alpha;
        let rate = self.rate;
        let comp = kernel.compensated();
        let (p, power) = if comp {
            let p = (1.0 / (2.0 - a)).min(10.0);
            (p, p * (2.0 - a) - 1.0)
        } else {
            let p = (1.0 / (1.0 - a)).min(10.0);
            (p, p * (1.0 - a) - 1.0)
        };
        let f = |t: f64| -> Complex64 {
            let x = t.powf(p);
            let jac = p * if power == 0.0 { 1.0 } else { t.powf(power) };
            let damp = (-rate * x).exp();
            if comp {
                iu * iu * phi2(iu * x) * (damp * jac)
            } else {
                iu * phi1(iu * x) * (damp * jac)
            }
        };
        let panels = (u / 2.0).ceil().max(4.0) as usize;
        let pts: Vec<f64> = (0..=panels).map(|k| k as f64 / panels as f64).collect();
        let opts = QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 1e-15,
            max_intervals: 4000,
        };
        integrate_partition(f, &pts, opts)
            .map(|r| r.value)
            .map_err(|e| match e {
                Error::Quadrature { value, error, .. } => Error::Quadrature {
                    context: format!("small-jump exponent at u = {u}"),
                    value,
                    error,
                },
                other => other,
            })
    }

    /// `∫_1^∞ (e^{iux} - 1) e^{-rate x} x^{-1-α} dx` for `u ≥ 0`.
    fn big(&self, kernel: &Kernel, u: f64, route: ExponentRoute) -> Result<Complex64> {
        if u == 0.0 || self.weight == 0.0 {
            return Ok(ZERO);
        }
        let z = Complex64::new(-self.rate, u);
        Ok(kernel.t(z, route)? - self.t_rate)
    }
}

/// Lévy–Khintchine exponents of a tempered stable density with threshold 1.
#[derive(Debug, Clone, Copy)]
pub struct LevyExponent {
    kernel: Kernel,
    pos: Side,
    neg: Side,
}

impl LevyExponent {
    pub fn new(params: &TemperedStableParams) -> Result<Self> {
        params.validate()?;
        let kernel = Kernel::new(params.alpha);
        Ok(Self {
            kernel,
            pos: Side::new(&kernel, params.p, params.a)?,
            neg: Side::new(&kernel, params.q, params.b)?,
        })
    }

    fn combine<F>(&self, u: f64, f: F) -> Result<Complex64>
    where
        F: Fn(&Side, f64) -> Result<Complex64>,
    {
        let v = u.abs();
        let pos = f(&self.pos, v)?;
        let neg = f(&self.neg, v)?;
        let total = pos * self.pos.weight + neg.conj() * self.neg.weight;
        Ok(if u < 0.0 { total.conj() } else { total })
    }

    /// Small-jump exponent `ψ_Z(u)` so that `φ_{Z_Δ}(u) = exp(Δ ψ_Z(u))`.
    pub fn small(&self, u: f64) -> Result<Complex64> {
        self.small_with(u, ExponentRoute::Auto)
    }

    pub fn small_with(&self, u: f64, route: ExponentRoute) -> Result<Complex64> {
        self.combine(u, |s, v| s.small(&self.kernel, v, route))
    }

    /// Big-jump exponent `∫_{|x|>1} (e^{iux} - 1) p(x) dx`.
    pub fn big(&self, u: f64) -> Result<Complex64> {
        self.big_with(u, ExponentRoute::Auto)
    }

    pub fn big_with(&self, u: f64, route: ExponentRoute) -> Result<Complex64> {
        self.combine(u, |s, v| s.big(&self.kernel, v, route))
    }
}

/// All CFs of one [`ProcessConfig`], with the exponent constants computed once.
#[derive(Debug, Clone, Copy)]
pub struct ProcessCf {
    config: ProcessConfig,
    unit: Option<LevyExponent>,
    scaled: LevyExponent,
}

impl ProcessCf {
    pub fn new(config: &ProcessConfig) -> Result<Self> {
        config.validate()?;
        let eps = config.epsilon;
        let unit = if eps == 1.0 {
            Some(LevyExponent::new(&config.params)?)
        } else {
            None
        };
        // ∫_{|x|>ε} (e^{iux}-1) p = ε^{-α} ∫_{|y|>1} (e^{iuεy}-1) p_ε(y) with rates scaled by ε.
        let mut scaled_params = config.params;
        scaled_params.a *= eps;
        scaled_params.b *= eps;
        let scaled = match unit {
            Some(u) if eps == 1.0 => u,
            _ => LevyExponent::new(&scaled_params)?,
        };
        Ok(Self {
            config: *config,
            unit,
            scaled,
        })
    }

    pub fn config(&self) -> &ProcessConfig {
        &self.config
    }

    fn unit(&self) -> Result<&LevyExponent> {
        self.unit
            .as_ref()
            .ok_or(Error::UnsupportedThreshold(self.config.epsilon))
    }

    pub fn small_exponent(&self, u: f64) -> Result<Complex64> {
        self.unit()?.small(u)
    }

    pub fn big_exponent(&self, u: f64) -> Result<Complex64> {
        let eps = self.config.epsilon;
        Ok(self.scaled.big(u * eps)? * eps.powf(-self.config.params.alpha))
    }

    /// `φ_{Z_Δ}(u)`.
    pub fn small(&self, u: f64) -> Result<Complex64> {
        Ok((self.small_exponent(u)? * self.config.delta).exp())
    }

    /// `φ_{X^B_Δ}(u)`.
    pub fn big(&self, u: f64) -> Result<Complex64> {
        Ok((self.big_exponent(u)? * self.config.delta).exp())
    }

    pub fn gaussian(&self, u: f64) -> f64 {
        cf_gaussian(self.config.sigma, self.config.delta, u)
    }

    /// Noise CF divided out by the deconvolution estimators: big jumps times Gaussian.
    pub fn noise(&self, u: f64) -> Result<Complex64> {
        Ok(self.big(u)? * self.gaussian(u))
    }

    /// CF of the whole increment `X_Δ`.
    pub fn process(&self, u: f64) -> Result<Complex64> {
        let e = self.small_exponent(u)? + self.big_exponent(u)?;
        Ok((e * self.config.delta).exp() * self.gaussian(u))
    }
}

/// Exact CF of the small-jump part `Z_Δ = Δ b_ν + X^S_Δ` (requires `ε = 1`).
pub fn cf_small_jumps(config: &ProcessConfig, u: f64) -> Result<Complex64> {
    if config.epsilon != 1.0 {
        return Err(Error::UnsupportedThreshold(config.epsilon));
    }
    ProcessCf::new(config)?.small(u)
}

/// CF of the compound Poisson big-jump part `X^B_Δ`.
pub fn cf_big_jumps(config: &ProcessConfig, u: f64) -> Result<Complex64> {
    ProcessCf::new(config)?.big(u)
}

/// `e^{-σ² Δ u² / 2}`.
pub fn cf_gaussian(sigma: f64, delta: f64, u: f64) -> f64 {
    (-0.5 * sigma * sigma * delta * u * u).exp()
}

/// `(1/n) Σ_j e^{i u x_j}`.
pub fn empirical_cf(sample: &IncrementSample, u: f64) -> Complex64 {
    empirical_cf_values(&sample.values, u)
}

pub fn empirical_cf_values(values: &[f64], u: f64) -> Complex64 {
    if u == 0.0 {
        return ONE;
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in values {
        let (s, c) = (u * x).sin_cos();
        re += c;
        im += s;
    }
    Complex64::new(re, im) / values.len() as f64
}

/// Empirical CF divided by a noise CF.
pub fn deconvolved_cf<F: Fn(f64) -> Complex64>(sample: &IncrementSample, u: f64, noise_cf: F) -> Result<Complex64> {
    let noise = noise_cf(u);
    check_noise(u, noise)?;
    Ok(empirical_cf(sample, u) / noise)
}

pub(crate) fn check_noise(u: f64, noise: Complex64) -> Result<()> {
    let modulus = noise.norm();
    if !(modulus >= 1e-300) {
        return Err(Error::NearZeroDivision { u, modulus });
    }
    Ok(())
}

/// A CF tabulated on a frequency grid symmetric about 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CfGrid {
    pub u_values: Vec<f64>,
    pub cf_values: Vec<Complex64>,
}

impl CfGrid {
    /// Tabulate `f` on `{-k h, ..., 0, ..., k h}` with `k h ≤ u_max`, evaluating only `u ≥ 0`.
    pub fn symmetric<F>(u_max: f64, step: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        if !(step > 0.0 && u_max >= 0.0) {
            return Err(Error::InvalidParams("CfGrid needs step > 0 and u_max >= 0".into()));
        }
        let k = (u_max / step + 1e-9).floor() as usize;
        let half: Vec<Complex64> = (0..=k)
            .into_par_iter()
            .map(|i| f(i as f64 * step))
            .collect::<Result<_>>()?;
        let mut u_values = Vec::with_capacity(2 * k + 1);
        let mut cf_values = Vec::with_capacity(2 * k + 1);
        for i in (1..=k).rev() {
            u_values.push(-(i as f64) * step);
            cf_values.push(half[i].conj());
        }
        for (i, v) in half.iter().enumerate() {
            u_values.push(i as f64 * step);
            cf_values.push(*v);
        }
        Ok(Self { u_values, cf_values })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("u,re,im\n");
        for (u, v) in self.u_values.iter().zip(&self.cf_values) {
            s.push_str(&format!("{u:.17e},{:.17e},{:.17e}\n", v.re, v.im));
        }
        s
    }
}

const BLOCK: usize = 512;
const LANES: usize = 8;

/// Work (terms times outputs) above which [`geometric_sums`] switches to the NUFFT.
const NUFFT_WORK: usize = 1 << 22;
/// Half-width of the Gaussian spreading stencil; truncation and aliasing errors are below 1e-14.
const NUFFT_SPREAD: usize = 16;

/// `out[i] = Σ_j amps[j] e^{i·i·θ_j}` for `i = 0..len`.
///
/// Small problems go through [`geometric_sums_direct`]; large ones through a type-1
/// non-uniform FFT with Gaussian gridding, accurate to about 1e-14 relative to `Σ|amps|`.
/// Both paths are deterministic and independent of the number of threads.
pub fn geometric_sums(amps: &[Complex64], thetas: &[f64], len: usize) -> Vec<Complex64> {
    assert_eq!(amps.len(), thetas.len());
    if amps.len() > 64 && len > 1024 && amps.len().saturating_mul(len) > NUFFT_WORK {
        geometric_sums_nufft(amps, thetas, len)
    } else {
        geometric_sums_direct(amps, thetas, len)
    }
}

/// Direct evaluation of [`geometric_sums`].
///
/// Uses a rotation recurrence within blocks of 512 outputs, re-seeded from `sin_cos` at the
/// start of each block; the summation order over `j` is fixed.
pub fn geometric_sums_direct(amps: &[Complex64], thetas: &[f64], len: usize) -> Vec<Complex64> {
    assert_eq!(amps.len(), thetas.len());
    let mut out = vec![ZERO; len];
    if len == 0 || amps.is_empty() {
        return out;
    }
    // Per-term lane offsets e^{i l θ} and block step e^{i LANES θ}.
    let mut rot_re = vec![[0.0; LANES]; thetas.len()];
    let mut rot_im = vec![[0.0; LANES]; thetas.len()];
    let mut step = vec![(0.0, 0.0); thetas.len()];
    for (j, &th) in thetas.iter().enumerate() {
        for l in 0..LANES {
            let (s, c) = (l as f64 * th).sin_cos();
            rot_re[j][l] = c;
            rot_im[j][l] = s;
        }
        let (s, c) = (LANES as f64 * th).sin_cos();
        step[j] = (c, s);
    }
    let ctx = KernelCtx {
        amps,
        thetas,
        rot_re: &rot_re,
        rot_im: &rot_im,
        step: &step,
    };
    out.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        ctx.block(b * BLOCK, chunk);
    });
    out
}

struct KernelCtx<'a> {
    amps: &'a [Complex64],
    thetas: &'a [f64],
    rot_re: &'a [[f64; LANES]],
    rot_im: &'a [[f64; LANES]],
    step: &'a [(f64, f64)],
}

impl KernelCtx<'_> {
    fn block(&self, k0: usize, chunk: &mut [Complex64]) {
        #[cfg(target_arch = "x86_64")]
        {
            if std::arch::is_x86_feature_detected!("avx2") {
                // SAFETY: the CPU supports AVX2, checked just above.
                unsafe { self.block_avx2(k0, chunk) };
                return;
            }
        }
        self.block_generic(k0, chunk);
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn block_avx2(&self, k0: usize, chunk: &mut [Complex64]) {
        self.block_generic(k0, chunk);
    }

    #[inline(always)]
    fn block_generic(&self, k0: usize, chunk: &mut [Complex64]) {
        let mut acc_re = [0.0f64; BLOCK];
        let mut acc_im = [0.0f64; BLOCK];
        let steps = chunk.len().div_ceil(LANES);
        for j in 0..self.amps.len() {
            let (s, c) = (k0 as f64 * self.thetas[j]).sin_cos();
            let z0 = self.amps[j] * Complex64::new(c, s);
            let mut zr = [0.0f64; LANES];
            let mut zi = [0.0f64; LANES];
            let rr = &self.rot_re[j];
            let ri = &self.rot_im[j];
            for l in 0..LANES {
                zr[l] = z0.re * rr[l] - z0.im * ri[l];
                zi[l] = z0.re * ri[l] + z0.im * rr[l];
            }
            let (wr, wi) = self.step[j];
            for st in 0..steps {
                let ar = &mut acc_re[st * LANES..st * LANES + LANES];
                let ai = &mut acc_im[st * LANES..st * LANES + LANES];
                for l in 0..LANES {
                    ar[l] += zr[l];
                    ai[l] += zi[l];
                }
                for l in 0..LANES {
                    let nr = zr[l] * wr - zi[l] * wi;
                    let ni = zr[l] * wi + zi[l] * wr;
                    zr[l] = nr;
                    zi[l] = ni;
                }
            }
        }
        for (i, v) in chunk.iter_mut().enumerate() {
            *v = Complex64::new(acc_re[i], acc_im[i]);
        }
    }
}

/// Type-1 NUFFT evaluation of [`geometric_sums`] (Greengard–Lee Gaussian gridding).
pub fn geometric_sums_nufft(amps: &[Complex64], thetas: &[f64], len: usize) -> Vec<Complex64> {
    use std::f64::consts::{PI, TAU};
    assert_eq!(amps.len(), thetas.len());
    if len == 0 {
        return Vec::new();
    }
    // Outputs i = k + shift with k in [-M/2, M/2).
    let m = len + len % 2;
    let shift = m / 2;
    let mr = 2 * m;
    let msp = NUFFT_SPREAD;
    let tau = PI * msp as f64 / (3.0 * (m * m) as f64);
    let hg = TAU / mr as f64;
    let mut grid = vec![ZERO; mr];
    for (&a, &th) in amps.iter().zip(thetas) {
        let th = th.rem_euclid(TAU);
        let (s, c) = (shift as f64 * th).sin_cos();
        let a = a * Complex64::new(c, s);
        let l0 = (th / hg).floor() as isize;
        for l in (l0 - msp as isize + 1)..=(l0 + msp as isize) {
            let d = th - l as f64 * hg;
            let w = (-d * d / (4.0 * tau)).exp();
            grid[l.rem_euclid(mr as isize) as usize] += a * w;
        }
    }
    let mut planner = rustfft::FftPlanner::new();
    planner.plan_fft_inverse(mr).process(&mut grid);
    let scale = (PI / tau).sqrt() / mr as f64;
    (0..len)
        .map(|i| {
            let k = i as isize - shift as isize;
            let kf = k as f64;
            grid[k.rem_euclid(mr as isize) as usize] * (scale * (kf * kf * tau).exp())
        })
        .collect()
}

/// Empirical CF on the uniform grid `u_k = k h`, `k = 0..len`.
pub fn empirical_cf_uniform(values: &[f64], h: f64, len: usize) -> Vec<Complex64> {
    let amps = vec![ONE; values.len()];
    let thetas: Vec<f64> = values.iter().map(|&x| h * x).collect();
    let n = values.len() as f64;
    let mut out = geometric_sums(&amps, &thetas, len);
    for v in out.iter_mut() {
        *v /= n;
    }
    if let Some(first) = out.first_mut() {
        *first = ONE;
    }
    out
}
