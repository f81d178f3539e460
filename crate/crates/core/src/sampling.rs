//! Seeded samplers for increments of stable and tempered stable Lévy processes.
//!
//! Every sampler is a pure function of `(config, seed)`: the generator is ChaCha8 seeded from
//! `seed.seed` on stream `seed.stream`, so Monte Carlo replication `r` uses stream `r` and results
//! do not depend on scheduling.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    second_moment_below, signed_first_moment, tail_intensity, ProcessConfig, StableLaw, TemperedStableParams,
};
use crate::quadrature::{gauss_kronrod_15, power_exp_integral};

/// Seed plus stream index of the ChaCha8 generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub seed: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }
}

/// Options of the compound Poisson approximation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpOptions {
    /// Jumps with `|x| ≤ trunc_eta` are replaced by their mean (and optionally a Gaussian).
    pub trunc_eta: f64,
    /// Add a centered Gaussian with the variance of the discarded jumps.
    pub gaussian_matching: bool,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self {
            trunc_eta: 1e-3,
            gaussian_matching: true,
        }
    }
}

/// Which generator produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Stable,
    CompoundPoisson,
    BigJumps,
    SmallJumps,
    External,
}

impl SamplerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::Stable => "stable-cms",
            SamplerKind::CompoundPoisson => "compound-poisson",
            SamplerKind::BigJumps => "big-jumps",
            SamplerKind::SmallJumps => "small-jumps",
            SamplerKind::External => "external",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "stable-cms" => SamplerKind::Stable,
            "compound-poisson" => SamplerKind::CompoundPoisson,
            "big-jumps" => SamplerKind::BigJumps,
            "small-jumps" => SamplerKind::SmallJumps,
            "external" => SamplerKind::External,
            other => return Err(Error::Parse(format!("unknown sampler '{other}'"))),
        })
    }
}

/// `n` i.i.d. increments together with the configuration and seed that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSample {
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub config: ProcessConfig,
    pub sampler: SamplerKind,
    pub cp: Option<CpOptions>,
}

impl IncrementSample {
    /// Wrap externally obtained increments.
    pub fn from_values(values: Vec<f64>, config: ProcessConfig) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParams("sample is empty".into()));
        }
        let config = config.with_n(values.len());
        Ok(Self {
            values,
            seed: 0,
            stream: 0,
            config,
            sampler: SamplerKind::External,
            cp: None,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with a `#`-prefixed metadata header and one value per line.
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let p = &c.params;
        let mut s = String::new();
        let _ = writeln!(s, "# smalljumps increment sample");
        let _ = writeln!(
            s,
            "# p={:e},q={:e},a={:e},b={:e},alpha={:e},epsilon={:e},delta={:e},sigma={:e},n={}",
            p.p, p.q, p.a, p.b, p.alpha, c.epsilon, c.delta, c.sigma, c.n
        );
        let _ = writeln!(s, "# seed={}", self.seed);
        let _ = writeln!(s, "# stream={}", self.stream);
        let _ = writeln!(s, "# sampler={}", self.sampler.name());
        if let Some(cp) = self.cp {
            let _ = writeln!(s, "# trunc_eta={:e}", cp.trunc_eta);
            let _ = writeln!(s, "# gaussian_matching={}", cp.gaussian_matching);
        }
        s.push_str("value\n");
        for v in &self.values {
            let _ = writeln!(s, "{v:e}");
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parse the format written by [`IncrementSample::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut fields = std::collections::BTreeMap::new();
        for line in text.lines().filter(|l| l.starts_with('#')) {
            for part in line.trim_start_matches('#').split(',') {
                if let Some((k, v)) = part.trim().split_once('=') {
                    fields.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
        }
        let get = |k: &str| -> Result<f64> {
            fields
                .get(k)
                .ok_or_else(|| Error::Parse(format!("missing header field '{k}'")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("field '{k}': {e}")))
        };
        let get_u64 = |k: &str| -> Result<u64> {
            fields.get(k).map_or(Ok(0), |v| {
                v.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("field '{k}': {e}")))
            })
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let mut values = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let v: f64 = rec
                .get(0)
                .ok_or_else(|| Error::Parse("empty record".into()))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("value: {e}")))?;
            values.push(v);
        }
        let params = TemperedStableParams::new(get("p")?, get("q")?, get("a")?, get("b")?, get("alpha")?)?;
        let config = ProcessConfig::new(params, get("epsilon")?, get("delta")?, get("sigma")?, values.len().max(1))?;
        let cp = match fields.get("trunc_eta") {
            Some(_) => Some(CpOptions {
                trunc_eta: get("trunc_eta")?,
                gaussian_matching: fields.get("gaussian_matching").map(|s| s == "true").unwrap_or(true),
            }),
            None => None,
        };
        if values.is_empty() {
            return Err(Error::Parse("sample file has no values".into()));
        }
        Ok(Self {
            values,
            seed: get_u64("seed")?,
            stream: get_u64("stream")?,
            config,
            sampler: fields
                .get("sampler")
                .map(|s| SamplerKind::parse(s))
                .transpose()?
                .unwrap_or(SamplerKind::External),
            cp,
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Poisson variate: inversion for small means, `rand_distr` otherwise.
pub fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean <= 30.0 {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-mean).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                break;
            }
        }
        k
    } else {
        let d = Poisson::new(mean).expect("positive finite mean");
        d.sample(rng) as u64
    }
}

/// Standard variate of `S(α, β, 1, 0)` by the Chambers–Mallows–Stuck transform.
pub fn standard_stable<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    let v = PI * (rng.sample::<f64, _>(Open01) - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        let a = FRAC_PI_2 + beta * v;
        FRAC_2_PI * (a * v.tan() - beta * ((FRAC_PI_2 * w * v.cos()) / a).ln())
    } else {
        let t = beta * (FRAC_PI_2 * alpha).tan();
        let b = t.atan() / alpha;
        let s = (1.0 + t * t).powf(0.5 / alpha);
        let av = alpha * (v + b);
        s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
    }
}

/// Variate of a general stable law.
pub fn stable_variate<R: Rng + ?Sized>(rng: &mut R, law: &StableLaw) -> f64 {
    let x = standard_stable(rng, law.alpha, law.beta);
    if law.alpha == 1.0 {
        law.scale * x + FRAC_2_PI * law.beta * law.scale * law.scale.ln() + law.shift
    } else {
        law.scale * x + law.shift
    }
}

/// Exact increments of the untempered stable process.
pub fn sample_stable_increments(config: &ProcessConfig, seed: impl Into<Seed>) -> Result<IncrementSample> {
    config.validate()?;
    if !config.params.is_stable() {
        return Err(Error::InvalidParams(
            "exact stable sampler requires A = B = 0; use the compound Poisson sampler".into(),
        ));
    }
    let seed = seed.into();
    let law = StableLaw::from_params(&config.params)?.at_time(config.delta);
    let mut rng = seed.rng();
    let values = (0..config.n).map(|_| stable_variate(&mut rng, &law)).collect();
    Ok(IncrementSample {
        values,
        seed: seed.seed,
        stream: seed.stream,
        config: *config,
        sampler: SamplerKind::Stable,
        cp: None,
    })
}

/// Jump sizes on `(lo, hi]` of one side, drawn from `x^{-1-α} e^{-rate x}` by rejection
/// against the truncated Pareto law.
#[derive(Debug, Clone, Copy)]
struct JumpSide {
    weight: f64,
    rate: f64,
    alpha: f64,
    lo: f64,
    lo_pow: f64,
    span_pow: f64,
    intensity: f64,
}

impl JumpSide {
    fn new(weight: f64, rate: f64, alpha: f64, lo: f64, hi: f64) -> Result<Self> {
        let intensity = if weight == 0.0 {
            0.0
        } else {
            weight * power_exp_integral(-1.0 - alpha, rate, lo, hi, 1e-12)?
        };
        let lo_pow = lo.powf(-alpha);
        let hi_pow = if hi.is_infinite() { 0.0 } else { hi.powf(-alpha) };
        Ok(Self {
            weight,
            rate,
            alpha,
            lo,
            lo_pow,
            span_pow: lo_pow - hi_pow,
            intensity,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.sample(Open01);
            let x = (self.lo_pow - u * self.span_pow).powf(-1.0 / self.alpha);
            if self.rate == 0.0 {
                return x;
            }
            let accept: f64 = rng.random();
            if accept < (-self.rate * (x - self.lo)).exp() {
                return x;
            }
        }
    }

    fn sum_over_step<R: Rng + ?Sized>(&self, rng: &mut R, delta: f64) -> f64 {
        if self.weight == 0.0 {
            return 0.0;
        }
        let count = poisson(rng, self.intensity * delta);
        let mut s = 0.0;
        for _ in 0..count {
            s += self.draw(rng);
        }
        s
    }
}

/// Compound Poisson approximation of the jumps with `lo < |x| ≤ hi` plus drift and Gaussian.
struct CpGenerator {
    pos: JumpSide,
    neg: JumpSide,
    drift: f64,
    gauss_sd: f64,
    delta: f64,
}

impl CpGenerator {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut x = self.pos.sum_over_step(rng, self.delta) - self.neg.sum_over_step(rng, self.delta) + self.drift;
        if self.gauss_sd > 0.0 {
            let g: f64 = rng.sample(StandardNormal);
            x += self.gauss_sd * g;
        }
        x
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParams(format!("trunc_eta must be positive (got {eta})")));
    }
    Ok(())
}

fn cp_generator(config: &ProcessConfig, lo: f64, hi: f64, opts: &CpOptions) -> Result<CpGenerator> {
    let p = &config.params;
    let a = p.alpha;
    let delta = config.delta;
    let pos = JumpSide::new(p.p, p.a, a, lo, hi)?;
    let neg = JumpSide::new(p.q, p.b, a, lo, hi)?;
    // Mean of the discarded jumps (α < 1) or compensator of the kept ones (α ≥ 1).
    let drift = if a < 1.0 {
        delta * signed_first_moment(p, 0.0, lo)?
    } else {
        -delta * signed_first_moment(p, lo, 1.0)?
    };
    let gauss_sd = if opts.gaussian_matching {
        (delta * second_moment_below(p, lo)?).sqrt()
    } else {
        0.0
    };
    Ok(CpGenerator {
        pos,
        neg,
        drift,
        gauss_sd,
        delta,
    })
}

/// Compound Poisson approximation of a tempered stable increment (all jumps above `trunc_eta`).
pub fn sample_tempered_stable_increments(
    config: &ProcessConfig,
    seed: impl Into<Seed>,
    opts: CpOptions,
) -> Result<IncrementSample> {
    config.validate()?;
    check_eta(opts.trunc_eta)?;
    if config.params.is_stable() {
        return Err(Error::InvalidParams(
            "compound Poisson sampler requires A > 0 or B > 0; use the exact stable sampler".into(),
        ));
    }
    if opts.trunc_eta > config.epsilon {
        return Err(Error::InvalidParams("trunc_eta must not exceed epsilon".into()));
    }
    cp_sample(config, seed.into(), opts, SamplerKind::CompoundPoisson)
}

fn cp_sample(config: &ProcessConfig, seed: Seed, opts: CpOptions, kind: SamplerKind) -> Result<IncrementSample> {
    let gen = cp_generator(config, opts.trunc_eta, f64::INFINITY, &opts)?;
    let mut rng = seed.rng();
    let values = (0..config.n).map(|_| gen.sample(&mut rng)).collect();
    Ok(IncrementSample {
        values,
        seed: seed.seed,
        stream: seed.stream,
        config: *config,
        sampler: kind,
        cp: Some(opts),
    })
}

/// Small-jump part `Z_Δ = Δ b_ν + X^S_Δ`, approximated by jumps in `(trunc_eta, ε]`.
pub fn sample_small_jump_increments(
    config: &ProcessConfig,
    seed: impl Into<Seed>,
    opts: CpOptions,
) -> Result<IncrementSample> {
    config.validate()?;
    check_eta(opts.trunc_eta)?;
    if !(opts.trunc_eta < config.epsilon) {
        return Err(Error::InvalidParams("trunc_eta must be below epsilon".into()));
    }
    // The drift of Z_Δ coincides with that of the full process for either convention.
    let gen = cp_generator(config, opts.trunc_eta, config.epsilon, &opts)?;
    let seed = seed.into();
    let mut rng = seed.rng();
    let values = (0..config.n).map(|_| gen.sample(&mut rng)).collect();
    Ok(IncrementSample {
        values,
        seed: seed.seed,
        stream: seed.stream,
        config: *config,
        sampler: SamplerKind::SmallJumps,
        cp: Some(opts),
    })
}

/// Inverse CDF of `x^{-1-α} e^{-rate x}` on `(lo, ∞)` from a tabulated cumulative mass.
#[derive(Debug, Clone)]
struct TailInverse {
    alpha: f64,
    rate: f64,
    breaks: Vec<f64>,
    cum: Vec<f64>,
}

impl TailInverse {
    fn new(alpha: f64, rate: f64, lo: f64) -> Self {
        let f = |x: f64| x.powf(-1.0 - alpha) * (-rate * x).exp();
        let mut breaks = vec![lo];
        let mut cum = vec![0.0];
        let mut x = lo;
        loop {
            let next = x * 1.1;
            let (v, _) = gauss_kronrod_15(&mut |t| f(t), x, next);
            let total = cum.last().copied().unwrap_or(0.0) + v;
            breaks.push(next);
            cum.push(total);
            x = next;
            if f(x) * x < 1e-17 * total {
                break;
            }
        }
        Self {
            alpha,
            rate,
            breaks,
            cum,
        }
    }

    fn density(&self, x: f64) -> f64 {
        x.powf(-1.0 - self.alpha) * (-self.rate * x).exp()
    }

    fn invert(&self, u: f64) -> f64 {
        let total = *self.cum.last().unwrap();
        let target = u * total;
        let k = match self.cum.partition_point(|&c| c <= target) {
            0 => 0,
            k if k >= self.cum.len() => return *self.breaks.last().unwrap(),
            k => k - 1,
        };
        let (mut lo, mut hi) = (self.breaks[k], self.breaks[k + 1]);
        let base = self.cum[k];
        let x0 = self.breaks[k];
        let g = |x: f64| -> f64 {
            let (v, _) = gauss_kronrod_15(&mut |t| self.density(t), x0, x);
            base + v - target
        };
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let gx = g(x);
            if gx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let newton = x - gx / self.density(x);
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= 1e-13 * x {
                return next;
            }
            x = next;
        }
        x
    }
}

/// Increments of the compound Poisson big-jump part `X^B_Δ`.
pub fn sample_big_jump_increments(config: &ProcessConfig, seed: impl Into<Seed>) -> Result<IncrementSample> {
    config.validate()?;
    let p = &config.params;
    let eps = config.epsilon;
    let a = p.alpha;
    let lam_pos = if p.p == 0.0 {
        0.0
    } else {
        p.p * power_exp_integral(-1.0 - a, p.a, eps, f64::INFINITY, 1e-12)?
    };
    let lam = tail_intensity(p, eps)?;
    let prob_pos = lam_pos / lam;
    let inv_pos = (p.a > 0.0 && p.p > 0.0).then(|| TailInverse::new(a, p.a, eps));
    let inv_neg = (p.b > 0.0 && p.q > 0.0).then(|| TailInverse::new(a, p.b, eps));
    let draw = |rng: &mut ChaCha8Rng, inv: &Option<TailInverse>| -> f64 {
        let u: f64 = rng.sample(Open01);
        match inv {
            Some(inv) => inv.invert(u),
            None => eps * u.powf(-1.0 / a),
        }
    };
    let seed = seed.into();
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let count = poisson(&mut rng, lam * config.delta);
        let mut s = 0.0;
        for _ in 0..count {
            let side: f64 = rng.random();
            if side < prob_pos {
                s += draw(&mut rng, &inv_pos);
            } else {
                s -= draw(&mut rng, &inv_neg);
            }
        }
        values.push(s);
    }
    Ok(IncrementSample {
        values,
        seed: seed.seed,
        stream: seed.stream,
        config: *config,
        sampler: SamplerKind::BigJumps,
        cp: None,
    })
}

/// Observation generator: exact stable or compound Poisson jumps plus `σ W_Δ`.
pub fn sample_full_increments(config: &ProcessConfig, seed: impl Into<Seed>) -> Result<IncrementSample> {
    sample_full_increments_with(config, seed, CpOptions::default())
}

pub fn sample_full_increments_with(
    config: &ProcessConfig,
    seed: impl Into<Seed>,
    opts: CpOptions,
) -> Result<IncrementSample> {
    let seed = seed.into();
    let mut sample = if config.params.is_stable() {
        sample_stable_increments(config, seed)?
    } else {
        sample_tempered_stable_increments(config, seed, opts)?
    };
    if config.sigma > 0.0 {
        // Gaussian draws come from a separate stream so the jump part does not depend on σ.
        let mut rng = Seed::new(seed.seed ^ 0x9e37_79b9_7f4a_7c15, seed.stream).rng();
        let sd = config.sigma * config.delta.sqrt();
        for v in sample.values.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *v += sd * g;
        }
    }
    Ok(sample)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, q: f64, a: f64, alpha: f64, delta: f64, n: usize) -> ProcessConfig {
        ProcessConfig::jumps_only(TemperedStableParams::new(p, q, a, 0.0, alpha).unwrap(), delta, n).unwrap()
    }

    #[test]
    fn samplers_are_deterministic() {
        let c = cfg(1.0, 1.0, 0.0, 1.1, 0.1, 50);
        assert_eq!(
            sample_stable_increments(&c, 9).unwrap().values,
            sample_stable_increments(&c, 9).unwrap().values
        );
        assert_ne!(
            sample_stable_increments(&c, Seed::new(9, 0)).unwrap().values,
            sample_stable_increments(&c, Seed::new(9, 1)).unwrap().values
        );
        let t = cfg(2.0, 0.0, 1.0, 0.7, 1.0, 50);
        let a = sample_tempered_stable_increments(&t, 3, CpOptions::default()).unwrap();
        let b = sample_tempered_stable_increments(&t, 3, CpOptions::default()).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn sampler_preconditions() {
        let t = cfg(2.0, 0.0, 1.0, 0.7, 1.0, 5);
        assert!(sample_stable_increments(&t, 1).is_err());
        let s = cfg(1.0, 1.0, 0.0, 0.7, 1.0, 5);
        assert!(sample_tempered_stable_increments(&s, 1, CpOptions::default()).is_err());
        let bad = CpOptions {
            trunc_eta: 1.0,
            gaussian_matching: true,
        };
        assert!(sample_small_jump_increments(&s, 1, bad).is_err());
    }

    #[test]
    fn small_jumps_are_bounded_without_gaussian() {
        let c = cfg(1.0, 1.0, 0.0, 1.5, 0.001, 2000);
        let opts = CpOptions {
            trunc_eta: 0.01,
            gaussian_matching: false,
        };
        let s = sample_small_jump_increments(&c, 5, opts).unwrap();
        // Δ λ_η is about 1, so counts are small and each jump is at most ε in size.
        let lam = tail_intensity(&c.params, 0.01).unwrap() * c.delta;
        let bound = (lam * 10.0 + 10.0) * c.epsilon;
        assert!(s.values.iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn csv_round_trip() {
        let c = cfg(2.0, 0.0, 1.0, 0.7, 1.0, 20);
        let s = sample_full_increments(&c, 11).unwrap();
        let back = IncrementSample::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back.values, s.values);
        assert_eq!(back.config, s.config);
        assert_eq!(back.seed, 11);
        assert_eq!(back.cp, Some(CpOptions::default()));
    }

    #[test]
    fn tail_inverse_matches_pareto_without_tempering() {
        let inv = TailInverse::new(0.7, 1e-16, 1.0);
        for &u in &[0.1, 0.5, 0.9] {
            let x = inv.invert(u);
            let want = (1.0 - u).powf(-1.0 / 0.7);
            assert!((x / want - 1.0).abs() < 1e-6, "u={u}: {x} vs {want}");
        }
    }
}
