//! Tempered stable Lévy densities and the process configuration.
//!
//! The Lévy density is
//! `p(x) = P x^{-1-α} e^{-A x}` for `x > 0` and `Q |x|^{-1-α} e^{-B |x|}` for `x < 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::power_exp_integral;

const MOMENT_TOL: f64 = 1e-12;

/// Parameters `(P, Q, A, B, α)` of a tempered stable Lévy density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperedStableParams {
    pub p: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

impl TemperedStableParams {
    pub fn new(p: f64, q: f64, a: f64, b: f64, alpha: f64) -> Result<Self> {
        let params = Self { p, q, a, b, alpha };
        params.validate()?;
        Ok(params)
    }

    /// Untempered stable density with weights `P`, `Q`.
    pub fn stable(p: f64, q: f64, alpha: f64) -> Result<Self> {
        Self::new(p, q, 0.0, 0.0, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, v) in [("P", self.p), ("Q", self.q), ("A", self.a), ("B", self.b)] {
            if !(v >= 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be finite and >= 0 (got {v})"));
            }
        }
        if !(self.p + self.q > 0.0) {
            problems.push("P + Q must be positive".to_string());
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            problems.push(format!("alpha must lie in (0, 2) (got {})", self.alpha));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }

    pub fn is_stable(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q && self.a == self.b
    }
}

/// Full experiment configuration: Lévy parameters, threshold ε, step Δ, volatility σ, sample size n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessConfig {
    pub params: TemperedStableParams,
    pub epsilon: f64,
    pub delta: f64,
    pub sigma: f64,
    pub n: usize,
}

impl ProcessConfig {
    pub fn new(params: TemperedStableParams, epsilon: f64, delta: f64, sigma: f64, n: usize) -> Result<Self> {
        let config = Self {
            params,
            epsilon,
            delta,
            sigma,
            n,
        };
        config.validate()?;
        Ok(config)
    }

    /// Configuration with `ε = 1` and no Brownian part.
    pub fn jumps_only(params: TemperedStableParams, delta: f64, n: usize) -> Result<Self> {
        Self::new(params, 1.0, delta, 0.0, n)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if let Err(Error::InvalidParams(msg)) = self.params.validate() {
            problems.push(msg);
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            problems.push(format!("epsilon must lie in (0, 1] (got {})", self.epsilon));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            problems.push(format!("delta must be positive (got {})", self.delta));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            problems.push(format!("sigma must be >= 0 (got {})", self.sigma));
        }
        if self.n == 0 {
            problems.push("n must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(problems.join("; ")))
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// `λΔ` for this configuration.
    pub fn lambda_delta(&self) -> Result<f64> {
        Ok(big_jump_intensity(&self.params, self.epsilon)? * self.delta)
    }
}

/// Lévy density `p(x)`; undefined at 0.
pub fn levy_density(params: &TemperedStableParams, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::DensityAtZero);
    }
    let a = params.alpha;
    Ok(if x > 0.0 {
        params.p * x.powf(-1.0 - a) * (-params.a * x).exp()
    } else {
        params.q * (-x).powf(-1.0 - a) * (params.b * x).exp()
    })
}

/// Orey constants `(M, α)`; only `ε = 1` is supported.
pub fn orey_constants(params: &TemperedStableParams, epsilon: f64) -> Result<(f64, f64)> {
    if epsilon != 1.0 {
        return Err(Error::UnsupportedThreshold(epsilon));
    }
    let m = (params.p * (-params.a).exp() + params.q * (-params.b).exp()) / (2.0 - params.alpha);
    Ok((m, params.alpha))
}

/// Big-jump intensity `λ = ∫_{|x|>ε} p(x) dx`.
pub fn big_jump_intensity(params: &TemperedStableParams, epsilon: f64) -> Result<f64> {
    tail_intensity(params, epsilon)
}

/// `∫_{|x|>η} p(x) dx` for any `η > 0`.
pub fn tail_intensity(params: &TemperedStableParams, eta: f64) -> Result<f64> {
    let a = params.alpha;
    if params.is_stable() {
        return Ok((params.p + params.q) / (a * eta.powf(a)));
    }
    let side = |w: f64, rate: f64| -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * power_exp_integral(-1.0 - a, rate, eta, f64::INFINITY, 1e-12)?)
    };
    Ok(side(params.p, params.a)? + side(params.q, params.b)?)
}

/// Drift `b_ν` of the small-jump part `Z_Δ = Δ b_ν + X^S_Δ`.
///
/// For `α < 1` this is `∫_{|x|≤ε} x p(x) dx`; otherwise `-∫_{ε<|x|≤1} x p(x) dx`.
pub fn small_jump_drift(params: &TemperedStableParams, epsilon: f64) -> Result<f64> {
    if params.is_symmetric() {
        return Ok(0.0);
    }
    if params.alpha < 1.0 {
        signed_first_moment(params, 0.0, epsilon)
    } else {
        Ok(-signed_first_moment(params, epsilon, 1.0)?)
    }
}

/// `∫_{lo<|x|≤hi} x p(x) dx`.
pub fn signed_first_moment(params: &TemperedStableParams, lo: f64, hi: f64) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    let s = -params.alpha;
    let side = |w: f64, rate: f64| -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * power_exp_integral(s, rate, lo, hi, MOMENT_TOL)?)
    };
    Ok(side(params.p, params.a)? - side(params.q, params.b)?)
}

/// `∫_{|x|≤η} x^2 p(x) dx`.
pub fn second_moment_below(params: &TemperedStableParams, eta: f64) -> Result<f64> {
    let s = 1.0 - params.alpha;
    let side = |w: f64, rate: f64| -> Result<f64> {
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * power_exp_integral(s, rate, 0.0, eta, MOMENT_TOL)?)
    };
    Ok(side(params.p, params.a)? + side(params.q, params.b)?)
}

/// Stable law in the `S(α, β, σ, μ)` (Samorodnitsky–Taqqu) parametrization equivalent to
/// the untempered density at time 1, with compensation on `|x| < 1` for `α ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableLaw {
    pub alpha: f64,
    pub beta: f64,
    pub scale: f64,
    pub shift: f64,
}

impl StableLaw {
    pub fn from_params(params: &TemperedStableParams) -> Result<Self> {
        if !params.is_stable() {
            return Err(Error::InvalidParams("stable law requires A = B = 0".into()));
        }
        let (p, q, a) = (params.p, params.q, params.alpha);
        let beta = (p - q) / (p + q);
        if a == 1.0 {
            Ok(Self {
                alpha: a,
                beta,
                scale: (p + q) * std::f64::consts::FRAC_PI_2,
                shift: (p - q) * (1.0 - crate::special::EULER_GAMMA),
            })
        } else {
            let scale_pow = -(p + q) * crate::special::gamma(-a) * (std::f64::consts::FRAC_PI_2 * a).cos();
            let shift = if a < 1.0 { 0.0 } else { (p - q) / (a - 1.0) };
            Ok(Self {
                alpha: a,
                beta,
                scale: scale_pow.powf(1.0 / a),
                shift,
            })
        }
    }

    /// Law of the increment over a step `Δ`.
    pub fn at_time(&self, delta: f64) -> Self {
        let scale = if self.alpha == 1.0 {
            self.scale * delta
        } else {
            self.scale * delta.powf(1.0 / self.alpha)
        };
        Self {
            scale,
            shift: self.shift * delta,
            ..*self
        }
    }

    /// Log characteristic function.
    pub fn log_cf(&self, u: f64) -> num_complex::Complex64 {
        use num_complex::Complex64;
        if u == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = u.signum();
        let a = self.alpha;
        if a == 1.0 {
            let r = -self.scale * u.abs();
            let i = -self.scale * u.abs() * self.beta * std::f64::consts::FRAC_2_PI * s * u.abs().ln();
            Complex64::new(r, i + self.shift * u)
        } else {
            let mag = (self.scale * u.abs()).powf(a);
            let t = (std::f64::consts::FRAC_PI_2 * a).tan();
            Complex64::new(-mag, mag * self.beta * s * t + self.shift * u)
        }
    }
}
