//! Special functions: Gamma, upper incomplete Gamma and a few complex helpers.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const MAX_ITER: usize = 10_000;
const TINY: f64 = 1e-300;

/// Gamma function on the real line (negative non-integers allowed).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Upper incomplete Gamma function `Γ(a, s) = ∫_s^∞ t^{a-1} e^{-t} dt` for a > 0, s >= 0.
///
/// Series for the lower function when `s < a + 1`, Lentz continued fraction otherwise.
/// Relative accuracy is about 1e-14 over the domain used in this crate.
///
/// ```
/// use smalljumps::special::upper_incomplete_gamma;
/// // Γ(1, s) = e^{-s}
/// let v = upper_incomplete_gamma(1.0, 2.0).unwrap();
/// assert!((v - (-2.0f64).exp()).abs() < 1e-15);
/// ```
pub fn upper_incomplete_gamma(a: f64, s: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidParams(format!("incomplete gamma needs a > 0, got {a}")));
    }
    if !(s >= 0.0) {
        return Err(Error::InvalidParams(format!("incomplete gamma needs s >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(gamma(a));
    }
    if s.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * s.ln() - s;
    if s < a + 1.0 {
        // γ(a,s) = s^a e^{-s} Σ_k s^k / (a (a+1) ... (a+k))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= s / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                let lower = sum * log_prefactor.exp();
                return Ok(gamma(a) - lower);
            }
        }
        Err(Error::Quadrature {
            context: "incomplete gamma series".into(),
            value: sum,
            error: term.abs(),
        })
    } else {
        // Modified Lentz for Γ(a,s) = e^{-s} s^a / (s + 1 - a - 1(1-a)/(s + 3 - a - ...))
        let mut b = s + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                return Ok(log_prefactor.exp() * h);
            }
        }
        Err(Error::Quadrature {
            context: "incomplete gamma continued fraction".into(),
            value: h,
            error: f64::NAN,
        })
    }
}

/// `(e^w - 1) / w`, accurate near 0.
pub fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..40 {
            term = term * w / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        exp_m1(w) / w
    }
}

/// `(e^w - 1 - w) / w^2`, accurate near 0.
pub fn phi2(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 3..40 {
            term = term * w / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (exp_m1(w) - w) / (w * w)
    }
}

/// `e^w - 1` without cancellation for small real or imaginary parts.
pub fn exp_m1(w: Complex64) -> Complex64 {
    // e^{a+ib} - 1 = e^a (cos b - 1) + (e^a - 1) + i e^a sin b
    let ea = w.re.exp();
    let half = (0.5 * w.im).sin();
    Complex64::new(-2.0 * ea * half * half + w.re.exp_m1(), ea * w.im.sin())
}

/// `sin(y) - y` with a series for small arguments.
pub fn sin_minus_id(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        // -y^3/3! + y^5/5! - y^7/7! + y^9/9! - y^11/11!
        -y * y2 / 6.0
            * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0 * (1.0 - y2 / 72.0 * (1.0 - y2 / 110.0))))
    } else {
        y.sin() - y
    }
}

/// `cos(y) - 1` without cancellation.
pub fn cos_minus_one(y: f64) -> f64 {
    let s = (0.5 * y).sin();
    -2.0 * s * s
}
