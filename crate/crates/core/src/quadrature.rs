//! Adaptive Gauss–Kronrod quadrature for real and complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub intervals: usize,
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// 15-point Kronrod rule on `[a, b]` with the embedded 7-point Gauss error estimate.
pub fn gauss_kronrod_15<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kronrod = kronrod * h;
    let gauss = gauss * h;
    (kronrod, (kronrod - gauss).magnitude())
}

struct Interval<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]`.
pub fn integrate<T: QuadValue, F: FnMut(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<QuadResult<T>> {
    integrate_partition(f, &[a, b], opts)
}

/// Adaptive integration starting from a given partition `points[0] < points[1] < ...`.
pub fn integrate_partition<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult<T>> {
    let mut intervals: Vec<Interval<T>> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, error) = gauss_kronrod_15(&mut f, w[0], w[1]);
            Interval {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        let mut worst = 0;
        for (i, iv) in intervals.iter().enumerate() {
            total = total + iv.value;
            err += iv.error;
            if iv.error > intervals[worst].error {
                worst = i;
            }
        }
        let tol = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= tol || intervals.is_empty() {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                intervals: intervals.len(),
            });
        }
        let iv = &intervals[worst];
        let mid = 0.5 * (iv.a + iv.b);
        let exhausted = intervals.len() >= opts.max_intervals || !(mid > iv.a && mid < iv.b);
        if exhausted {
            // Accept if the remaining error is at rounding level of the total.
            if err <= 1e-13 * total.magnitude().max(opts.abs_tol) {
                return Ok(QuadResult {
                    value: total,
                    abs_error: err,
                    intervals: intervals.len(),
                });
            }
            return Err(Error::Quadrature {
                context: format!("adaptive Gauss-Kronrod with {} intervals", intervals.len()),
                value: total.magnitude(),
                error: err,
            });
        }
        let (a, b) = (iv.a, iv.b);
        let (v1, e1) = gauss_kronrod_15(&mut f, a, mid);
        let (v2, e2) = gauss_kronrod_15(&mut f, mid, b);
        intervals[worst] = Interval {
            a,
            b: mid,
            value: v1,
            error: e1,
        };
        intervals.push(Interval {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }
}

/// `∫_a^b x^s e^{-rate x} dx` for `0 <= a < b <= ∞`, `rate >= 0`.
///
/// Requires `s > -1` when `a = 0` and `rate > 0` or `s < -1` when `b = ∞`.
pub fn power_exp_integral(s: f64, rate: f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    if a == 0.0 && s <= -1.0 {
        return Err(Error::InvalidParams(format!("x^{s} is not integrable at 0")));
    }
    if rate == 0.0 {
        if b.is_infinite() {
            if s >= -1.0 {
                return Err(Error::InvalidParams(format!("x^{s} is not integrable at infinity")));
            }
            return Ok(-a.powf(s + 1.0) / (s + 1.0));
        }
        if (s + 1.0).abs() < 1e-15 {
            return Ok((b / a).ln());
        }
        return Ok((b.powf(s + 1.0) - a.powf(s + 1.0)) / (s + 1.0));
    }
    let opts = QuadOptions::rel(rel_tol);
    let mut total = 0.0;
    let mut lo = a;
    if a == 0.0 {
        // x = t^{1/(s+1)} removes the power singularity at 0.
        let c = b.min(1.0);
        let p = 1.0 / (s + 1.0);
        let t_max = c.powf(s + 1.0);
        let r = integrate(|t: f64| p * (-rate * t.powf(p)).exp(), 0.0, t_max, opts)?;
        total += r.value;
        lo = c;
    }
    if b > lo {
        // x = e^t on the rest; truncate where the exponential has died out.
        let hi = if b.is_infinite() {
            lo.max(1.0) + 760.0 / rate
        } else {
            b
        };
        let (t0, t1) = (lo.ln(), hi.ln());
        let n_panels = ((t1 - t0) / 0.5).ceil().max(1.0) as usize;
        let pts: Vec<f64> = (0..=n_panels)
            .map(|k| t0 + (t1 - t0) * k as f64 / n_panels as f64)
            .collect();
        let r = integrate_partition(
            |t: f64| {
                let x = t.exp();
                ((s + 1.0) * t - rate * x).exp()
            },
            &pts,
            opts,
        )?;
        total += r.value;
    }
    Ok(total)
}
