//! Independent numerical oracles shared by the integration tests.
//!
//! Nothing here calls the crate's own quadrature or CF code: integrals use composite
//! Gauss–Legendre rules on explicit meshes.
#![allow(dead_code)]

use num_complex::Complex64;
use smalljumps::prelude::*;

/// Nodes and weights of the `k`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; k];
    let mut w = vec![0.0; k];
    for i in 0..k {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for j in 2..=k {
                let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = k as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, t);
                for j in 2..=k {
                    let q2 = ((2 * j - 1) as f64 * t * q1 - (j - 1) as f64 * q0) / j as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = k as f64 * (t * q1 - q0) / (t * t - 1.0);
                w[i] = 2.0 / ((1.0 - t * t) * dq * dq);
                break;
            }
        }
        x[i] = t;
    }
    (x, w)
}

/// Composite 8-point Gauss–Legendre over consecutive mesh points.
pub fn composite<F: FnMut(f64) -> Complex64>(mesh: &[f64], mut f: F) -> Complex64 {
    let (x, w) = gauss_legendre(8);
    let mut acc = Complex64::new(0.0, 0.0);
    for pair in mesh.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (xi, wi) in x.iter().zip(&w) {
            acc += f(c + h * xi) * (wi * h);
        }
    }
    acc
}

pub fn composite_real<F: FnMut(f64) -> f64>(mesh: &[f64], mut f: F) -> f64 {
    composite(mesh, |x| Complex64::new(f(x), 0.0)).re
}

pub fn uniform_mesh(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect()
}

/// `∫_0^1 f(x) dx` through `x = t^k`, which tames `x^{-γ}` singularities for `k (1-γ) ≥ 1`.
pub fn graded_unit<F: FnMut(f64) -> Complex64>(k: f64, panels: usize, mut f: F) -> Complex64 {
    composite(&uniform_mesh(0.0, 1.0, panels), |t| {
        let x = t.powf(k);
        f(x) * (k * t.powf(k - 1.0))
    })
}

/// One side of the small-jump exponent, `∫_0^1 (e^{iux} - 1 [- iux]) x^{-1-α} e^{-rate x} dx`.
pub fn small_side(u: f64, alpha: f64, rate: f64) -> Complex64 {
    let compensate = alpha >= 1.0;
    // Integrand behaves like x^{1-α} (real part) and x^{-α} or x^{2-α} (imaginary part).
    let k = if compensate { 1.0 / (2.0 - alpha) } else { 1.0 / (1.0 - alpha).max(0.05) };
    let panels = 400 + (u.abs() * 40.0) as usize;
    graded_unit(k.max(1.0), panels, |x| {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let ux = u * x;
        let re = if ux.abs() < 1e-4 { -0.5 * ux * ux } else { ux.cos() - 1.0 };
        let im = if compensate {
            if ux.abs() < 1e-3 { -ux * ux * ux / 6.0 } else { ux.sin() - ux }
        } else {
            ux.sin()
        };
        Complex64::new(re, im) * (x.powf(-1.0 - alpha) * (-rate * x).exp())
    })
}

/// One side of the big-jump exponent, `∫_1^∞ (e^{iux} - 1) x^{-1-α} e^{-rate x} dx`.
///
/// Integrates to `X = 10^4` on panels resolving the oscillation; beyond `X` (untempered) the
/// `-1` part is added exactly and the oscillatory part by one integration by parts.
pub fn big_side(u: f64, alpha: f64, rate: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let x_max: f64 = if rate > 0.0 { (1.0 + 60.0 / rate).min(1e4) } else { 1e4 };
    let width = (std::f64::consts::PI / (2.0 * u.abs().max(1e-9))).min(1.0);
    let panels = ((x_max - 1.0) / width).ceil() as usize;
    let head = composite(&uniform_mesh(1.0, x_max, panels), |x| {
        let (s, c) = (u * x).sin_cos();
        Complex64::new(c - 1.0, s) * (x.powf(-1.0 - alpha) * (-rate * x).exp())
    });
    if rate > 0.0 {
        return head;
    }
    let (s, c) = (u * x_max).sin_cos();
    let oscillating = Complex64::new(c, s) * Complex64::new(0.0, x_max.powf(-1.0 - alpha) / u);
    head + oscillating - x_max.powf(-alpha) / alpha
}

fn two_sided(p: &TemperedStableParams, side: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if p.p > 0.0 {
        acc += side(p.a, p.p);
    }
    if p.q > 0.0 {
        acc += side(p.b, p.q).conj();
    }
    acc
}

/// Small-jump Lévy–Khintchine exponent with `ε = 1` (drift convention of the crate:
/// uncompensated for `α < 1`, compensated on `|x| ≤ 1` otherwise).
pub fn small_exponent(params: &TemperedStableParams, u: f64) -> Complex64 {
    two_sided(params, |rate, w| small_side(u, params.alpha, rate) * w)
}

pub fn big_exponent(params: &TemperedStableParams, u: f64) -> Complex64 {
    two_sided(params, |rate, w| big_side(u, params.alpha, rate) * w)
}

/// CF of `Z_Δ + X^B_Δ + σ W_Δ` from the quadrature exponents.
pub fn process_cf(config: &ProcessConfig, u: f64) -> Complex64 {
    let e = small_exponent(&config.params, u) + big_exponent(&config.params, u);
    (e * config.delta).exp() * (-0.5 * config.sigma * config.sigma * config.delta * u * u).exp()
}

/// Parameter sets of the reproduced tables, `(P, Q, A, B)` and the α values.
pub fn table_configs() -> Vec<ProcessConfig> {
    let mut out = Vec::new();
    for &alpha in &[0.7, 1.1, 1.7] {
        for &(p, q) in &[(1.0, 1.0), (2.0, 0.0)] {
            for &delta in &[1.0, 0.1, 0.01] {
                let params = TemperedStableParams::stable(p, q, alpha).unwrap();
                out.push(ProcessConfig::jumps_only(params, delta, 1000).unwrap());
            }
        }
    }
    for &alpha in &[0.7, 1.1] {
        let params = TemperedStableParams::new(2.0, 0.0, 1.0, 0.0, alpha).unwrap();
        out.push(ProcessConfig::jumps_only(params, 1.0, 1000).unwrap());
    }
    out
}

pub fn stable(p: f64, q: f64, alpha: f64, delta: f64, n: usize) -> ProcessConfig {
    ProcessConfig::jumps_only(TemperedStableParams::stable(p, q, alpha).unwrap(), delta, n).unwrap()
}

pub fn tempered(p: f64, q: f64, a: f64, b: f64, alpha: f64, delta: f64, n: usize) -> ProcessConfig {
    ProcessConfig::jumps_only(TemperedStableParams::new(p, q, a, b, alpha).unwrap(), delta, n).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300)
}
