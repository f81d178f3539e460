mod common;

use common::*;
use num_complex::Complex64;
use smalljumps::charfn::{empirical_cf_values, ProcessCf};
use smalljumps::models::{big_jump_intensity, second_moment_below, signed_first_moment};
use smalljumps::prelude::*;
use smalljumps::sampling::{
    sample_big_jump_increments, sample_small_jump_increments, sample_stable_increments,
    sample_tempered_stable_increments, CpOptions, Seed,
};

/// Largest `|ECF(u) - cf(u)|` over `u = 0, step, ..., u_max`.
fn sup_deviation(values: &[f64], u_max: f64, step: f64, cf: impl Fn(f64) -> Complex64) -> f64 {
    let k = (u_max / step).round() as usize;
    (0..=k)
        .map(|i| {
            let u = i as f64 * step;
            (empirical_cf_values(values, u) - cf(u)).norm()
        })
        .fold(0.0, f64::max)
}

/// `Δ |u|³ (P+Q) η^{3-α} / (6 (3-α))`: CF error of the Gaussian-matched approximation.
fn cp_bias(config: &ProcessConfig, eta: f64, u: f64) -> f64 {
    let p = &config.params;
    config.delta * u.abs().powi(3) * (p.p + p.q) * eta.powf(3.0 - p.alpha) / (6.0 * (3.0 - p.alpha))
}

fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn stable_sampler_matches_full_line_cf() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100_000);
    let sample = sample_stable_increments(&config, 42).unwrap();
    let tol = 3.0 / (config.n as f64).sqrt();
    for &u in &[0.5, 1.0, 2.0] {
        let dev = (empirical_cf_values(&sample.values, u) - process_cf(&config, u)).norm();
        assert!(dev <= tol, "u={u}: {dev}");
    }
}

#[test]
fn symmetric_sampler_has_balanced_signs() {
    let config = stable(1.0, 1.0, 0.7, 1.0, 100_000);
    let sample = sample_stable_increments(&config, 9).unwrap();
    let mean_sign = sample.values.iter().map(|v| v.signum()).sum::<f64>() / config.n as f64;
    assert!(mean_sign.abs() <= 3.0 / (config.n as f64).sqrt());
}

#[test]
fn stable_sampler_is_self_similar() {
    let small = stable(2.0, 0.0, 0.7, 0.01, 20_000);
    let unit = small.with_delta(1.0);
    let scale = 0.01f64.powf(1.0 / 0.7);
    let mut rejections = 0;
    for seed in 0..10u64 {
        let a = sample_stable_increments(&small, Seed::new(seed, 1)).unwrap();
        let b: Vec<f64> = sample_stable_increments(&unit, Seed::new(seed, 2))
            .unwrap()
            .values
            .iter()
            .map(|v| v * scale)
            .collect();
        let d = ks_statistic(&a.values, &b);
        // Asymptotic two-sample critical value at level 0.01.
        let crit = 1.628 * (2.0 / small.n as f64).sqrt();
        if d > crit {
            rejections += 1;
        }
    }
    assert!(rejections <= 1, "{rejections} of 10 KS tests rejected");
}

#[test]
fn tempered_sampler_matches_cf_with_reported_bias() {
    let config = tempered(2.0, 0.0, 1.0, 0.0, 0.7, 1.0, 100_000);
    let opts = CpOptions::default();
    let sample = sample_tempered_stable_increments(&config, 5, opts).unwrap();
    let cf = ProcessCf::new(&config).unwrap();
    let tol = 3.0 / (config.n as f64).sqrt() + cp_bias(&config, opts.trunc_eta, 10.0);
    let dev = sup_deviation(&sample.values, 10.0, 0.5, |u| cf.process(u).unwrap());
    assert!(dev <= tol, "{dev} > {tol}");
}

#[test]
fn large_increments_are_rare_for_small_steps() {
    let config = tempered(2.0, 1.0, 1.0, 0.5, 0.7, 0.01, 100_000);
    let sample = sample_tempered_stable_increments(&config, 3, CpOptions::default()).unwrap();
    let freq = sample.values.iter().filter(|v| v.abs() > 1.0).count() as f64 / config.n as f64;
    let ld = config.lambda_delta().unwrap();
    let band = 3.0 * (ld * (1.0 - ld) / config.n as f64).sqrt();
    assert!(freq <= ld + band, "{freq} vs {ld}");
}

#[test]
fn one_sided_sampler_stays_above_drift() {
    let config = tempered(2.0, 0.0, 1.0, 0.0, 0.7, 1.0, 2000);
    let opts = CpOptions::default();
    let eta = opts.trunc_eta;
    let drift = config.delta * signed_first_moment(&config.params, 0.0, eta).unwrap();
    let sd = (config.delta * second_moment_below(&config.params, eta).unwrap()).sqrt();
    let violations = (0..100u64)
        .filter(|&seed| {
            let s = sample_tempered_stable_increments(&config, seed, opts).unwrap();
            s.values.iter().cloned().fold(f64::INFINITY, f64::min) < drift - 6.0 * sd
        })
        .count();
    assert!(violations < 1, "{violations} seeds below the bound");
}

#[test]
fn big_jump_sampler_zero_class_and_tail() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100_000);
    let sample = sample_big_jump_increments(&config, 17).unwrap();
    let n = config.n as f64;
    let p0 = (-config.lambda_delta().unwrap()).exp();
    let zeros = sample.values.iter().filter(|&&v| v == 0.0).count() as f64 / n;
    assert!((zeros - p0).abs() <= 3.0 * (p0 * (1.0 - p0) / n).sqrt(), "{zeros} vs {p0}");

    // Rare jumps: almost every nonzero value is a single Pareto(1) jump, P(|Y| > 2) = 1/2.
    let rare = stable(1.0, 1.0, 1.0, 0.001, 1_000_000);
    let s = sample_big_jump_increments(&rare, 18).unwrap();
    let jumps: Vec<f64> = s.values.into_iter().filter(|&v| v != 0.0).collect();
    let k = jumps.len() as f64;
    let frac = jumps.iter().filter(|v| v.abs() > 2.0).count() as f64 / k;
    assert!((frac - 0.5).abs() <= 3.0 * 0.5 / k.sqrt() + 2.0 * rare.lambda_delta().unwrap(), "{frac}");
}

#[test]
fn big_jump_sampler_matches_cf() {
    let config = tempered(2.0, 1.0, 1.0, 0.5, 1.1, 1.0, 100_000);
    let sample = sample_big_jump_increments(&config, 23).unwrap();
    let cf = ProcessCf::new(&config).unwrap();
    let dev = sup_deviation(&sample.values, 10.0, 0.5, |u| cf.big(u).unwrap());
    assert!(dev <= 3.0 / (config.n as f64).sqrt(), "{dev}");
}

#[test]
fn small_jump_sampler_matches_cf() {
    for config in [
        stable(1.0, 1.0, 1.1, 0.2, 20_000),
        tempered(2.0, 0.0, 1.0, 0.0, 0.7, 1.0, 100_000),
    ] {
        let opts = CpOptions::default();
        let sample = sample_small_jump_increments(&config, 29, opts).unwrap();
        let cf = ProcessCf::new(&config).unwrap();
        let tol = 3.0 / (config.n as f64).sqrt() + cp_bias(&config, opts.trunc_eta, 20.0);
        let dev = sup_deviation(&sample.values, 20.0, 0.5, |u| cf.small(u).unwrap());
        assert!(dev <= tol, "{config:?}: {dev} > {tol}");
    }
}

#[test]
fn symmetric_small_jumps_are_centered() {
    let config = stable(1.0, 1.0, 1.5, 0.05, 20_000);
    let s = sample_small_jump_increments(&config, 31, CpOptions::default()).unwrap();
    let n = s.len() as f64;
    let mean = s.values.iter().sum::<f64>() / n;
    let var = s.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() <= 3.0 * (var / n).sqrt());
}

#[test]
fn full_sampler_reduces_to_stable_sampler() {
    let config = stable(1.0, 1.0, 1.1, 0.1, 500);
    let a = sample_full_increments(&config, Seed::new(4, 2)).unwrap();
    let b = sample_stable_increments(&config, Seed::new(4, 2)).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn full_sampler_matches_cf_with_gaussian() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100_000).with_sigma(0.5);
    let sample = sample_full_increments(&config, 37).unwrap();
    let dev = sup_deviation(&sample.values, 10.0, 0.5, |u| process_cf(&config, u));
    assert!(dev <= 3.0 / (config.n as f64).sqrt(), "{dev}");
}

#[test]
fn gaussian_part_adds_delta_to_variance() {
    // Small α keeps the number of simulated jumps per increment low.
    let base = tempered(1.0, 1.0, 2.0, 2.0, 0.5, 0.5, 200_000);
    let var = |s: &[f64]| {
        let n = s.len() as f64;
        let m = s.iter().sum::<f64>() / n;
        s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
    };
    let a = sample_full_increments(&base, 41).unwrap();
    let b = sample_full_increments(&base.with_sigma(1.0), 41).unwrap();
    let diff = var(&b.values) - var(&a.values);
    // Fluctuation of the difference is dominated by 2 Cov(jumps, W) and Var of W².
    let se = (4.0 * var(&a.values) * base.delta + 2.0 * base.delta * base.delta).sqrt() / (base.n as f64).sqrt();
    assert!((diff - base.delta).abs() <= 4.0 * se, "{diff} vs {}", base.delta);
}

#[test]
fn samplers_are_deterministic_per_stream() {
    let config = tempered(2.0, 0.0, 1.0, 0.0, 0.7, 1.0, 1000);
    let a = sample_full_increments(&config, Seed::new(5, 3)).unwrap();
    let b = sample_full_increments(&config, Seed::new(5, 3)).unwrap();
    let c = sample_full_increments(&config, Seed::new(5, 4)).unwrap();
    assert_eq!(a.values, b.values);
    assert_ne!(a.values, c.values);
    assert_eq!(a.len(), 1000);
}

#[test]
fn intensity_drives_poisson_count() {
    let params = TemperedStableParams::stable(1.0, 1.0, 1.0).unwrap();
    assert_eq!(big_jump_intensity(&params, 1.0).unwrap(), 2.0);
}
