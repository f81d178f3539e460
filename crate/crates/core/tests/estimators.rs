mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use smalljumps::charfn::{empirical_cf_values, ProcessCf};
use smalljumps::estimators::{
    benchmark_density, benchmark_density_auto, bias_bound, default_x_grid, density_sup_bound, fourier_invert,
    fourier_invert_with_step, optimal_cutoff, optimal_cutoff_log_n, relative_l2_error, theoretical_bounds,
    variance_bound, Deconvolver, EstimatorKind, SpectralEstimate, XGrid,
};
use smalljumps::models::orey_constants;
use smalljumps::prelude::*;
use smalljumps::sampling::{sample_big_jump_increments, Seed};
use smalljumps::special::upper_incomplete_gamma;

fn risk(est: &SpectralEstimate, bench: &SpectralEstimate) -> f64 {
    relative_l2_error(est, bench).unwrap()
}

#[test]
fn inverts_gaussian_and_cauchy() {
    let grid = XGrid::centered(0.0, 8.0, 161).unwrap();
    let g = fourier_invert(|u| Ok(Complex64::new((-0.5 * u * u).exp(), 0.0)), 40.0, &grid).unwrap();
    assert!((g[80] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-6);
    let c = fourier_invert(|u: f64| Ok(Complex64::new((-u.abs()).exp(), 0.0)), 200.0, &grid).unwrap();
    assert!((c[80] - 1.0 / PI).abs() < 1e-3);
}

#[test]
fn small_jump_density_integrates_to_one() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100);
    let cf = ProcessCf::new(&config).unwrap();
    let grid = XGrid::centered(0.0, 12.0, 2049).unwrap();
    let g = fourier_invert(|u| cf.small(u), 60.0, &grid).unwrap();
    let mass = g.iter().sum::<f64>() * grid.step;
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
}

#[test]
fn estimates_have_unit_mass() {
    // Exponential tails keep the whole sample, and so the mass of ĝ, inside the grid.
    let config = tempered(1.0, 1.0, 1.0, 1.0, 1.1, 0.1, 1000).with_sigma(0.3);
    let sample = sample_full_increments(&config, 8).unwrap();
    let grid = XGrid::centered(0.0, 100.0, 8193).unwrap();
    for est in [
        estimate_known_noise(&sample, 8.0, &grid).unwrap(),
        estimate_direct(&sample, 8.0, &grid).unwrap(),
        estimate_gaussian_noise(&sample, 8.0, &grid).unwrap(),
    ] {
        assert!((est.mass() - 1.0).abs() < 1e-3, "{:?}: {}", est.kind, est.mass());
    }
}

#[test]
fn direct_estimator_is_plain_inversion_of_the_ecf() {
    let config = stable(2.0, 0.0, 1.1, 0.01, 400);
    let sample = sample_full_increments(&config, 2).unwrap();
    let grid = XGrid::centered(0.0, 0.5, 513).unwrap();
    let est = estimate_direct(&sample, 30.0, &grid).unwrap();
    let manual = fourier_invert_with_step(|u| Ok(empirical_cf_values(&sample.values, u)), 30.0, &grid, est.u_step)
        .unwrap();
    for (a, b) in est.values.iter().zip(&manual) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
    }
}

#[test]
fn atomic_big_jump_sample_gives_finite_estimate() {
    let config = stable(1.0, 1.0, 1.0, 0.1, 500);
    let sample = sample_big_jump_increments(&config, 4).unwrap();
    assert!(sample.values.iter().filter(|&&v| v == 0.0).count() > 300);
    let est = estimate_known_noise(&sample, 5.0, &default_x_grid(&config).unwrap()).unwrap();
    assert!(est.values.iter().all(|v| v.is_finite()));
}

#[test]
fn known_noise_risk_decreases_with_n() {
    let base = stable(1.0, 1.0, 1.0, 1.0, 500);
    let grid = default_x_grid(&base).unwrap();
    let bench = benchmark_density_auto(&base, &grid).unwrap();
    let mut risks = Vec::new();
    for n in [500, 5000, 50_000] {
        let config = base.with_n(n);
        let m = optimal_cutoff(&config, n).unwrap_or(PI / 2.0).max(PI / 2.0);
        let dec = Deconvolver::new(&config, EstimatorKind::KnownNoise, &grid, m).unwrap();
        let mean = (0..10u64)
            .map(|r| risk(&dec.estimate(&sample_full_increments(&config, Seed::new(1, r)).unwrap(), m).unwrap(), &bench))
            .sum::<f64>()
            / 10.0;
        risks.push(mean);
    }
    assert!(risks[0] > risks[1] && risks[1] > risks[2], "{risks:?}");
}

fn mean_risk(config: &ProcessConfig, kind: EstimatorKind, m: f64, reps: u64) -> f64 {
    let grid = default_x_grid(config).unwrap();
    let bench = benchmark_density_auto(config, &grid).unwrap();
    let dec = Deconvolver::new(config, kind, &grid, m).unwrap();
    (0..reps)
        .map(|r| risk(&dec.estimate(&sample_full_increments(config, Seed::new(3, r)).unwrap(), m).unwrap(), &bench))
        .sum::<f64>()
        / reps as f64
}

#[test]
fn direct_estimator_is_competitive_at_high_frequency() {
    let config = stable(1.0, 1.0, 1.1, 0.01, 2000);
    let m = 60.0;
    let known = mean_risk(&config, EstimatorKind::KnownNoise, m, 10);
    let direct = mean_risk(&config, EstimatorKind::Direct, m, 10);
    assert!(direct <= 2.0 * known && known <= 2.0 * direct, "{direct} vs {known}");
}

#[test]
fn direct_estimator_is_worse_at_low_frequency() {
    // At n = 500 the e^{4λΔ} variance of the deconvolution still dominates; the bias of the
    // direct estimator shows once n is large enough.
    let config = stable(1.0, 1.0, 0.7, 1.0, 5000);
    let m = PI / 2.0;
    let known = mean_risk(&config, EstimatorKind::KnownNoise, m, 10);
    let direct = mean_risk(&config, EstimatorKind::Direct, m, 10);
    assert!(direct > known, "{direct} vs {known}");
}

#[test]
fn gaussian_estimator_is_continuous_at_zero_sigma() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 300).with_sigma(1e-12);
    let sample = sample_full_increments(&config, 6).unwrap();
    let grid = default_x_grid(&config).unwrap();
    let a = estimate_gaussian_noise(&sample, 4.0, &grid).unwrap();
    let b = estimate_known_noise(&sample, 4.0, &grid).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() <= 1e-9);
    }
}

#[test]
fn gaussian_noise_amplifies_variance() {
    let base = stable(1.0, 1.0, 1.0, 1.0, 1000);
    let grid = XGrid::centered(0.0, 10.0, 1025).unwrap();
    let spread = |sigma: f64| {
        let config = base.with_sigma(sigma);
        let dec = Deconvolver::new(&config, EstimatorKind::GaussianNoise, &grid, 3.0).unwrap();
        let at_zero: Vec<f64> = (0..40u64)
            .map(|r| dec.estimate(&sample_full_increments(&config, Seed::new(9, r)).unwrap(), 3.0).unwrap().values[512])
            .collect();
        let mean = at_zero.iter().sum::<f64>() / 40.0;
        at_zero.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 39.0
    };
    let v = [spread(0.2), spread(0.5), spread(1.0)];
    assert!(v[0] < v[1] && v[1] < v[2], "{v:?}");
}

#[test]
fn benchmark_is_normalized_and_symmetric() {
    let config = stable(1.0, 1.0, 1.1, 0.1, 100);
    let grid = default_x_grid(&config).unwrap();
    let bench = benchmark_density_auto(&config, &grid).unwrap();
    assert!((bench.mass() - 1.0).abs() < 1e-4);
    let len = grid.len;
    assert!((grid.point(0) + grid.end()).abs() < 1e-12);
    let max = bench.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for k in 0..len / 2 {
        assert!((bench.values[k] - bench.values[len - 1 - k]).abs() <= 1e-10 * max);
    }
}

#[test]
fn benchmark_respects_sup_bound() {
    for config in table_configs() {
        let grid = default_x_grid(&config).unwrap();
        let bench = benchmark_density(&config, 200.0, &grid).unwrap();
        let sup = bench.values.iter().cloned().fold(f64::MIN, f64::max);
        assert!(sup <= density_sup_bound(&config).unwrap(), "{config:?}");
    }
}

#[test]
fn relative_error_algebra() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100);
    let grid = XGrid::centered(0.0, 10.0, 513).unwrap();
    let bench = benchmark_density(&config, 50.0, &grid).unwrap();
    assert_eq!(risk(&bench, &bench), 0.0);
    let mut double = bench.clone();
    double.values.iter_mut().for_each(|v| *v *= 2.0);
    assert!((risk(&double, &bench) - 1.0).abs() < 1e-14);
    let other = benchmark_density(&config, 50.0, &XGrid::centered(0.0, 10.0, 257).unwrap()).unwrap();
    assert!(matches!(relative_l2_error(&other, &bench), Err(Error::GridMismatch)));
}

#[test]
fn incomplete_gamma_examples() {
    assert!((upper_incomplete_gamma(1.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
    assert!((upper_incomplete_gamma(0.5, 0.0).unwrap() - PI.sqrt()).abs() < 1e-12);
    assert!((upper_incomplete_gamma(2.0, 3.0).unwrap() - 4.0 * (-3.0f64).exp()).abs() < 1e-12);
}

#[test]
fn optimal_cutoff_at_substitution_point() {
    // P = Q = 1/2 gives M = 1 and λΔ = 1 at α = 1, Δ = 1.
    let config = stable(0.5, 0.5, 1.0, 1.0, 100);
    assert_eq!(orey_constants(&config.params, 1.0).unwrap().0, 1.0);
    assert_eq!(config.lambda_delta().unwrap(), 1.0);
    assert!((optimal_cutoff_log_n(&config, 8.0).unwrap() - PI).abs() < 1e-12);
    assert!(matches!(
        optimal_cutoff_log_n(&config, 4.0),
        Err(Error::UndefinedCutoff { .. })
    ));
}

#[test]
fn brownian_cutoff_solves_its_equation() {
    for (alpha, sigma) in [(1.0, 0.5), (0.7, 1.0), (1.4, 0.2)] {
        let n = 10_000_000;
        let config = stable(1.0, 1.0, alpha, 1.0, n).with_sigma(sigma);
        let m = optimal_cutoff(&config, n).unwrap();
        let (om, a) = orey_constants(&config.params, 1.0).unwrap();
        let d = config.delta;
        let c = 2f64.powf(a + 1.0) * om / PI.powf(a);
        let big_c = d / (2.0 * a * (2.0 * om * d).powf(1.0 / a));
        let ld = config.lambda_delta().unwrap();
        let lhs = sigma * sigma * d * m * m + c * d * m.powf(a);
        let rhs = (PI * c * big_c * (-4.0 * ld).exp() * n as f64).ln();
        assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs(), "alpha={alpha}: {lhs} vs {rhs}");
    }
}

#[test]
fn bias_bound_decreases_and_dominates_tail() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100);
    let cf = ProcessCf::new(&config).unwrap();
    let mut prev = f64::INFINITY;
    for k in 1..40 {
        let b = bias_bound(&config, 0.5 * k as f64).unwrap();
        assert!(b <= prev);
        prev = b;
    }
    for m in [5.0, 10.0, 20.0] {
        let tail = composite_real(&uniform_mesh(m, m + 60.0, 600), |u| {
            (cf.small(u).unwrap() * cf.big(u).unwrap()).norm_sqr()
        }) / PI;
        assert!(tail <= bias_bound(&config, m).unwrap(), "m={m}");
    }
}

#[test]
fn bound_report_is_consistent() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 5000);
    let r = theoretical_bounds(&config, 3.0, 5000).unwrap();
    assert_eq!(r.bias_bound, bias_bound(&config, 3.0).unwrap());
    assert_eq!(r.variance_bound, variance_bound(&config, 3.0, 5000).unwrap());
    assert!((r.variance_bound - (8.0f64).exp() * 3.0 / (PI * 5000.0)).abs() < 1e-12);
    assert_eq!(r.lambda_delta, 2.0);
    assert!(r.m_star.is_some());
    let small_n = theoretical_bounds(&config, 3.0, 100).unwrap();
    assert!(small_n.m_star.is_none());
}

#[test]
fn plancherel_identity_on_estimates() {
    let config = stable(1.0, 1.0, 1.1, 0.1, 2000);
    let sample = sample_full_increments(&config, 12).unwrap();
    let grid = default_x_grid(&config).unwrap();
    let est = estimate_known_noise(&sample, 10.0, &grid).unwrap();
    let (a, b) = (est.l2_norm_sq(), est.spectral_norm_sq());
    assert!((a - b).abs() <= 1e-3 * b, "{a} vs {b}");
}

#[test]
fn cutoff_below_threshold_is_rejected() {
    let config = stable(1.0, 1.0, 1.0, 1.0, 100);
    let sample = sample_full_increments(&config, 1).unwrap();
    let grid = XGrid::centered(0.0, 5.0, 257).unwrap();
    assert!(matches!(
        estimate_known_noise(&sample, 1.0, &grid),
        Err(Error::CutoffBelowThreshold { .. })
    ));
    let sigma0 = sample_full_increments(&config, 1).unwrap();
    assert!(estimate_gaussian_noise(&sigma0, 3.0, &grid).is_err());
}
