mod common;

use common::*;
use smalljumps::models::{
    big_jump_intensity, levy_density, orey_constants, second_moment_below, signed_first_moment, small_jump_drift,
    tail_intensity, StableLaw,
};
use smalljumps::prelude::*;

/// `∫_lo^hi x^s e^{-rate x} dx` by graded Gauss–Legendre (`lo = 0` allowed for `s > -1`).
fn power_exp(s: f64, rate: f64, lo: f64, hi: f64) -> f64 {
    if lo == 0.0 {
        // x = hi·t^k makes the integrand smooth for k(1+s) ≥ 1.
        let k = (1.0 / (1.0 + s)).max(1.0);
        return composite_real(&uniform_mesh(0.0, 1.0, 4000), |t| {
            if t == 0.0 {
                return 0.0;
            }
            let x = hi * t.powf(k);
            x.powf(s) * (-rate * x).exp() * hi * k * t.powf(k - 1.0)
        });
    }
    // Geometric mesh handles slowly decaying integrands on long ranges.
    let hi = if hi.is_finite() { hi } else { lo + 80.0 / rate };
    let panels = 6000;
    let ratio = (hi / lo).powf(1.0 / panels as f64);
    let mesh: Vec<f64> = (0..=panels).map(|k| lo * ratio.powi(k)).collect();
    composite_real(&mesh, |x| x.powf(s) * (-rate * x).exp())
}

#[test]
fn stable_intensities_have_closed_forms() {
    let p = TemperedStableParams::stable(1.0, 1.0, 1.0).unwrap();
    assert_eq!(big_jump_intensity(&p, 1.0).unwrap(), 2.0);
    let p = TemperedStableParams::stable(2.0, 0.0, 0.7).unwrap();
    assert!(rel_close(big_jump_intensity(&p, 1.0).unwrap(), 2.0 / 0.7, 1e-15));
}

#[test]
fn stable_intensity_matches_quadrature() {
    for &alpha in &[0.4, 0.7, 1.0, 1.1, 1.7] {
        let p = TemperedStableParams::stable(1.5, 0.5, alpha).unwrap();
        // ∫_1^∞ x^{-1-α} dx = ∫_0^1 t^{α-1} dt after x = 1/t.
        // t = s^{1/α} turns t^{α-1} dt into a constant.
        let k = 1.0 / alpha;
        let one_side = composite_real(&uniform_mesh(0.0, 1.0, 2000), |s| {
            if s == 0.0 {
                return 0.0;
            }
            let t = s.powf(k);
            t.powf(alpha - 1.0) * k * s.powf(k - 1.0)
        });
        assert!(rel_close(big_jump_intensity(&p, 1.0).unwrap(), 2.0 * one_side, 1e-8), "alpha={alpha}");
    }
}

#[test]
fn tempered_intensity_matches_two_rules() {
    let p = TemperedStableParams::new(2.0, 0.0, 1.0, 0.0, 0.7).unwrap();
    let lambda = big_jump_intensity(&p, 1.0).unwrap();
    let gl = 2.0 * power_exp(-1.7, 1.0, 1.0, f64::INFINITY);
    // Second rule: x = 1 + y/(1-y) maps (1, ∞) to (0, 1), then composite Simpson.
    let f = |y: f64| {
        if y >= 1.0 {
            return 0.0;
        }
        let x = 1.0 + y / (1.0 - y);
        2.0 * x.powf(-1.7) * (-x).exp() / ((1.0 - y) * (1.0 - y))
    };
    let n = 200_000;
    let h = 1.0 / n as f64;
    let mut simpson = f(0.0) + f(1.0);
    for i in 1..n {
        simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    simpson *= h / 3.0;
    assert!(rel_close(lambda, gl, 1e-8));
    assert!(rel_close(lambda, simpson, 1e-8));
    assert!(rel_close(tail_intensity(&p, 0.1).unwrap(), 2.0 * power_exp(-1.7, 1.0, 0.1, f64::INFINITY), 1e-8));
}

#[test]
fn drift_examples() {
    let sym = TemperedStableParams::stable(1.0, 1.0, 0.7).unwrap();
    assert_eq!(small_jump_drift(&sym, 1.0).unwrap(), 0.0);
    assert_eq!(small_jump_drift(&sym, 0.3).unwrap(), 0.0);
    let sym = TemperedStableParams::stable(1.0, 1.0, 1.1).unwrap();
    assert_eq!(small_jump_drift(&sym, 1.0).unwrap(), 0.0);
    let skew = TemperedStableParams::stable(2.0, 0.0, 1.1).unwrap();
    assert_eq!(small_jump_drift(&skew, 1.0).unwrap(), 0.0);
    let skew = TemperedStableParams::stable(2.0, 0.0, 0.7).unwrap();
    let b = small_jump_drift(&skew, 1.0).unwrap();
    assert!(rel_close(b, 2.0 / 0.3, 1e-10));
    assert!(rel_close(b, 2.0 * power_exp(-0.7, 0.0, 0.0, 1.0), 1e-8));
}

#[test]
fn moments_match_quadrature() {
    let p = TemperedStableParams::new(2.0, 1.0, 1.0, 0.5, 1.3).unwrap();
    let m1 = signed_first_moment(&p, 0.2, 1.0).unwrap();
    let want = 2.0 * power_exp(-1.3, 1.0, 0.2, 1.0) - power_exp(-1.3, 0.5, 0.2, 1.0);
    assert!(rel_close(m1, want, 1e-8));
    let m2 = second_moment_below(&p, 0.5).unwrap();
    let want = 2.0 * power_exp(-0.3, 1.0, 0.0, 0.5) + power_exp(-0.3, 0.5, 0.0, 0.5);
    assert!(rel_close(m2, want, 1e-8));
}

#[test]
fn orey_condition_holds_on_geometric_grid() {
    for config in table_configs() {
        let (m, alpha) = orey_constants(&config.params, 1.0).unwrap();
        for k in 0..50 {
            let eta = 10f64.powf(-4.0 * k as f64 / 49.0);
            let lhs = second_moment_below(&config.params, eta).unwrap();
            assert!(lhs >= m * eta.powf(2.0 - alpha) * (1.0 - 1e-12), "{config:?} eta={eta}");
        }
    }
}

#[test]
fn orey_constant_needs_unit_threshold() {
    let p = TemperedStableParams::stable(1.0, 1.0, 1.0).unwrap();
    assert_eq!(orey_constants(&p, 1.0).unwrap(), (2.0, 1.0));
    let half = TemperedStableParams::stable(0.5, 0.5, 1.0).unwrap();
    assert_eq!(orey_constants(&half, 1.0).unwrap(), (1.0, 1.0));
    assert!(matches!(orey_constants(&p, 0.5), Err(Error::UnsupportedThreshold(_))));
}

#[test]
fn density_values() {
    let p = TemperedStableParams::new(2.0, 1.0, 1.0, 0.5, 0.7).unwrap();
    assert!(matches!(levy_density(&p, 0.0), Err(Error::DensityAtZero)));
    assert!(rel_close(levy_density(&p, 2.0).unwrap(), 2.0 * 2f64.powf(-1.7) * (-2.0f64).exp(), 1e-15));
    assert!(rel_close(levy_density(&p, -2.0).unwrap(), 2f64.powf(-1.7) * (-1.0f64).exp(), 1e-15));
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(TemperedStableParams::stable(1.0, 1.0, 2.0).is_err());
    assert!(TemperedStableParams::stable(1.0, 1.0, 0.0).is_err());
    assert!(TemperedStableParams::stable(-1.0, 1.0, 1.0).is_err());
    assert!(TemperedStableParams::stable(0.0, 0.0, 1.0).is_err());
    assert!(TemperedStableParams::new(1.0, 1.0, -1.0, 0.0, 1.0).is_err());
    let p = TemperedStableParams::stable(1.0, 1.0, 1.0).unwrap();
    assert!(ProcessConfig::new(p, 1.0, 0.0, 0.0, 10).is_err());
    assert!(ProcessConfig::new(p, 1.0, 1.0, -0.1, 10).is_err());
    assert!(ProcessConfig::new(p, 1.0, 1.0, 0.0, 0).is_err());
}

#[test]
fn stable_law_scale_matches_exponent() {
    // The closed-form S(α, β, σ, μ) law must reproduce the quadrature exponent.
    for (p, q, alpha) in [(1.0, 1.0, 1.0), (2.0, 0.0, 0.7), (2.0, 0.0, 1.1), (1.0, 3.0, 1.7)] {
        let params = TemperedStableParams::stable(p, q, alpha).unwrap();
        let law = StableLaw::from_params(&params).unwrap();
        for &u in &[0.5, 2.0, 6.0] {
            let want = small_exponent(&params, u) + big_exponent(&params, u);
            assert!((law.log_cf(u) - want).norm() < 1e-6 * (1.0 + want.norm()), "{params:?} u={u}");
        }
    }
}
