//! The three spectral estimators on one sample, scored against the exact-CF benchmark.

use smalljumps::estimators::{benchmark_density_auto, default_x_grid};
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let params = TemperedStableParams::stable(1.0, 1.0, 1.1)?;
    let config = ProcessConfig::jumps_only(params, 0.1, 1000)?;
    let grid = default_x_grid(&config)?;
    let bench = benchmark_density_auto(&config, &grid)?;
    println!(
        "grid [{:.3}, {:.3}] with {} points, benchmark ell = {}, mass = {:.6}",
        grid.start,
        grid.end(),
        grid.len,
        bench.m,
        bench.mass()
    );

    let sample = sample_full_increments(&config, 11)?;
    let m = 8.5;
    let known = estimate_known_noise(&sample, m, &grid)?;
    let direct = estimate_direct(&sample, m, &grid)?;
    println!("known-noise  m={m}: relative L2 risk {:.4e}", relative_l2_error(&known, &bench)?);
    println!("direct       m={m}: relative L2 risk {:.4e}", relative_l2_error(&direct, &bench)?);

    // Brownian perturbation needs the Gaussian-noise estimator.
    let noisy = config.with_sigma(0.2);
    let bench_noisy = benchmark_density_auto(&noisy, &grid)?;
    let sample = sample_full_increments(&noisy, 11)?;
    let gauss = estimate_gaussian_noise(&sample, m, &grid)?;
    println!("gaussian     m={m}: relative L2 risk {:.4e}", relative_l2_error(&gauss, &bench_noisy)?);
    match estimate_gaussian_noise(&sample_full_increments(&config, 1)?, m, &grid) {
        Err(e) => println!("sigma = 0 is rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // The benchmark itself is an inversion of the exact CF.
    let cf = ProcessCf::new(&config)?;
    let x = XGrid::centered(0.0, 1.0, 5)?;
    let values = fourier_invert(|u| cf.small(u), 200.0, &x)?;
    for (k, v) in values.iter().enumerate() {
        println!("g({:+.2}) = {v:.5}", x.point(k));
    }
    Ok(())
}
