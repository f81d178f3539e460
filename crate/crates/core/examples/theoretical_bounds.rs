//! Bias and variance bounds, the cutoff balancing them, and the Brownian variant.

use smalljumps::estimators::{optimal_cutoff, optimal_cutoff_log_n};
use smalljumps::prelude::*;

fn main() -> Result<()> {
    // P = Q = 1/2, alpha = 1: M = 1 and lambda = 1, so log n = 8 gives m* = pi.
    let config = ProcessConfig::jumps_only(TemperedStableParams::stable(0.5, 0.5, 1.0)?, 1.0, 3000)?;
    println!("m* at log n = 8: {:.15}", optimal_cutoff_log_n(&config, 8.0)?);

    println!("{:>8} {:>12} {:>12} {:>12}", "m", "bias", "variance", "sum");
    for m in [1.0, 2.0, 3.0, 5.0, 10.0, 20.0] {
        let b = theoretical_bounds(&config, m, config.n)?;
        println!("{m:>8.2} {:>12.4e} {:>12.4e} {:>12.4e}", b.bias_bound, b.variance_bound, b.bias_bound + b.variance_bound);
    }

    let small_n = config.with_n(500);
    match optimal_cutoff(&small_n, small_n.n) {
        Err(e) => println!("n = 500: {e}"),
        Ok(m) => println!("n = 500: m* = {m}"),
    }

    for sigma in [0.2, 0.5, 1.0] {
        let c = config.with_sigma(sigma).with_n(5000);
        println!("sigma = {sigma}: m* = {:.5}", optimal_cutoff(&c, c.n)?);
    }
    Ok(())
}
