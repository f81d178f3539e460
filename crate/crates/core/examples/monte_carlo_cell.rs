//! One Monte Carlo cell with its published reference value.
//!
//! `cargo run --release --example monte_carlo_cell -- 100` runs the full 100 replications.

use smalljumps::experiments::{paper_value, TableId};
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let config = ProcessConfig::jumps_only(TemperedStableParams::stable(1.0, 1.0, 1.1)?, 0.1, 1000)?;
    let spec = ExperimentSpec::new(config).with_replications(reps).with_seed(2024);

    let start = std::time::Instant::now();
    let report = run_monte_carlo(spec)?;
    println!(
        "{} replications in {:.1?}: risk {:.3e} ({:.2e}), m_hat {:.2} ({:.2})",
        report.replications,
        start.elapsed(),
        report.mean_rel_l2,
        report.std_rel_l2,
        report.mean_m_hat,
        report.std_m_hat
    );
    if let Some(p) = paper_value(TableId::T1, &config)? {
        println!(
            "published: risk {:.3e} ({:.2e}), m_hat {:.2}; z-score {:.2}, inside band: {}",
            p.mean,
            p.std,
            p.m_mean,
            p.z_score(report.mean_rel_l2),
            p.contains(report.mean_rel_l2)
        );
    }

    // Same cell at a fixed cutoff and at the theoretical cutoff.
    for mode in [CutoffMode::Fixed { m: 8.0 }, CutoffMode::Oracle] {
        let r = run_monte_carlo(spec.with_cutoff(mode))?;
        println!("{mode:?}: risk {:.3e}, m {:.3}", r.mean_rel_l2, r.mean_m_hat);
    }
    Ok(())
}
