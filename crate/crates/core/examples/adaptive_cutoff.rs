//! Penalized contrast selection of the cutoff and the effect of the penalty constant.

use smalljumps::prelude::*;
use smalljumps::selection::{theoretical_kappa, DEFAULT_KAPPA};

fn main() -> Result<()> {
    let params = TemperedStableParams::stable(1.0, 1.0, 0.7)?;
    let config = ProcessConfig::jumps_only(params, 0.1, 1000)?;
    let sample = sample_full_increments(&config, 5)?;
    let grid = CutoffGrid::default_for(&config)?;
    println!("{} candidate cutoffs in [{:.4}, {:.1}]", grid.len(), grid.m_values[0], grid.max());

    for kappa in [0.3, DEFAULT_KAPPA, theoretical_kappa()] {
        let plan = SelectionPlan::for_kind(&config, EstimatorKind::KnownNoise, grid.clone(), kappa)?;
        let trace = plan.select(&sample.values)?;
        println!(
            "kappa {kappa:.4}: m_hat = {:.3} (below theoretical constant: {})",
            trace.m_hat, trace.below_theoretical_kappa
        );
    }

    // One-off selection with an arbitrary noise CF.
    let cf = ProcessCf::new(&config)?;
    let (m_hat, trace) = select_cutoff(&sample, &grid, |u| cf.big(u), config.lambda_delta()?, DEFAULT_KAPPA)?;
    let row = &trace.rows[trace.index];
    println!("m_hat = {m_hat:.3}: contrast {:.5} + penalty {:.5}", row.contrast, row.penalty);
    let direct = contrast(&sample, m_hat, |u| cf.big(u).expect("big-jump CF"))?;
    println!("contrast recomputed with a refined step: {direct:.5}");
    print!("{}", trace.to_csv().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
