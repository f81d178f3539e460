//! Benchmark and a few estimates on a common grid, ready for an overlay plot.

use smalljumps::experiments::plot_data;
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let config = ProcessConfig::new(TemperedStableParams::stable(1.0, 1.0, 1.0)?, 1.0, 0.1, 0.2, 5000)?;
    let csv = plot_data(&ExperimentSpec::new(config).with_seed(3), 5)?;
    let path = std::env::temp_dir().join("smalljumps_plot.csv");
    std::fs::write(&path, &csv)?;
    println!("{} rows written to {}", csv.lines().count() - 2, path.display());
    for line in csv.lines().take(2) {
        println!("{line}");
    }
    Ok(())
}
