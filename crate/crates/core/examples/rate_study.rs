//! Risk against sample size at the theoretical cutoff, with the fitted log-log slope.

use smalljumps::experiments::theoretical_rate;
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let config = ProcessConfig::jumps_only(TemperedStableParams::stable(1.0, 1.0, 1.0)?, 1.0, 500)?;
    let mut spec = RateStudySpec::new(config, vec![500, 2000, 8000, 32000]);
    spec.replications = reps;
    spec.base_seed = 1;
    let study = rate_study(&spec)?;
    print!("{}", study.to_csv());
    println!("slope {:.3} (parametric rate: -1)", study.slope);
    println!("rate curve at n = 1e5: {:.3e}", theoretical_rate(&config.with_n(100_000))?);
    Ok(())
}
