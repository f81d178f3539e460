//! Draw seeded increments from a stable and a tempered stable model, write them as CSV and
//! read them back.

use smalljumps::estimators::small_jump_mean;
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let stable = ProcessConfig::jumps_only(TemperedStableParams::stable(1.0, 1.0, 1.1)?, 0.1, 2000)?;
    let tempered = ProcessConfig::jumps_only(TemperedStableParams::new(2.0, 0.0, 1.0, 0.0, 0.7)?, 1.0, 2000)?;

    for (name, config) in [("stable", stable), ("tempered", tempered)] {
        let sample = sample_full_increments(&config, Seed::new(42, 0))?;
        let mean = sample.values.iter().sum::<f64>() / sample.len() as f64;
        println!(
            "{name:>8}: sampler={} n={} sample mean={mean:+.4} small-jump mean={:+.4}",
            sample.sampler.name(),
            sample.len(),
            small_jump_mean(&config)?
        );
    }

    // Jumps above 1 in absolute value only, and the small jumps only.
    let big = sample_big_jump_increments(&stable, 1)?;
    let small = sample_small_jump_increments(&stable, 1, CpOptions::default())?;
    println!("big-jump part: {} nonzero of {}", big.values.iter().filter(|v| **v != 0.0).count(), big.len());
    println!("small-jump part: max |x| = {:.4}", small.values.iter().fold(0.0f64, |a, v| a.max(v.abs())));

    let path = std::env::temp_dir().join("smalljumps_sample.csv");
    let sample = sample_full_increments(&tempered, 7)?;
    sample.write_csv(&path)?;
    let back = IncrementSample::read_csv(&path)?;
    assert_eq!(back.values, sample.values);
    println!("wrote and re-read {} ({} values)", path.display(), back.len());
    print!("{}", sample.to_csv().lines().take(8).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
