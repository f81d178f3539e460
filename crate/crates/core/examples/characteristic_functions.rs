//! Exact characteristic functions of the components against the empirical CF.

use smalljumps::prelude::*;

fn main() -> Result<()> {
    let params = TemperedStableParams::stable(1.0, 1.0, 1.0)?;
    let config = ProcessConfig::new(params, 1.0, 1.0, 0.5, 20_000)?;
    let cf = ProcessCf::new(&config)?;
    let sample = sample_full_increments(&config, 3)?;

    println!("{:>5} {:>22} {:>22} {:>10} {:>22}", "u", "phi_Z", "phi_B", "gauss", "|emp - exact|");
    for u in [0.25, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let small = cf.small(u)?;
        let big = cf.big(u)?;
        let exact = cf.process(u)?;
        let emp = empirical_cf(&sample, u);
        println!(
            "{u:>5.2} {:>10.6}{:+10.6}i {:>10.6}{:+10.6}i {:>10.6} {:>22.3e}",
            small.re,
            small.im,
            big.re,
            big.im,
            cf.gaussian(u),
            (emp - exact).norm()
        );
    }

    // Dividing by the nuisance CF recovers phi_Z up to sampling noise.
    let u = 1.0;
    let deconv = deconvolved_cf(&sample, u, |v| cf.noise(v).expect("noise CF"))?;
    println!("deconvolved at u={u}: {deconv:.5}, exact phi_Z: {:.5}", cf.small(u)?);
    println!("3/sqrt(n) = {:.4}", 3.0 / (sample.len() as f64).sqrt());

    let grid = CfGrid::symmetric(2.0, 0.5, |u| cf.small(u))?;
    print!("{}", grid.to_csv());
    Ok(())
}
