//! Reproduce a whole table and print its CSV.
//!
//! `cargo run --release --example reproduce_table -- T4 100` matches the CLI `table T4`.

use smalljumps::experiments::reproduce_table_with;
use smalljumps::prelude::*;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let id: TableId = args.next().as_deref().unwrap_or("T4").parse()?;
    let reps = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let table = reproduce_table_with(id, 7, reps)?;
    print!("{}", table.to_csv());
    let inside = table
        .rows
        .iter()
        .filter(|r| r.cell.paper.is_some_and(|p| p.contains(r.report.mean_rel_l2)))
        .count();
    eprintln!("{inside} of {} cells inside the published band", table.rows.len());
    Ok(())
}
