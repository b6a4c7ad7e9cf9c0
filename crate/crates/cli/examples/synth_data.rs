//! Writes a synthetic `returns.csv` / `carbon.csv` pair for trying the CLI.
//!
//! cargo run --example synth_data -- <out_dir> [n_assets] [periods] [seed]

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use greenfront::synthetic;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().map(String::as_str).unwrap_or("data"));
    let n: usize = args.get(1).map_or(Ok(22), |s| s.parse()).context("n_assets")?;
    let periods: usize = args.get(2).map_or(Ok(120), |s| s.parse()).context("periods")?;
    let seed: u64 = args.get(3).map_or(Ok(7), |s| s.parse()).context("seed")?;

    let returns = synthetic::returns(n, periods, seed)?;
    let carbon = synthetic::carbon_scores(n, seed);
    fs::create_dir_all(&out)?;

    let mut text = returns.asset_ids().join(",");
    text.push('\n');
    for row in returns.observations() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(text, "{}", cells.join(","))?;
    }
    fs::write(out.join("returns.csv"), text)?;

    let mut text = String::from("asset_id,carbon\n");
    for (id, c) in returns.asset_ids().iter().zip(&carbon) {
        writeln!(text, "{id},{c}")?;
    }
    fs::write(out.join("carbon.csv"), text)?;
    eprintln!("wrote {n} assets x {periods} periods to {}", out.display());
    Ok(())
}
