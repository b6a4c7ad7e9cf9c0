#![allow(dead_code)]

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use greenfront::engine::{run, EvMogaConfig};
use greenfront::export::FrontExport;
use greenfront::portfolio::Bounds;
use greenfront::synthetic;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_greenfront"))
}

pub fn exec(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn greenfront")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Writes synthetic returns and carbon CSVs into `dir`.
pub fn write_csvs(dir: &Path, n: usize, periods: usize, seed: u64) -> (PathBuf, PathBuf) {
    let r = synthetic::returns(n, periods, seed).unwrap();
    let mut text = r.asset_ids().join(",");
    text.push('\n');
    for row in r.observations() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(text, "{}", cells.join(",")).unwrap();
    }
    let returns = dir.join("returns.csv");
    fs::write(&returns, text).unwrap();
    let mut text = String::from("asset_id,carbon\n");
    for (id, c) in r.asset_ids().iter().zip(synthetic::carbon_scores(n, seed)) {
        writeln!(text, "{id},{c}").unwrap();
    }
    let carbon = dir.join("carbon.csv");
    fs::write(&carbon, text).unwrap();
    (returns, carbon)
}

pub fn small_cfg(seed: u64) -> EvMogaConfig {
    EvMogaConfig {
        nind_p: 100,
        nind_ga: 50,
        k_max: 100,
        n_box: 30,
        seed,
        ..EvMogaConfig::default()
    }
}

/// A small optimized front on a synthetic instance.
pub fn small_front(n: usize, seed: u64) -> FrontExport {
    let u = synthetic::instance(n, 60, seed).unwrap();
    let b = Bounds::unit(n);
    let cfg = small_cfg(seed);
    let r = run(&u, &b, &cfg).unwrap();
    FrontExport::from_run(&u, &b, &cfg, &r).unwrap()
}
