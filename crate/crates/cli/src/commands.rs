//! Subcommand implementations, independent of argument parsing.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use greenfront::engine::run;
use greenfront::export::FrontExport;
use greenfront::market_data::{align_carbon, estimate_moments, load_carbon, load_returns, AssetUniverse, CsvFormat};
use greenfront::preferences::{filter_region, GreenLabel, PreferenceFilter, ProfileConfig, RiskLabel};
use greenfront::report::{self, Report};

use crate::config::RunConfig;

/// Exit status for a request whose region of interest is empty.
pub const EXIT_EMPTY_REGION: i32 = 2;

/// Builds an instance file from a returns CSV and a carbon CSV.
pub fn cmd_ingest(
    returns_csv: &Path,
    carbon_csv: &Path,
    out: &Path,
    format: &CsvFormat,
    carbon_range: (f64, f64),
) -> Result<AssetUniverse> {
    let returns = load_returns(returns_csv, format)?;
    let scores = load_carbon(carbon_csv)?;
    let carbon = align_carbon(returns.asset_ids(), &scores)?;
    let universe = estimate_moments(&returns, &carbon, carbon_range)?;
    universe.save(out)?;
    Ok(universe)
}

/// Runs the optimizer and writes the front export.
pub fn cmd_optimize(instance: &Path, config: &RunConfig, out: &Path) -> Result<FrontExport> {
    let universe = AssetUniverse::load(instance)?;
    let bounds = config.bounds(universe.n_assets())?;
    let result = run(&universe, &bounds, &config.engine)?;
    let front = FrontExport::from_run(&universe, &bounds, &config.engine, &result)?;
    front.save(out)?;
    Ok(front)
}

/// How a filter request names its thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FilterSpec {
    Profile(GreenLabel, RiskLabel),
    Thresholds(PreferenceFilter),
}

/// Ids of the front entries inside the requested region, with the filter
/// that was applied.
pub fn cmd_filter(front: &FrontExport, spec: FilterSpec, profiles: &ProfileConfig) -> Result<(PreferenceFilter, Vec<usize>)> {
    let filter = match spec {
        FilterSpec::Thresholds(f) => f,
        FilterSpec::Profile(g, r) => {
            profiles.validate()?;
            greenfront::preferences::reference_vectors(
                &front.entries,
                profiles.green_percentiles(),
                profiles.risk_percentiles(),
            )?
            .filter(g, r)
        }
    };
    Ok((filter, filter_region(&front.entries, filter).ids()))
}

/// Renders the representatives table and, for a single profile, the scatter
/// data file.
pub fn cmd_report(
    front: &FrontExport,
    selection: &[(GreenLabel, RiskLabel)],
    profiles: &ProfileConfig,
    out: Option<&Path>,
    scatter: Option<&Path>,
) -> Result<Report> {
    let rep = report::render(front, profiles, selection)?;
    if let Some(path) = out {
        fs::write(path, &rep.text).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = scatter {
        let &[(g, r)] = selection else {
            anyhow::bail!("scatter data needs exactly one profile pair");
        };
        let refs = greenfront::preferences::reference_vectors(
            &front.entries,
            profiles.green_percentiles(),
            profiles.risk_percentiles(),
        )?;
        let res = report::evaluate_profile(front, &refs, g, r)?;
        fs::write(path, report::scatter_csv(front, &res)?).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(rep)
}

/// All nine profile pairs in table order.
pub fn all_profiles() -> Vec<(GreenLabel, RiskLabel)> {
    GreenLabel::ALL
        .into_iter()
        .flat_map(|g| RiskLabel::ALL.into_iter().map(move |r| (g, r)))
        .collect()
}
