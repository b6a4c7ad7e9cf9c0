use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use greenfront::export::FrontExport;
use greenfront::market_data::{AssetUniverse, CsvFormat, DEFAULT_CARBON_RANGE};
use greenfront::preferences::{GreenLabel, PreferenceFilter, RiskLabel};
use greenfront_cli::commands::{all_profiles, cmd_filter, cmd_ingest, cmd_optimize, cmd_report, FilterSpec, EXIT_EMPTY_REGION};
use greenfront_cli::config::{load_profiles, RunConfig};
use greenfront_cli::server::{serve, AppState};
use serde_json::json;

/// Mean-variance-carbon portfolio fronts.
#[derive(Parser)]
#[command(name = "greenfront", version)]
struct Cli {
    /// Overrides the seed from the run config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate moments from a returns CSV and join carbon scores.
    Ingest {
        #[arg(long)]
        returns: PathBuf,
        #[arg(long)]
        carbon: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
        #[arg(long, default_value = "monthly")]
        period: String,
        #[arg(long, default_value_t = DEFAULT_CARBON_RANGE.0)]
        carbon_min: f64,
        #[arg(long, default_value_t = DEFAULT_CARBON_RANGE.1)]
        carbon_max: f64,
    },
    /// Run the optimizer and write the front.
    Optimize {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the ids inside a region of interest as JSON.
    Filter {
        #[arg(long)]
        front: PathBuf,
        #[arg(long, requires = "risk", conflicts_with_all = ["p_g", "p_r"])]
        green: Option<GreenLabel>,
        #[arg(long, requires = "green")]
        risk: Option<RiskLabel>,
        #[arg(long, requires = "p_r", allow_negative_numbers = true)]
        p_g: Option<f64>,
        #[arg(long, requires = "p_g", allow_negative_numbers = true)]
        p_r: Option<f64>,
        #[arg(long)]
        profiles: Option<PathBuf>,
    },
    /// Print the representatives table.
    Report(ReportArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, conflicts_with = "instance")]
        front: Option<PathBuf>,
        /// Optimize this instance in the background instead of loading a front.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, requires = "instance")]
        config: Option<PathBuf>,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    front: PathBuf,
    #[arg(long, requires = "risk", conflicts_with = "all")]
    green: Option<GreenLabel>,
    #[arg(long, requires = "green")]
    risk: Option<RiskLabel>,
    /// All nine profile pairs (the default when no pair is given).
    #[arg(long)]
    all: bool,
    #[arg(long)]
    profiles: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-entry scatter data for the selected pair.
    #[arg(long)]
    scatter: Option<PathBuf>,
}

fn run_config(path: Option<&PathBuf>, seed: Option<u64>) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.engine.seed = s;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Ingest {
            returns,
            carbon,
            out,
            delimiter,
            period,
            carbon_min,
            carbon_max,
        } => {
            if !delimiter.is_ascii() {
                bail!("delimiter must be a single ASCII character");
            }
            let format = CsvFormat {
                delimiter: delimiter as u8,
                period_label: period,
            };
            let u = cmd_ingest(&returns, &carbon, &out, &format, (carbon_min, carbon_max))?;
            eprintln!("{} assets, {} -> {}", u.n_assets(), u.digest(), out.display());
        }
        Command::Optimize { instance, config, out } => {
            let cfg = run_config(config.as_ref(), cli.seed)?;
            let front = cmd_optimize(&instance, &cfg, &out)?;
            eprintln!(
                "{} entries after {} evaluations in {:.1}s -> {}",
                front.entries.len(),
                front.run.evaluations,
                front.run.wall_time_secs,
                out.display()
            );
            let a = &front.anchors;
            for (name, id) in [("min risk", a.risk), ("max ret", a.ret), ("min carbon", a.carbon)] {
                let e = &front.entries[id];
                eprintln!("  {name:<10} id {id}: risk {:.6} ret {:.6} carbon {:.6}", e.risk, e.ret, e.carbon);
            }
        }
        Command::Filter {
            front,
            green,
            risk,
            p_g,
            p_r,
            profiles,
        } => {
            let front = FrontExport::load(&front)?;
            let spec = match (green, risk, p_g, p_r) {
                (Some(g), Some(r), _, _) => FilterSpec::Profile(g, r),
                (_, _, Some(pg), Some(pr)) => FilterSpec::Thresholds(PreferenceFilter::new(pg, pr)?),
                _ => bail!("give either --green/--risk or --p-g/--p-r"),
            };
            let profiles = load_profiles(profiles.as_deref())?;
            let (filter, ids) = cmd_filter(&front, spec, &profiles)?;
            let status = if ids.is_empty() { "empty_region" } else { "ok" };
            println!(
                "{}",
                json!({ "status": status, "p_g": filter.p_g, "p_r": filter.p_r, "ids": ids })
            );
            if ids.is_empty() {
                return Ok(EXIT_EMPTY_REGION as u8);
            }
        }
        Command::Report(args) => {
            let front = FrontExport::load(&args.front)?;
            let profiles = load_profiles(args.profiles.as_deref())?;
            let selection = match (args.green, args.risk) {
                (Some(g), Some(r)) => vec![(g, r)],
                _ => all_profiles(),
            };
            let rep = cmd_report(&front, &selection, &profiles, args.out.as_deref(), args.scatter.as_deref())?;
            if args.out.is_none() {
                print!("{}", rep.text);
            }
            if !rep.empty.is_empty() {
                for (g, r) in &rep.empty {
                    eprintln!("empty region: green={g} risk={r}");
                }
                return Ok(EXIT_EMPTY_REGION as u8);
            }
        }
        Command::Serve {
            front,
            instance,
            config,
            profiles,
            addr,
        } => {
            let profiles = load_profiles(profiles.as_deref())?;
            let state = match (front, instance) {
                (Some(f), None) => AppState::from_front(FrontExport::load(&f)?, profiles)?,
                (None, Some(i)) => {
                    let cfg = run_config(config.as_ref(), cli.seed)?;
                    let universe = AssetUniverse::load(&i)?;
                    let bounds = cfg.bounds(universe.n_assets())?;
                    AppState::live(universe, bounds, cfg.engine, profiles)?.0
                }
                _ => bail!("give either --front or --instance"),
            };
            serve(&addr, state)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    // clap's own usage-error status is 2, which is reserved for empty regions
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
