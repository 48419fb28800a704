//! Argument parsing and command dispatch.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::report::{self, Artifact, Workspace};

#[derive(Parser)]
#[command(
    name = "tourflow",
    version,
    about = "Deterministic reports over country-level tourism flow networks"
)]
struct Cli {
    /// Run configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides `out_dir` from the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for every randomized analysis.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Aggregation window as `start:end`, e.g. `2004:2018`.
    #[arg(long, global = true, value_parser = parse_years)]
    years: Option<(i32, i32)>,

    /// Geographic distance bin width in km.
    #[arg(long = "bin-km", global = true)]
    bin_km: Option<f64>,

    /// Null-model ensemble size.
    #[arg(long, global = true)]
    ensemble: Option<usize>,

    /// Louvain restarts.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

fn parse_years(value: &str) -> Result<(i32, i32), String> {
    let Some((start, end)) = value.split_once(':') else {
        return Err(format!("expected start:end, got `{value}`"));
    };
    let start: i32 = start
        .trim()
        .parse()
        .map_err(|_| format!("bad start year `{start}`"))?;
    let end: i32 = end
        .trim()
        .parse()
        .map_err(|_| format!("bad end year `{end}`"))?;
    if start > end {
        return Err(format!("start year {start} is after end year {end}"));
    }
    Ok((start, end))
}

#[derive(Subcommand)]
enum Command {
    /// Parse all four input files and print dataset counts.
    IngestCheck,
    /// Write metrics.json (density, degrees, reciprocity, clustering,
    /// balance, triangle summary, flow evolution).
    Metrics,
    /// Write triangles.csv with the per-country triangle census.
    Triangles,
    /// Write communities.csv with raw and population-normalized partitions.
    Communities,
    /// Write profiles/*.csv: distance profiles, argmax matrix, quadrants.
    Profiles,
    /// Write nullmodel.csv with configuration-model ensemble statistics.
    Nullmodel,
    /// Write balance.csv with per-country balance scores.
    Balance,
    /// Write alpha.csv with per-edge flow growth between the window years.
    Alpha,
    /// Write every report file (the union of the other subcommands).
    Report,
}

fn resolved_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .context("--config <file> is required (there are no default input paths)")?;
    let mut config = RunConfig::load(path)?;
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some((start, end)) = cli.years {
        config.year_start = Some(start);
        config.year_end = Some(end);
    }
    if let Some(bin_km) = cli.bin_km {
        anyhow::ensure!(bin_km > 0.0, "--bin-km must be positive, got {bin_km}");
        config.bin_km = bin_km;
    }
    if let Some(ensemble) = cli.ensemble {
        anyhow::ensure!(ensemble >= 1, "--ensemble must be at least 1");
        config.ensemble = ensemble;
    }
    if let Some(restarts) = cli.restarts {
        anyhow::ensure!(restarts >= 1, "--restarts must be at least 1");
        config.restarts = restarts;
    }
    Ok(config)
}

fn emit(config: &RunConfig, artifacts: Vec<Artifact>) -> Result<()> {
    let written = report::write_artifacts(&config.out_dir, &artifacts)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn run() -> Result<()> {
    let cli = Cli::parse();
    let config = resolved_config(&cli)?;
    let ws: Workspace = report::load(&config)?;
    match cli.command {
        Command::IngestCheck => {
            print!("{}", report::ingest_summary(&ws));
            Ok(())
        }
        Command::Metrics => emit(&config, vec![report::metrics_artifact(&ws, &config)?]),
        Command::Triangles => emit(&config, vec![report::triangles_artifact(&ws, &config)]),
        Command::Communities => emit(&config, vec![report::communities_artifact(&ws, &config)?]),
        Command::Profiles => emit(&config, report::profile_artifacts(&ws, &config)?),
        Command::Nullmodel => emit(&config, vec![report::nullmodel_artifact(&ws, &config)?]),
        Command::Balance => emit(&config, vec![report::balance_artifact(&ws, &config)]),
        Command::Alpha => emit(&config, vec![report::alpha_artifact(&ws, &config)?]),
        Command::Report => emit(&config, report::all_artifacts(&ws, &config)?),
    }
}
