//! Command-line front end for the interweave spectrum-sharing models.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use clap::{Parser, Subcommand};
use commands::CommandContext;
use config::ConfigDocument;
use error::{CliError, CliResult};
use output::{prepare_out_dir, Provenance};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "interweave",
    version,
    about = "Capacity, admissibility, and detector analysis for interweave cognitive-radio spectrum sharing"
)]
struct Cli {
    /// TOML configuration document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for tables and plots.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also emit SVG plots next to the CSV tables.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spectral efficiency factor over an occupancy grid, per power ratio.
    EtaSweep,
    /// Achievable rate-region polygons (ideal and error-prone detection).
    RateRegion,
    /// Weak/strong admissibility lattice over (p_fa, p_md).
    AdmissibleGrid,
    /// Detector ROC curves with the admissibility mask.
    DetectorRoc,
    /// Slot-level Monte Carlo run checked against the analytic model.
    Simulate,
}

fn real_main(cli: &Cli) -> CliResult<()> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::config("--config <path> is required"))?;
    let (config, config_bytes) = ConfigDocument::load(config_path)?;
    let seed = cli.seed.unwrap_or(config.seed);
    prepare_out_dir(&cli.out)?;
    let provenance = Provenance::new(&config_bytes, seed);
    let ctx = CommandContext {
        config: &config,
        provenance: &provenance,
        out_dir: &cli.out,
        seed,
        svg: cli.svg,
    };
    match cli.command {
        Command::EtaSweep => commands::eta_sweep(&ctx),
        Command::RateRegion => commands::rate_region(&ctx),
        Command::AdmissibleGrid => commands::admissible_grid_cmd(&ctx),
        Command::DetectorRoc => commands::detector_roc(&ctx),
        Command::Simulate => commands::simulate(&ctx),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = real_main(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
