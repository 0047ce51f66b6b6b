use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use peakspread_core::{Money, Rate, TimeOfDay};

mod commands;
mod config;
mod error;
mod provenance;

/// Step-toll synthesis, verification, calibration and arrival simulation.
#[derive(Debug, Parser)]
#[command(name = "peakspread", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration (required by `simulate`).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Simulation threads; the output does not depend on this.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the step schedule that realizes an arrival map.
    Synthesize {
        /// Arrival map CSV.
        #[arg(long)]
        map: PathBuf,
        /// Price of the first step, in dollars.
        #[arg(long, default_value = "0")]
        p1: Money,
        /// Widen the schedule domain (defaults to the first slot time).
        #[arg(long)]
        domain_start: Option<TimeOfDay>,
        /// Widen the schedule domain (defaults to the preferred time).
        #[arg(long)]
        domain_end: Option<TimeOfDay>,
    },
    /// Check exactly that a schedule realizes an arrival map.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Tabulate the arrival map a schedule induces.
    Fpmap {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        preferred: TimeOfDay,
        /// Grid spacing in $/min.
        #[arg(long, default_value = "0.001")]
        b_step: Rate,
        /// Largest grid value in $/min; by default just past the rate that
        /// makes the preferred time optimal.
        #[arg(long)]
        b_max: Option<Rate>,
    },
    /// Fit the willingness-to-pay location for each sigma from observed flow.
    Calibrate {
        /// Flow CSV with `time,count` rows.
        #[arg(long)]
        flow: PathBuf,
        /// The schedule in force when the flow was observed.
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        preferred: TimeOfDay,
        /// Comma-separated sigma values in $/min.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_grid: Vec<f64>,
        /// Average counts within this many minutes of each peak.
        #[arg(long, default_value_t = 0)]
        window: u32,
    },
    /// Monte Carlo arrival histogram for a run configuration.
    Simulate {
        /// Overrides the configured number of draws.
        #[arg(long)]
        draws: Option<u64>,
        /// Adds a `fraction` column to the histogram.
        #[arg(long)]
        fraction: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PEAKSPREAD_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
