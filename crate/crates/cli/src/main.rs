use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use commands::RunContext;
use config::Config;
use error::CliError;

/// Scans and checks for the dissipation / estimation-precision trade-off.
#[derive(Parser)]
#[command(name = "infobound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML file of flat `section.key` settings.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the `seed` key.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads; never changes results. Defaults to the core count.
    #[arg(long, value_name = "N")]
    workers: Option<NonZeroUsize>,
    /// Overrides a single config key, e.g. `--set piston.k_grid=[1,4]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Jarzynski identity on random unitary drives.
    VerifyJarzynski(Common),
    /// Staged piston expansion over an (r, k) grid.
    ScanPiston(Common),
    /// Monte Carlo phase estimation with a finite-precision encoder.
    EstimatePhase(Common),
    /// Relative entropy against its Fisher quadratic.
    KlFisher(Common),
    /// Consolidated report for one row of a finished run.
    TradeoffReport {
        #[command(flatten)]
        common: Common,
        /// CSV written by scan-piston or estimate-phase.
        #[arg(long, value_name = "CSV")]
        input: PathBuf,
    },
}

fn context(common: &Common) -> Result<RunContext, CliError> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for assignment in &common.overrides {
        config.set_override(assignment)?;
    }
    if let Some(seed) = common.seed {
        config.set_seed(seed);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.workers {
        builder = builder.num_threads(n.get());
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(RunContext {
        config,
        out: common.out.clone(),
        pool,
    })
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::VerifyJarzynski(c) => commands::jarzynski::run(&context(&c)?),
        Command::ScanPiston(c) => commands::piston::run(&context(&c)?),
        Command::EstimatePhase(c) => commands::phase::run(&context(&c)?),
        Command::KlFisher(c) => commands::kl_fisher::run(&context(&c)?),
        Command::TradeoffReport { common, input } => {
            commands::report::run(&context(&common)?, &input)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
