use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use acaslab::cli::{self, CliError, FalsifyOptions, SimulateOptions};

#[derive(Parser)]
#[command(name = "acaslab", version, about = "Collision-avoidance game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a region at the scenario's initial state.
    CheckRegion {
        scenario: PathBuf,
        /// l-inf, l-inf-horiz, c-eps or c-safeable; defaults to the model's region.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Run the scenario and optionally write the trace as CSV.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Run even if the initial state is outside the region.
        #[arg(long)]
        allow_unsafe_initial: bool,
        /// Fly the lower nominal trajectory instead of the winning strategy.
        #[arg(long)]
        nominal_replay: bool,
    },
    /// Search intruder schedules for an NMAC.
    Falsify {
        scenario: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Where to write the replay scenario.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Rasterize a region over an (r, h) grid.
    Raster {
        grid: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List candidate advisories that pass the region at the initial state.
    FilterAdvisories {
        scenario: PathBuf,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Also try the synthesized rate grid.
        #[arg(long)]
        synthesize: bool,
    },
}

fn dispatch(command: Command) -> Result<i32, CliError> {
    let stdout = std::io::stdout();
    let out = &mut stdout.lock();
    match command {
        Command::CheckRegion { scenario, kind, catalog } => {
            cli::cmd_check_region(&scenario, kind.as_deref(), catalog.as_deref(), out)
        }
        Command::Simulate { scenario, out: csv, catalog, allow_unsafe_initial, nominal_replay } => {
            let opts = SimulateOptions {
                out: csv.as_deref(),
                catalog: catalog.as_deref(),
                allow_unsafe_initial,
                nominal_replay,
            };
            cli::cmd_simulate(&scenario, &opts, out)
        }
        Command::Falsify { scenario, budget, workers, replay, catalog } => {
            let opts = FalsifyOptions {
                budget,
                workers,
                replay: replay.as_deref(),
                catalog: catalog.as_deref(),
            };
            cli::cmd_falsify(&scenario, &opts, out)
        }
        Command::Raster { grid, out: csv } => cli::cmd_raster(&grid, csv.as_deref(), out),
        Command::FilterAdvisories { scenario, kind, catalog, synthesize } => {
            cli::cmd_filter_advisories(&scenario, kind.as_deref(), catalog.as_deref(), synthesize, out)
        }
    }
}

fn main() -> ExitCode {
    let args = match Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_ERROR } else { cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(args.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::EXIT_ERROR as u8)
        }
    }
}
