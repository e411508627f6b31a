mod checks;
mod commands;
mod error;
mod output;

use clap::{Parser, Subcommand};

use crate::commands::{BoundArgs, EnsembleArgs, FiguresCommand, GraphArgs, SimulateArgs};
use crate::error::{CliError, Result};

/// Light-cone bounds, exact simulation and ensemble averages on factor graphs.
#[derive(Parser)]
#[command(name = "lightcone", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a standard graph, or read one and re-emit it.
    Graph(GraphArgs),
    /// Tabulate bound curves for a node pair.
    Bound(BoundArgs),
    /// Exact commutator norm for a fixed Hamiltonian.
    Simulate(SimulateArgs),
    /// Monte-Carlo average of the squared commutator norm over an ensemble.
    Ensemble(EnsembleArgs),
    /// Data behind the comparison figures.
    #[command(subcommand)]
    Figures(FiguresCommand),
    /// Run the built-in invariant checks.
    Check(checks::CheckArgs),
}

/// Sizes the global rayon pool from `LIGHTCONE_THREADS` when set.
fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("LIGHTCONE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("LIGHTCONE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(CliError::config)
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Graph(a) => commands::graph(&a),
        Command::Bound(a) => commands::bound(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Ensemble(a) => commands::ensemble(&a),
        Command::Figures(f) => commands::figures(&f),
        Command::Check(a) => checks::run(&a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("lightcone: {e}");
        std::process::exit(e.exit_code());
    }
}
