mod capacity;
mod complexity;
mod recall;
mod sweep;

use anyhow::{Context, Result};

use crate::args::{Cli, Command};

/// Runs the chosen subcommand. `Ok(false)` means the output was written but
/// an internal check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            return Err(crate::UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("cannot start worker threads")?;
    }
    match &cli.command {
        Command::NeuronSweep(a) => sweep::run(&cli.global, a).map(|()| true),
        Command::Recall(a) => recall::run(&cli.global, a).map(|()| true),
        Command::Capacity(a) => capacity::run(&cli.global, a, false).map(|()| true),
        Command::TuneU(a) => capacity::run(&cli.global, a, true).map(|()| true),
        Command::Complexity(a) => complexity::run(&cli.global, a),
    }
}
