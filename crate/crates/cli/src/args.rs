use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qham::neuron::{ActivationKind, DEFAULT_MAX_ATTEMPTS};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qham", version, about = "Quantum Hopfield associative memory experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Root seed; every random draw derives from it.
    #[arg(long, global = true, env = "QHAM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Shots per circuit, overriding the config file.
    #[arg(long, global = true, env = "QHAM_SHOTS")]
    pub shots: Option<u64>,
    /// Device name from the registry, or `none`. Overrides the config file.
    #[arg(long, global = true, env = "QHAM_NOISE")]
    pub noise: Option<String>,
    /// Device registry JSON replacing the built-in one.
    #[arg(long, global = true, env = "QHAM_DEVICES")]
    pub devices: Option<PathBuf>,
    #[arg(long, global = true, env = "QHAM_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true, env = "QHAM_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads for trials and shots. Results do not depend on it.
    #[arg(long, global = true, env = "QHAM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Neuron output probability across the rotation half-angle.
    NeuronSweep(SweepArgs),
    /// One associative recall from a config file.
    Recall(ConfigArg),
    /// Capacity benchmark at a fixed update count.
    Capacity(ConfigArg),
    /// Capacity across a range of update counts, picking the best.
    TuneU(ConfigArg),
    /// Predicted against transpiled gate counts, with qubit overheads.
    Complexity(ComplexityArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// `simplified` or `rus`.
    #[arg(long, default_value_t = ActivationKind::Simplified)]
    pub kind: ActivationKind,
    #[arg(long, default_value_t = 33)]
    pub points: usize,
    /// Sample shots even when an exact marginal is available.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ATTEMPTS)]
    pub max_attempts: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConfigArg {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
}

/// Inclusive range written `a..b`, or a single value `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub lo: u64,
    pub hi: u64,
}

impl Span {
    pub fn values(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }

    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }
}

impl std::str::FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("`{t}`: {e}"));
        match s.split_once("..") {
            Some((a, b)) => Ok(Span { lo: num(a)?, hi: num(b.trim_start_matches('='))? }),
            None => {
                let v = num(s)?;
                Ok(Span { lo: v, hi: v })
            }
        }
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ComplexityArgs {
    /// Network sizes, inclusive.
    #[arg(long, default_value = "2..8")]
    pub n: Span,
    /// Update counts, inclusive.
    #[arg(long, default_value = "1..4")]
    pub u: Span,
    /// Forced repeat-until-success failures per update, inclusive.
    #[arg(long, default_value = "0..2")]
    pub f: Span,
}
