mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use transversal_core::Error as CoreError;

#[derive(Parser, Debug)]
#[command(name = "transversal", version, about = "Exact Tukey depth, mod-2 Schubert calculus, and deep projection search")]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for parallel sections (0 lets the runtime decide).
    #[arg(long, global = true, env = "TRANSVERSAL_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Record wall-clock timing in the manifest (makes reruns differ).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension bound and depth thresholds for m measures and n-dimensional subspaces.
    Bounds {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Products of Stiefel-Whitney classes and named checks.
    Schubert(SchubertArgs),
    /// Generate a seeded instance.
    Gen(GenArgs),
    /// Point depth, depth of the measure, depth regions, direction profiles.
    Depth(DepthArgs),
    /// The canonical point c and the depth classification.
    Center {
        #[arg(long)]
        input: PathBuf,
        /// Dimension of the measure (defaults to the file's).
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Regular simplex construction from a vertex tuple.
    Simplex(SimplexArgs),
    /// Search for (or verify) a subspace where all marginals are deep.
    Transversal(TransversalArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    MainObstruction,
    Power2free,
    Heights,
    Whitney,
}

#[derive(Args, Debug)]
pub struct SchubertArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub codim: Option<usize>,
    /// Exponents e_1,...,e_n of the monomial w_1^e_1 ... w_n^e_n.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Option<Vec<usize>>,
    #[arg(long, value_enum, conflicts_with = "exponents")]
    pub check: Option<Check>,
    /// Number of measures for the obstruction checks.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 12)]
    pub atoms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinates are multiples of 10^-digits.
    #[arg(long, default_value_t = 3)]
    pub digits: u32,
    /// Weights drawn from 1..=weight-max, then normalized.
    #[arg(long, default_value_t = 1)]
    pub weight_max: u32,
    #[arg(long, default_value_t = 1e-3)]
    pub spread: f64,
    /// Number of instances; instance i uses seed + i.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    /// Write instance files into this directory instead of one report.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReadArgs {
    /// Tabular inputs: decimals are rounded to multiples of 1/denominator-bound.
    #[arg(long, default_value_t = 1_000_000_000)]
    pub denominator_bound: u64,
}

#[derive(Args, Debug)]
pub struct DepthArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Point as comma-separated rationals, e.g. 1/3,1/3.
    #[arg(long)]
    pub point: Option<String>,
    /// Superlevel region at this level.
    #[arg(long)]
    pub region: Option<String>,
    /// Sample this many directions around the point for a depth profile.
    #[arg(long)]
    pub profile: Option<usize>,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Args, Debug)]
pub struct SimplexArgs {
    /// Vectors separated by ';', entries by ',', e.g. "1,0;0,1;-1,-1".
    #[arg(long, conflicts_with = "input")]
    pub vertices: Option<String>,
    /// Build the surrogate tuple from this measure.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Build the surrogate even when the measure has sufficient depth.
    #[arg(long)]
    pub force: bool,
    #[command(flatten)]
    pub read: ReadArgs,
}

#[derive(Args, Debug)]
pub struct TransversalArgs {
    /// One file per measure.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 200)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub local_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Target level (defaults to the improved threshold for n).
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub initial_angle: f64,
    #[arg(long, default_value_t = 0.7)]
    pub decay: f64,
    /// Verify this frame (a JSON array of rows) instead of searching.
    #[arg(long)]
    pub frame: Option<PathBuf>,
    #[command(flatten)]
    pub read: ReadArgs,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable input or arguments: exit 2.
    Input(anyhow::Error),
    /// A check or target was not met: exit 1, report still written.
    Check,
    /// Anything else: exit 1.
    Runtime(anyhow::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Parse(_)
            | CoreError::Domain(_)
            | CoreError::Degenerate(_)
            | CoreError::OriginNotInterior
            | CoreError::NotInsufficient => Failure::Input(e.into()),
            other => Failure::Runtime(other.into()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = if cli.threads > 0 {
        transversal_core::transversal::with_threads(cli.threads, || commands::run(&cli))
            .unwrap_or_else(|e| Err(Failure::Runtime(e.into())))
    } else {
        commands::run(&cli)
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
