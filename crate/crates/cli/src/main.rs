//! `cex`: command-line queries over `.cm` causal model files.
//!
//! Exit status is 0 when the verdict is true, 1 when it is false and 2 on
//! any error.

mod cause;
mod classifier;
mod explain;
mod input;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cex", version, about = "Actual causes, sufficient causes and explanations in finite causal models")]
struct Cli {
    /// Print JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a conjunction is a cause of a formula in one context.
    CheckCause(CheckCauseArgs),
    /// Enumerate explanations of a formula, or judge a single candidate.
    Explain(ExplainArgs),
    /// Work with depth-two models of pixel labelers.
    #[command(subcommand)]
    Classifier(ClassifierCommand),
    /// Check one of the two structural theorems on a model or on random ones.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CauseMode {
    Actual,
    Butfor,
    Sufficient,
}

#[derive(Args)]
pub struct CheckCauseArgs {
    pub model: PathBuf,
    /// A declared context name, or assignments such as `U_A=1, U_B=0`.
    #[arg(long)]
    pub context: String,
    /// Conjunction of events, e.g. `ML1=1 & ML2=1`.
    #[arg(long)]
    pub cause: String,
    #[arg(long)]
    pub phi: String,
    #[arg(long, value_enum, default_value = "actual")]
    pub mode: CauseMode,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Preset {
    Halpern,
    Mmts,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NecessityFlag {
    /// Some conjunct extends to an actual cause.
    Conjunct,
    /// Some sub-conjunction is an actual cause.
    Subset,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WitnessFlag {
    Actual,
    Butfor,
    Free,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ScopeFlag {
    K,
    All,
}

#[derive(Args)]
pub struct ExplainArgs {
    pub model: PathBuf,
    #[arg(long)]
    pub phi: String,
    /// `all`, a declared context set, or comma-separated context names.
    /// Defaults to the set declared as `K`, or every context.
    #[arg(long, default_value = "")]
    pub k: String,
    #[arg(long, value_enum, default_value = "halpern")]
    pub definition: Preset,
    /// Overrides the preset's necessity reading.
    #[arg(long, value_enum)]
    pub necessity: Option<NecessityFlag>,
    /// Overrides the preset's witness constraint.
    #[arg(long, value_enum)]
    pub witness: Option<WitnessFlag>,
    /// Overrides the preset's context scope.
    #[arg(long, value_enum)]
    pub scope: Option<ScopeFlag>,
    /// Partial mode threshold, as `p/q` or an exact decimal.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Judge this conjunction instead of enumerating.
    #[arg(long)]
    pub candidate: Option<String>,
}

#[derive(Args, Clone)]
pub struct GridArgs {
    /// Width by height, e.g. `3x3`; a single row names its pixels X1..Xn.
    #[arg(long)]
    pub grid: String,
    /// Pixel values, comma-separated.
    #[arg(long, default_value = "0,1")]
    pub range: String,
}

#[derive(Args, Clone)]
pub struct LiftArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// `any-on`, `parity`, `threshold:K` or `table:FILE`.
    #[arg(long)]
    pub labeler: String,
    /// `uniform`, `parity`, or a file of `v v .. weight` lines.
    #[arg(long, default_value = "uniform", conflicts_with = "uniform")]
    pub dist: String,
    /// Same as `--dist uniform`.
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Subcommand)]
pub enum ClassifierCommand {
    /// Write the depth-two model of a labeler as a `.cm` file.
    Lift {
        #[command(flatten)]
        lift: LiftArgs,
        #[arg(long, default_value = "classifier")]
        name: String,
        /// Output file; standard output if omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Explain a negative label over a restricted context set.
    Absence {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        label: String,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long, default_value = "")]
        k: String,
        #[arg(long)]
        max_size: Option<usize>,
    },
    /// Condition an image distribution on a formula over the lifted model.
    Reweight {
        #[command(flatten)]
        lift: LiftArgs,
        #[arg(long)]
        condition: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print a pixel net hitting every square of the given size.
    Net {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        min_size: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: Theorem,
    /// Check every instance in this model instead of random ones.
    #[arg(long, conflicts_with = "trials")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Effects of random first-theorem instances: over one variable, or any
    /// formula over the effect variables.
    #[arg(long, value_enum, default_value_t = Effects::Any)]
    pub effects: Effects,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Effects {
    One,
    Any,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::CheckCause(a) => cause::run(&a, cli.json),
        Command::Explain(a) => explain::run(&a, cli.json),
        Command::Classifier(c) => classifier::run(&c, cli.json),
        Command::Verify(a) => verify::run(&a, cli.json),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
