//! Command-line workbench: dataset generation, training, evaluation,
//! regeneration, statistics, the operation-table dump, and gradient checks.
//!
//! Every command resolves its configuration from a preset (`desk` or
//! `paper`), an optional key-value config file, and flags (highest
//! precedence), then writes the resolved record alongside its outputs so a
//! run can be reproduced from the output directory alone. Numeric precision
//! comes from `LASYNTH_PRECISION` (`f32` default, `f64` for bit-exact
//! reruns and gradient checking).

mod cmds;
mod runcfg;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lasynth", version, about = "Restricted-C program synthesis workbench")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Key-value config file (`key = value` lines, '#' comments).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scale preset: `desk` (workstation) or `paper` (full-scale values).
    #[arg(long, default_value = "desk")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rayon worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate train/valid/test dataset files.
    GenData {
        #[command(flatten)]
        common: Common,
    },
    /// Train a model; with --iterations > 1, regenerate and retrain.
    Train {
        #[command(flatten)]
        common: Common,
        /// Directory holding train.jsonl/valid.jsonl/test.jsonl.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value = "1")]
        iterations: usize,
        /// none|no-executor|no-partial-executor|no-op-predictor|no-decode-attention
        #[arg(long, default_value = "none")]
        ablation: String,
        /// lasynth|robustfill|propsig
        #[arg(long, default_value = "lasynth")]
        baseline: String,
        /// Beam width for the per-iteration evaluations.
        #[arg(long)]
        beam: Option<usize>,
    },
    /// Evaluate a checkpoint on a dataset split.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Dataset file (one split).
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
    },
    /// Rewrite a dataset from a checkpoint's verified predictions.
    Regen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        beam: Option<usize>,
        /// Pick the shortest passing candidate instead of the best-scoring.
        #[arg(long)]
        shortest: bool,
    },
    /// Class and token-length histograms of a dataset file.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Dump the precomputed operation table as CSV.
    OpTable {
        #[command(flatten)]
        common: Common,
    },
    /// Finite-difference check of every layer and the composite loss.
    GradCheck {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result) = match cli.command {
        Cmd::GenData { common } => ("gen-data", cmds::gen_data(common)),
        Cmd::Train { common, dataset, iterations, ablation, baseline, beam } => {
            ("train", cmds::train(common, dataset, iterations, ablation, baseline, beam))
        }
        Cmd::Eval { common, checkpoint, dataset, beam } => {
            ("eval", cmds::eval(common, checkpoint, dataset, beam))
        }
        Cmd::Regen { common, checkpoint, dataset, beam, shortest } => {
            ("regen", cmds::regen(common, checkpoint, dataset, beam, shortest))
        }
        Cmd::Stats { common, dataset } => ("stats", cmds::stats(common, dataset)),
        Cmd::OpTable { common } => ("op-table", cmds::op_table(common)),
        Cmd::GradCheck { common } => ("grad-check", cmds::grad_check(common)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // machine-readable error record
            eprintln!("{}", serde_json::json!({ "command": name, "error": e.to_string() }));
            ExitCode::FAILURE
        }
    }
}
