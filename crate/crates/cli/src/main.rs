use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

mod error;
mod evaluate;
mod graph;
mod output;
mod predict;
mod presets;
mod synth;
mod text;

use error::{CliError, CliResult};

/// Train, apply and score the text-ensemble and propagation-graph
/// misinformation classifiers.
#[derive(Debug, Parser)]
#[command(name = "fakenews", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random choice (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for ensemble members and grid cells [default: all cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file with settings for the command; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Global {
    pub fn jobs(&self) -> CliResult<usize> {
        match self.jobs {
            Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
            Some(j) => Ok(j),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    pub fn out(&self) -> CliResult<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("this command requires --out <DIR>".into()))
    }

    /// Settings from `--config`, or defaults when absent.
    pub fn settings<T: DeserializeOwned + Default>(&self) -> CliResult<T> {
        let Some(path) = &self.config else {
            return Ok(T::default());
        };
        let raw = std::fs::read_to_string(path).map_err(|e| {
            CliError::Core(fakenews_core::Error::Io {
                path: path.clone(),
                source: e,
            })
        })?;
        serde_json::from_str(&raw).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a text ensemble from one of the run presets and score it on a dev file.
    TrainText(text::TrainTextArgs),
    /// Train the graph classifier, optionally after a grid search.
    TrainGraph(graph::TrainGraphArgs),
    /// Grid-search graph classifier settings on the validation part.
    GridSearch(graph::GridSearchArgs),
    /// Apply a trained model to a tweet or graph file.
    Predict(predict::PredictArgs),
    /// Score a predictions file against ground truth.
    Evaluate(evaluate::EvaluateArgs),
    /// Generate the synthetic tweet, embedding and graph corpora.
    Synth(synth::SynthArgs),
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    match cli.command {
        Command::TrainText(args) => text::train_text(g, &args),
        Command::TrainGraph(args) => graph::train_graph(g, &args),
        Command::GridSearch(args) => graph::grid_search(g, &args),
        Command::Predict(args) => predict::predict(g, &args),
        Command::Evaluate(args) => evaluate::evaluate(g, &args),
        Command::Synth(args) => synth::synth(g, &args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            e.exit_code()
        }
        Err(_) => CliError::Internal("unexpected panic".into()).exit_code(),
    }
}
