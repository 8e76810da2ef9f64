use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use fakenews_core::corpus::{load_graphs, PropagationGraph, SplitSpec, Task};
use fakenews_core::gnn::{self, predict_proba, GnnConfig, Grid, GridOutcome, Pool};
use fakenews_core::metrics::{evaluate, format_table};
use fakenews_core::persist::{save_gnn, GNN_MODEL_FILE};
use fakenews_core::text_models::argmax;
use fakenews_core::Error;

use crate::error::{CliError, CliResult};
use crate::output::Staged;
use crate::Global;

fn parse_pool(s: &str) -> Result<Pool, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_uppercase()))
        .map_err(|_| format!("unknown pooling {s:?}; expected sum, mean or max"))
}

/// Flags overriding individual model settings.
#[derive(Debug, Args)]
pub struct ModelFlags {
    /// Propagation graphs, one JSON object per line.
    #[arg(long)]
    pub graphs: PathBuf,
    #[arg(long)]
    pub num_layers: Option<usize>,
    #[arg(long)]
    pub hidden_dim: Option<usize>,
    /// Neighbor aggregation: sum, mean or max.
    #[arg(long, value_parser = parse_pool)]
    pub neighbor_pool: Option<Pool>,
    /// Graph readout: sum, mean or max.
    #[arg(long, value_parser = parse_pool)]
    pub graph_pool: Option<Pool>,
    #[arg(long)]
    pub dropout: Option<f64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub degree_cap: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fraction of graphs held out for model selection.
    #[arg(long)]
    pub valid_fraction: Option<f64>,
    /// Fraction of graphs held out for the final report.
    #[arg(long)]
    pub test_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainGraphArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Grid of candidate values (`{"field": [values..]}`) searched before the final fit.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridSearchArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    #[arg(long)]
    pub grid: PathBuf,
}

/// Contents of `--config` for the graph commands.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphSettings {
    pub model: GnnConfig,
    pub valid_fraction: f64,
    pub test_fraction: f64,
}

impl Default for GraphSettings {
    fn default() -> Self {
        let split = SplitSpec::default();
        GraphSettings {
            model: GnnConfig::default(),
            valid_fraction: split.valid_fraction,
            test_fraction: split.test_fraction,
        }
    }
}

impl GraphSettings {
    pub fn split(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: 1.0 - self.valid_fraction - self.test_fraction,
            valid_fraction: self.valid_fraction,
            test_fraction: self.test_fraction,
            seed: self.model.seed,
        }
    }
}

fn resolve(g: &Global, f: &ModelFlags) -> CliResult<GraphSettings> {
    let mut s: GraphSettings = g.settings()?;
    let m = &mut s.model;
    macro_rules! take {
        ($($field:ident),*) => { $( if let Some(v) = f.$field { m.$field = v; } )* };
    }
    take!(
        num_layers,
        hidden_dim,
        neighbor_pool,
        graph_pool,
        dropout,
        lr,
        epochs,
        batch_size,
        degree_cap,
        epsilon
    );
    if let Some(seed) = g.seed {
        m.seed = seed;
    }
    s.valid_fraction = f.valid_fraction.unwrap_or(s.valid_fraction);
    s.test_fraction = f.test_fraction.unwrap_or(s.test_fraction);
    s.model.validate()?;
    s.split().validate()?;
    Ok(s)
}

fn load_grid(path: &Path) -> CliResult<Grid> {
    let raw = std::fs::read_to_string(path).map_err(|e| {
        CliError::Core(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })?;
    serde_json::from_str(&raw).map_err(|e| CliError::Usage(format!("grid file {}: {e}", path.display())))
}

fn load_labeled(path: &Path) -> CliResult<Vec<PropagationGraph>> {
    let graphs = load_graphs(path)?;
    if let Some(g) = graphs.iter().find(|g| g.label.is_none()) {
        return Err(CliError::Core(Error::Data(format!("graph {:?} has no label", g.id))));
    }
    Ok(graphs)
}

fn grid_report(outcome: &GridOutcome) -> serde_json::Value {
    json!({
        "best_index": outcome.best_index,
        "best": outcome.best,
        "cells": outcome.cells,
    })
}

fn run_grid(g: &Global, settings: &GraphSettings, graphs: &[PropagationGraph], grid: &Path) -> CliResult<GridOutcome> {
    let grid = load_grid(grid)?;
    // surface unknown fields as usage errors before any training
    gnn::expand_grid(&settings.model, &grid)?;
    Ok(gnn::grid_search(
        graphs,
        &settings.model,
        &grid,
        &settings.split(),
        g.jobs()?,
    )?)
}

pub fn grid_search(g: &Global, args: &GridSearchArgs) -> CliResult<()> {
    let settings = resolve(g, &args.model)?;
    let out = g.out()?;
    let graphs = load_labeled(&args.model.graphs)?;
    let staged = Staged::create(out, &[&args.model.graphs, &args.grid])?;
    let outcome = run_grid(g, &settings, &graphs, &args.grid)?;
    staged.write(
        "grid_report.json",
        &serde_json::to_string_pretty(&grid_report(&outcome))?,
    )?;
    staged.commit("grid-search", serde_json::to_value(settings)?)?;
    let best = &outcome.cells[outcome.best_index];
    println!(
        "best cell {} of {}: valid AUC {}",
        outcome.best_index,
        outcome.cells.len(),
        best.valid_auc.map_or("-".into(), |a| format!("{a:.4}"))
    );
    Ok(())
}

pub fn train_graph(g: &Global, args: &TrainGraphArgs) -> CliResult<()> {
    let mut settings = resolve(g, &args.model)?;
    let out = g.out()?;
    let graphs = load_labeled(&args.model.graphs)?;
    let mut inputs = vec![args.model.graphs.as_path()];
    inputs.extend(args.grid.as_deref());
    inputs.extend(g.config.as_deref());
    let staged = Staged::create(out, &inputs)?;

    // fixed before the grid can swap in a cell seed, so the test part never changes
    let split = settings.split();
    if let Some(grid) = &args.grid {
        let outcome = run_grid(g, &settings, &graphs, grid)?;
        staged.write(
            "grid_report.json",
            &serde_json::to_string_pretty(&grid_report(&outcome))?,
        )?;
        settings.model = outcome.best;
    }

    let run = gnn::gnn_train(&graphs, &settings.model, &split)?;
    save_gnn(&staged.path(GNN_MODEL_FILE), &run.fit.model)?;
    let mut log = String::new();
    for record in &run.fit.log {
        log.push_str(&serde_json::to_string(record)?);
        log.push('\n');
    }
    staged.write("train_log.jsonl", &log)?;

    let probs = predict_proba(&run.fit.model, &run.test)?;
    let truth: Vec<usize> = run
        .test
        .iter()
        .filter_map(|g| g.label)
        .map(|l| Task::Ternary.class_of(l))
        .collect();
    let predicted: Vec<usize> = probs.iter().map(|p| argmax(p)).collect();
    let report = evaluate(Task::Ternary, &truth, &predicted, &probs)?;
    staged.write("report.json", &serde_json::to_string_pretty(&report)?)?;

    let valid_auc = run.fit.log[run.fit.best_epoch].valid_auc;
    let table = format_table(
        &[("smd".to_owned(), valid_auc, report.auc)],
        "Valid ROC AUC",
        "Test ROC AUC",
    );
    staged.write("summary.txt", &format!("best epoch {}\n{table}", run.fit.best_epoch))?;
    staged.commit("train-graph", serde_json::to_value(settings)?)?;
    print!("{table}");
    Ok(())
}
