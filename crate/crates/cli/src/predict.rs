use std::path::PathBuf;

use clap::Args;
use serde_json::json;

use fakenews_core::corpus::{load_graphs, load_tweets, Task};
use fakenews_core::features::EmbeddingTable;
use fakenews_core::gnn::predict_proba;
use fakenews_core::persist::{load_ensemble, load_gnn, ENSEMBLE_MANIFEST, GNN_MODEL_FILE};
use fakenews_core::predictions::{format_predictions, PredictionRow};
use fakenews_core::text_models::argmax;

use crate::error::{CliError, CliResult};
use crate::output::Staged;
use crate::text::predict_tweets;
use crate::Global;

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// A `train-text` model directory, or a graph model file or directory.
    #[arg(long)]
    pub model: PathBuf,
    /// Tweets (TSV) for text models, graphs (JSONL) for graph models.
    #[arg(long)]
    pub input: PathBuf,
    /// Expected task; prediction fails if the model was trained for another.
    #[arg(long)]
    pub task: Option<Task>,
    /// Embedding file, required for embedding-based ensembles.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
}

fn check_task(requested: Option<Task>, actual: Task) -> CliResult<()> {
    match requested {
        Some(t) if t != actual => Err(CliError::Usage(format!(
            "model was trained for the {actual} task but --task {t} was requested"
        ))),
        _ => Ok(()),
    }
}

pub fn predict(g: &Global, args: &PredictArgs) -> CliResult<()> {
    let out = g.out()?;
    // accept either the train-text output directory or its model/ subdirectory
    let text_dir = [args.model.join("model"), args.model.clone()]
        .into_iter()
        .find(|d| d.join(ENSEMBLE_MANIFEST).is_file());

    let (task, rows, kind) = if let Some(dir) = text_dir {
        let (model, stopwords) = load_ensemble(&dir)?;
        check_task(args.task, model.task)?;
        let embeddings = match (model.base_kind(), &args.embeddings) {
            ("lr", None) => return Err(CliError::Usage("this ensemble needs --embeddings".into())),
            ("lr", Some(p)) => Some(EmbeddingTable::load(p)?),
            _ => None,
        };
        let tweets = load_tweets(&args.input)?;
        let scored = predict_tweets(&model, &tweets, &stopwords, embeddings.as_ref())?;
        let rows = tweets
            .iter()
            .zip(scored)
            .map(|(t, (label, probs))| PredictionRow {
                id: t.id.clone(),
                label,
                probs,
            })
            .collect::<Vec<_>>();
        (model.task, rows, "text")
    } else {
        let file = if args.model.is_dir() {
            args.model.join(GNN_MODEL_FILE)
        } else {
            args.model.clone()
        };
        let model = load_gnn(&file)?;
        check_task(args.task, Task::Ternary)?;
        let graphs = load_graphs(&args.input)?;
        let probs = predict_proba(&model, &graphs)?;
        let rows = graphs
            .iter()
            .zip(probs)
            .map(|(g, probs)| PredictionRow {
                id: g.id.clone(),
                label: argmax(&probs),
                probs,
            })
            .collect::<Vec<_>>();
        (Task::Ternary, rows, "graph")
    };

    let mut inputs = vec![args.model.as_path(), args.input.as_path()];
    inputs.extend(args.embeddings.as_deref());
    let staged = Staged::create(out, &inputs)?;
    staged.write("predictions.tsv", &format_predictions(task, &rows))?;
    staged.commit(
        "predict",
        json!({"model": args.model, "input": args.input, "task": task, "kind": kind}),
    )?;
    println!("{} predictions written", rows.len());
    Ok(())
}
