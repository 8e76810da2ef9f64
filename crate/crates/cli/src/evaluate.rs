use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use fakenews_core::corpus::{parse_graphs, parse_tweets, TernaryLabel};
use fakenews_core::metrics::{evaluate as score, format_table};
use fakenews_core::predictions::parse_predictions;
use fakenews_core::Error;

use crate::error::{CliError, CliResult};
use crate::output::Staged;
use crate::Global;

const LISTED_MISSING: usize = 10;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predictions written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ground truth: tweet TSV or labelled graph JSONL.
    #[arg(long)]
    pub truth: PathBuf,
    /// Row name in the printed table.
    #[arg(long, default_value = "eval")]
    pub name: String,
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Core(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

/// Ids and labels from either truth format, in file order.
fn load_truth(path: &Path) -> CliResult<Vec<(String, TernaryLabel)>> {
    let raw = read(path)?;
    let looks_json = raw.trim_start().starts_with('{');
    if looks_json {
        parse_graphs(&raw)?
            .into_iter()
            .map(|g| match g.label {
                Some(l) => Ok((g.id, l)),
                None => Err(CliError::Core(Error::Data(format!("graph {:?} has no label", g.id)))),
            })
            .collect()
    } else {
        Ok(parse_tweets(&raw)?.into_iter().map(|t| (t.id, t.label)).collect())
    }
}

fn missing_message(what: &str, ids: &[&str]) -> String {
    let shown: Vec<&str> = ids.iter().take(LISTED_MISSING).copied().collect();
    let more = ids.len().saturating_sub(LISTED_MISSING);
    let tail = if more > 0 {
        format!(" (and {more} more)")
    } else {
        String::new()
    };
    format!("{} ids {what}: {}{tail}", ids.len(), shown.join(", "))
}

pub fn evaluate(g: &Global, args: &EvaluateArgs) -> CliResult<()> {
    let predictions = parse_predictions(&read(&args.predictions)?)?;
    let truth = load_truth(&args.truth)?;
    let task = predictions.task;

    let by_id: HashMap<&str, usize> = predictions
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), i))
        .collect();
    let missing: Vec<&str> = truth
        .iter()
        .map(|(id, _)| id.as_str())
        .filter(|id| !by_id.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Core(Error::Data(missing_message(
            "in the truth file have no prediction",
            &missing,
        ))));
    }
    let truth_ids: HashMap<&str, ()> = truth.iter().map(|(id, _)| (id.as_str(), ())).collect();
    let extra: Vec<&str> = predictions
        .rows
        .iter()
        .map(|r| r.id.as_str())
        .filter(|id| !truth_ids.contains_key(id))
        .collect();
    if !extra.is_empty() {
        return Err(CliError::Core(Error::Data(missing_message(
            "in the predictions are missing from the truth file",
            &extra,
        ))));
    }

    let rows: Vec<_> = truth
        .iter()
        .map(|(id, _)| &predictions.rows[by_id[id.as_str()]])
        .collect();
    let labels: Vec<usize> = truth.iter().map(|(_, l)| task.class_of(*l)).collect();
    let predicted: Vec<usize> = rows.iter().map(|r| r.label).collect();
    let probs: Vec<Vec<f64>> = rows.iter().map(|r| r.probs.clone()).collect();
    let report = score(task, &labels, &predicted, &probs)?;

    let table = format_table(
        &[(args.name.clone(), Some(report.macro_f1), report.auc)],
        "F1 (macro)",
        "ROC AUC",
    );
    let report_json = serde_json::to_string_pretty(&report)?;
    match &g.out {
        Some(out) => {
            let staged = Staged::create(out, &[&args.predictions, &args.truth])?;
            staged.write("evaluation.json", &report_json)?;
            staged.commit(
                "evaluate",
                json!({"predictions": args.predictions, "truth": args.truth, "task": task}),
            )?;
            print!("{table}");
        }
        None => {
            print!("{table}");
            println!("{report_json}");
        }
    }
    Ok(())
}
