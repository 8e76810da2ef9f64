use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::model::{GnnModel, Mode, NUM_CLASSES};
use super::{GnnConfig, GraphBatch};
use crate::corpus::{split_dataset, PropagationGraph, SplitSpec};
use crate::error::{Error, Result};
use crate::metrics::macro_ovr_auc;
use crate::nn::{adam_step, softmax_rows, AdamConfig, AdamState, Parameters};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_auc: Option<f64>,
}

/// Trained model plus its per-epoch log; `best_epoch` indexes the snapshot returned.
#[derive(Debug, Clone)]
pub struct GnnFit {
    pub model: GnnModel,
    pub log: Vec<EpochRecord>,
    pub best_epoch: usize,
}

/// Output of [`gnn_train`]: the fit plus the untouched test part.
#[derive(Debug, Clone)]
pub struct GnnRun {
    pub fit: GnnFit,
    pub test: Vec<PropagationGraph>,
}

fn labels_of(graphs: &[PropagationGraph]) -> Result<Vec<usize>> {
    graphs
        .iter()
        .map(|g| {
            g.label
                .map(|l| l.code())
                .ok_or_else(|| Error::Data(format!("graph {:?} has no label", g.id)))
        })
        .collect()
}

/// Class probabilities (dropout off) for each graph, evaluated in chunks.
pub fn predict_proba(model: &GnnModel, graphs: &[PropagationGraph]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(graphs.len());
    for chunk in graphs.chunks(256) {
        let batch = GraphBatch::new(chunk, model.config.degree_cap);
        let probs = softmax_rows(&model.forward(&batch, Mode::Eval)?);
        out.extend(probs.to_rows());
    }
    Ok(out)
}

fn validation_auc(model: &GnnModel, valid: &[PropagationGraph], labels: &[usize]) -> Result<Option<f64>> {
    if valid.is_empty() {
        return Ok(None);
    }
    let probs = predict_proba(model, valid)?;
    match macro_ovr_auc(labels, &probs, NUM_CLASSES) {
        Ok(auc) => Ok(Some(auc.macro_auc)),
        Err(Error::Data(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `a` ranks above `b`: higher validation AUC, then lower training loss.
fn better(a: &EpochRecord, b: &EpochRecord) -> bool {
    match (a.valid_auc, b.valid_auc) {
        (Some(x), Some(y)) if x != y => x > y,
        (Some(_), None) => true,
        (None, Some(_)) => false,
        _ => a.train_loss < b.train_loss,
    }
}

/// Train on fixed train/valid parts, keeping the best-validation epoch.
pub fn train_on_parts(train: &[PropagationGraph], valid: &[PropagationGraph], config: &GnnConfig) -> Result<GnnFit> {
    config.validate()?;
    let train_labels = labels_of(train)?;
    let valid_labels = labels_of(valid)?;
    for c in 0..NUM_CLASSES {
        if !train_labels.contains(&c) {
            return Err(Error::Data(format!("class {c} is missing from the training part")));
        }
    }
    let mut rng = rng::seeded(config.seed);
    let mut model = GnnModel::init_with(*config, &mut rng)?;
    let mut adam = AdamState::new(&model, AdamConfig::with_lr(config.lr));
    let mut order: Vec<usize> = (0..train.len()).collect();

    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(usize, GnnModel)> = None;
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch = GraphBatch::new(chunk.iter().map(|&i| &train[i]), config.degree_cap);
            let labels: Vec<usize> = chunk.iter().map(|&i| train_labels[i]).collect();
            let mask = model.sample_mask(chunk.len(), &mut rng);
            let (loss, grad) = model.loss_and_grad(&batch, &labels, mask)?;
            adam_step(&mut model, &grad, &mut adam)?;
            total_loss += loss * chunk.len() as f64;
        }
        if !model.all_finite() {
            return Err(Error::Data(format!("training diverged at epoch {epoch}")));
        }
        let record = EpochRecord {
            epoch,
            train_loss: total_loss / train.len() as f64,
            valid_auc: validation_auc(&model, valid, &valid_labels)?,
        };
        let improved = best.as_ref().is_none_or(|(i, _)| better(&record, &log[*i]));
        if improved {
            best = Some((log.len(), model.clone()));
        }
        log.push(record);
    }
    let (best_epoch, model) = best.unwrap_or((0, model));
    Ok(GnnFit { model, log, best_epoch })
}

/// Split, train, and hand back the test part untouched.
pub fn gnn_train(graphs: &[PropagationGraph], config: &GnnConfig, split: &SplitSpec) -> Result<GnnRun> {
    config.validate()?;
    let (train, valid, test) = split_dataset(graphs, split)?;
    let fit = train_on_parts(&train, &valid, config)?;
    Ok(GnnRun { fit, test })
}

/// Candidate values per `GnnConfig` field, e.g. `{"lr": [0.01, 0.001]}`.
pub type Grid = BTreeMap<String, Vec<serde_json::Value>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub config: GnnConfig,
    pub valid_auc: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: GnnConfig,
    pub best_index: usize,
    pub cells: Vec<GridCell>,
}

const CONFIG_FIELDS: &[&str] = &[
    "num_layers",
    "hidden_dim",
    "neighbor_pool",
    "graph_pool",
    "dropout",
    "lr",
    "epochs",
    "batch_size",
    "degree_cap",
    "epsilon",
    "seed",
];

/// Cartesian product of `grid` over `base`, in key order with the last key varying fastest.
/// Each cell gets seed `base.seed + index` unless `seed` is itself a grid key.
pub fn expand_grid(base: &GnnConfig, grid: &Grid) -> Result<Vec<std::result::Result<GnnConfig, String>>> {
    if grid.is_empty() || grid.values().any(Vec::is_empty) {
        return Err(Error::Validation("grid must have at least one value per field".into()));
    }
    if let Some(unknown) = grid.keys().find(|k| !CONFIG_FIELDS.contains(&k.as_str())) {
        return Err(Error::Validation(format!("unknown grid field {unknown:?}")));
    }
    let mut cells: Vec<BTreeMap<&str, &serde_json::Value>> = vec![BTreeMap::new()];
    for (key, values) in grid {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |v| {
                    let mut c = cell.clone();
                    c.insert(key.as_str(), v);
                    c
                })
            })
            .collect();
    }
    let base_value = serde_json::to_value(base)?;
    Ok(cells
        .into_iter()
        .enumerate()
        .map(|(i, cell)| {
            let mut value = base_value.clone();
            let obj = value.as_object_mut().expect("config serializes to an object");
            obj.insert("seed".into(), base.seed.wrapping_add(i as u64).into());
            for (k, v) in cell {
                obj.insert(k.to_owned(), v.clone());
            }
            let config: GnnConfig = serde_json::from_value(value).map_err(|e| e.to_string())?;
            config.validate().map_err(|e| e.to_string())?;
            Ok(config)
        })
        .collect())
}

/// Train one model per grid cell on a shared split and pick the best by
/// validation macro AUC. Ties go to lower `hidden_dim`, then lower `lr`,
/// then earlier cells. The test part is never used.
pub fn grid_search(
    graphs: &[PropagationGraph],
    base: &GnnConfig,
    grid: &Grid,
    split: &SplitSpec,
    jobs: usize,
) -> Result<GridOutcome> {
    let candidates = expand_grid(base, grid)?;
    let (train, valid, _test) = split_dataset(graphs, split)?;
    let run = |candidate: &std::result::Result<GnnConfig, String>| -> GridCell {
        match candidate {
            Err(msg) => GridCell {
                config: *base,
                valid_auc: None,
                status: format!("failed: {msg}"),
            },
            Ok(config) => match train_on_parts(&train, &valid, config) {
                Ok(fit) => GridCell {
                    config: *config,
                    valid_auc: fit.log[fit.best_epoch].valid_auc,
                    status: "ok".into(),
                },
                Err(e) => GridCell {
                    config: *config,
                    valid_auc: None,
                    status: format!("failed: {e}"),
                },
            },
        }
    };
    let cells: Vec<GridCell> = if jobs > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Validation(e.to_string()))?;
        pool.install(|| candidates.par_iter().map(run).collect())
    } else {
        candidates.iter().map(run).collect()
    };

    let mut best_index: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        if cell.status != "ok" {
            continue;
        }
        let replace = match best_index {
            None => true,
            Some(b) => {
                let cur = &cells[b];
                match (cell.valid_auc, cur.valid_auc) {
                    (Some(x), Some(y)) if x != y => x > y,
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    _ => (cell.config.hidden_dim, cell.config.lr) < (cur.config.hidden_dim, cur.config.lr),
                }
            }
        };
        if replace {
            best_index = Some(i);
        }
    }
    let best_index = best_index.ok_or_else(|| Error::Data("every grid cell failed".into()))?;
    Ok(GridOutcome {
        best: cells[best_index].config,
        best_index,
        cells,
    })
}
