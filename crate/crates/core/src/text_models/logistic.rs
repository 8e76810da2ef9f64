use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::PosteriorVector;
use crate::error::{Error, Result};
use crate::features::EmbeddingTable;
use crate::nn::{adam_step, softmax, softmax_cross_entropy, AdamConfig, AdamState, DenseMatrix, Linear, Parameters};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LrConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub l2: f64,
}

impl Default for LrConfig {
    fn default() -> Self {
        LrConfig {
            lr: 0.01,
            epochs: 300,
            batch_size: 32,
            seed: 0,
            l2: 1e-4,
        }
    }
}

impl LrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Validation(format!("lr must be positive, got {}", self.lr)));
        }
        if self.batch_size == 0 {
            return Err(Error::Validation("batch_size must be >= 1".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Validation(format!("l2 must be >= 0, got {}", self.l2)));
        }
        Ok(())
    }
}

/// Multinomial (softmax) logistic regression over dense inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegressionModel {
    /// Weights are `dim × num_classes`.
    pub affine: Linear,
}

impl LogisticRegressionModel {
    pub fn dim(&self) -> usize {
        self.affine.input_dim()
    }

    pub fn num_classes(&self) -> usize {
        self.affine.output_dim()
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.affine.weight
    }

    pub fn bias(&self) -> &[f64] {
        &self.affine.bias
    }
}

/// Result of [`lr_train`]: the model plus the full-data objective after each epoch.
#[derive(Debug, Clone)]
pub struct LrFit {
    pub model: LogisticRegressionModel,
    pub epoch_losses: Vec<f64>,
}

/// Regularized objective `CE + l2·‖W‖²/2` and its gradient on a batch.
pub fn lr_objective(
    model: &LogisticRegressionModel,
    inputs: &DenseMatrix,
    labels: &[usize],
    l2: f64,
) -> Result<(f64, Linear)> {
    let logits = model.affine.forward(inputs)?;
    let (ce, dlogits) = softmax_cross_entropy(&logits, labels)?;
    let mut grad = Linear::zeros(model.dim(), model.num_classes());
    model.affine.backward(inputs, &dlogits, &mut grad)?;
    let mut penalty = 0.0;
    for (g, w) in grad.weight.data_mut().iter_mut().zip(model.affine.weight.data()) {
        *g += l2 * w;
        penalty += w * w;
    }
    Ok((ce + 0.5 * l2 * penalty, grad))
}

fn gather(table: &EmbeddingTable, ids: &[String]) -> Result<DenseMatrix> {
    let mut data = Vec::with_capacity(ids.len() * table.dim());
    for id in ids {
        data.extend_from_slice(table.require(id)?);
    }
    DenseMatrix::from_vec(ids.len(), table.dim(), data)
}

/// Fit a softmax regression on the embeddings of `ids` with minibatch Adam.
pub fn lr_train(
    table: &EmbeddingTable,
    ids: &[String],
    labels: &[usize],
    num_classes: usize,
    config: &LrConfig,
) -> Result<LrFit> {
    config.validate()?;
    if ids.len() != labels.len() {
        return Err(Error::Shape(format!("{} ids for {} labels", ids.len(), labels.len())));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= num_classes) {
        return Err(Error::Data(format!(
            "label {bad} out of range for {num_classes} classes"
        )));
    }
    let mut present = vec![false; num_classes];
    for &y in labels {
        present[y] = true;
    }
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::Data(
            "logistic regression needs at least two classes in the training data".into(),
        ));
    }
    let inputs = gather(table, ids)?;

    let mut rng = rng::seeded(config.seed);
    let mut model = LogisticRegressionModel {
        affine: Linear::init(table.dim(), num_classes, &mut rng),
    };
    let mut adam = AdamState::new(&model.affine, AdamConfig::with_lr(config.lr));
    let mut order: Vec<usize> = (0..ids.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let mut x = DenseMatrix::zeros(batch.len(), table.dim());
            for (r, &i) in batch.iter().enumerate() {
                x.row_mut(r).copy_from_slice(inputs.row(i));
            }
            let y: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
            let (_, grad) = lr_objective(&model, &x, &y, config.l2)?;
            adam_step(&mut model.affine, &grad, &mut adam)?;
        }
        epoch_losses.push(lr_objective(&model, &inputs, labels, config.l2)?.0);
    }
    if !model.affine.all_finite() {
        return Err(Error::Data("logistic regression diverged to non-finite weights".into()));
    }
    Ok(LrFit { model, epoch_losses })
}

/// `softmax(Wᵀx + b)`.
pub fn lr_posterior(model: &LogisticRegressionModel, vector: &[f64]) -> Result<PosteriorVector> {
    if vector.len() != model.dim() {
        return Err(Error::Shape(format!(
            "input of length {} for a model of dimension {}",
            vector.len(),
            model.dim()
        )));
    }
    let w = &model.affine.weight;
    let logits: Vec<f64> = (0..model.num_classes())
        .map(|c| model.affine.bias[c] + vector.iter().enumerate().map(|(k, x)| x * w[(k, c)]).sum::<f64>())
        .collect();
    Ok(PosteriorVector::from_raw(softmax(&logits)))
}
