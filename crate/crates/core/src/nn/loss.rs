use super::DenseMatrix;
use crate::error::{Error, Result};

/// Numerically stable softmax of one row.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// `ln Σ exp(x_i)` with max-subtraction.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|&v| (v - max).exp()).sum::<f64>().ln()
}

pub fn softmax_rows(logits: &DenseMatrix) -> DenseMatrix {
    let mut out = logits.clone();
    for i in 0..out.rows() {
        let p = softmax(logits.row(i));
        out.row_mut(i).copy_from_slice(&p);
    }
    out
}

/// Mean cross-entropy of `softmax(logits)` against integer labels, and its
/// gradient with respect to the logits.
pub fn softmax_cross_entropy(logits: &DenseMatrix, labels: &[usize]) -> Result<(f64, DenseMatrix)> {
    if logits.rows() != labels.len() {
        return Err(Error::Shape(format!(
            "{} logit rows for {} labels",
            logits.rows(),
            labels.len()
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= logits.cols()) {
        return Err(Error::Data(format!(
            "label {bad} out of range for {} classes",
            logits.cols()
        )));
    }
    let n = labels.len().max(1) as f64;
    let mut loss = 0.0;
    let mut grad = DenseMatrix::zeros(logits.rows(), logits.cols());
    for (i, &y) in labels.iter().enumerate() {
        let row = logits.row(i);
        loss += log_sum_exp(row) - row[y];
        let p = softmax(row);
        let g = grad.row_mut(i);
        for (j, pj) in p.into_iter().enumerate() {
            g[j] = (pj - f64::from(u8::from(j == y))) / n;
        }
    }
    Ok((loss / n, grad))
}
