use serde::{Deserialize, Serialize};

use super::PosteriorVector;
use crate::error::{Error, Result};
use crate::features::SparseVector;
use crate::nn::{log_sum_exp, DenseMatrix};

/// Multinomial Naive Bayes with additive (Laplace) smoothing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub num_classes: usize,
    pub alpha: f64,
    pub log_priors: Vec<f64>,
    /// `num_classes × vocab_size` matrix of `ln P(token | class)`.
    pub log_likelihoods: DenseMatrix,
}

impl NaiveBayesModel {
    pub fn vocab_size(&self) -> usize {
        self.log_likelihoods.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::Data(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.log_priors.len() != self.num_classes || self.log_likelihoods.rows() != self.num_classes {
            return Err(Error::Shape("naive bayes tables disagree on class count".into()));
        }
        Ok(())
    }
}

/// Fit class priors and smoothed token likelihoods:
/// `P(t|c) = (n_tc + alpha) / (n_c + alpha·V)`.
pub fn nb_train(
    vectors: &[SparseVector],
    labels: &[usize],
    num_classes: usize,
    vocab_size: usize,
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if vectors.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} vectors for {} labels",
            vectors.len(),
            labels.len()
        )));
    }
    if vectors.is_empty() {
        return Err(Error::Data("no training documents".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Validation(format!("alpha must be positive, got {alpha}")));
    }
    if vocab_size == 0 {
        return Err(Error::Validation("vocabulary is empty".into()));
    }
    let mut class_docs = vec![0usize; num_classes];
    let mut token_counts = DenseMatrix::zeros(num_classes, vocab_size);
    for (v, &c) in vectors.iter().zip(labels) {
        if c >= num_classes {
            return Err(Error::Data(format!("label {c} out of range for {num_classes} classes")));
        }
        class_docs[c] += 1;
        for &(t, n) in v.entries() {
            if t >= vocab_size {
                return Err(Error::Shape(format!(
                    "token index {t} outside vocabulary of {vocab_size}"
                )));
            }
            token_counts[(c, t)] += f64::from(n);
        }
    }
    if let Some(missing) = class_docs.iter().position(|&n| n == 0) {
        return Err(Error::Data(format!("class {missing} has no training documents")));
    }
    let total = vectors.len() as f64;
    let log_priors = class_docs.iter().map(|&n| (n as f64 / total).ln()).collect();
    let mut log_likelihoods = token_counts;
    for c in 0..num_classes {
        let row = log_likelihoods.row_mut(c);
        let class_total: f64 = row.iter().sum();
        let denom = (class_total + alpha * vocab_size as f64).ln();
        for x in row.iter_mut() {
            *x = (*x + alpha).ln() - denom;
        }
    }
    Ok(NaiveBayesModel {
        num_classes,
        alpha,
        log_priors,
        log_likelihoods,
    })
}

/// Unnormalized log joint `ln P(c) + Σ n_t ln P(t|c)` per class.
pub fn nb_log_scores(model: &NaiveBayesModel, vector: &SparseVector) -> Vec<f64> {
    (0..model.num_classes)
        .map(|c| {
            let row = model.log_likelihoods.row(c);
            model.log_priors[c]
                + vector
                    .entries()
                    .iter()
                    .filter(|&&(t, _)| t < row.len())
                    .map(|&(t, n)| f64::from(n) * row[t])
                    .sum::<f64>()
        })
        .collect()
}

/// Class posteriors for one document, normalized in log space.
pub fn nb_posterior(model: &NaiveBayesModel, vector: &SparseVector) -> PosteriorVector {
    if vector.is_empty() {
        return PosteriorVector::from_raw(model.log_priors.iter().map(|l| l.exp()).collect());
    }
    let scores = nb_log_scores(model, vector);
    let lse = log_sum_exp(&scores);
    PosteriorVector::from_raw(scores.into_iter().map(|s| (s - lse).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(pairs: &[(usize, u32)]) -> SparseVector {
        SparseVector::new(pairs.to_vec()).unwrap()
    }

    // class 0 = {"a a"}, class 1 = {"b"}, vocab {a:0, b:1}
    fn toy() -> NaiveBayesModel {
        nb_train(&[sv(&[(0, 2)]), sv(&[(1, 1)])], &[0, 1], 2, 2, 1.0).unwrap()
    }

    #[test]
    fn hand_computed_likelihoods() {
        let m = toy();
        let p = |c, t| m.log_likelihoods[(c, t)].exp();
        assert!((p(0, 0) - 3.0 / 4.0).abs() < 1e-15);
        assert!((p(0, 1) - 1.0 / 4.0).abs() < 1e-15);
        assert!((p(1, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((p(1, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.log_priors[0].exp() - 0.5).abs() < 1e-15);
        assert!((m.log_priors[1].exp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_posterior() {
        // 0.5·3/4 = 0.375 against 0.5·1/3 = 1/6
        let post = nb_posterior(&toy(), &sv(&[(0, 1)]));
        let expect = 0.375 / (0.375 + 1.0 / 6.0);
        assert!((post.probs()[0] - expect).abs() < 1e-12);
        assert!((post.probs()[0] - 0.6923).abs() < 1e-4);
        assert!((post.probs()[1] - 0.3077).abs() < 1e-4);
    }

    #[test]
    fn empty_vector_returns_priors() {
        let m = nb_train(&[sv(&[(0, 1)]), sv(&[(1, 1)]), sv(&[(1, 1)])], &[0, 1, 1], 2, 2, 1.0).unwrap();
        let post = nb_posterior(&m, &SparseVector::default());
        assert!((post.probs()[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((post.probs()[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn large_alpha_flattens_likelihoods() {
        let m = nb_train(&[sv(&[(0, 3)]), sv(&[(1, 3)])], &[0, 1], 2, 2, 1e9).unwrap();
        for c in 0..2 {
            for t in 0..2 {
                assert!((m.log_likelihoods[(c, t)].exp() - 0.5).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn empty_class_is_an_error() {
        assert!(nb_train(&[sv(&[(0, 1)])], &[0], 2, 2, 1.0).is_err());
        assert!(nb_train(&[sv(&[(0, 1)])], &[0], 1, 2, 0.0).unwrap_err().is_validation());
        assert!(nb_train(&[sv(&[(5, 1)])], &[0], 1, 2, 1.0).is_err());
    }

    #[test]
    fn table_invariants() {
        let m = toy();
        let prior_sum: f64 = m.log_priors.iter().map(|l| l.exp()).sum();
        assert!((prior_sum - 1.0).abs() < 1e-12);
        for c in 0..2 {
            let s: f64 = m.log_likelihoods.row(c).iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}
