use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-class probabilities: non-negative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PosteriorVector(Vec<f64>);

impl PosteriorVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Shape("empty posterior".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Data(format!("invalid probabilities {probs:?}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Data(format!("probabilities sum to {sum}")));
        }
        Ok(PosteriorVector(probs))
    }

    /// Normalize non-negative scores to sum to one.
    pub fn normalized(scores: Vec<f64>) -> Result<Self> {
        let sum: f64 = scores.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::Data(format!("cannot normalize scores summing to {sum}")));
        }
        Self::new(scores.into_iter().map(|s| s / sum).collect())
    }

    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        PosteriorVector(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    /// Index of the largest probability; ties go to the lower index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

/// First index of the maximum value.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PosteriorVector::new(vec![0.5, 0.5]).is_ok());
        assert!(PosteriorVector::new(vec![0.5, 0.6]).is_err());
        assert!(PosteriorVector::new(vec![-0.1, 1.1]).is_err());
        assert!(PosteriorVector::normalized(vec![0.0, 0.0]).is_err());
        assert_eq!(
            PosteriorVector::normalized(vec![1.0, 3.0]).unwrap().probs(),
            &[0.25, 0.75]
        );
    }

    #[test]
    fn argmax_prefers_lower_index() {
        assert_eq!(argmax(&[0.2, 0.4, 0.4]), 1);
        assert_eq!(PosteriorVector::new(vec![0.5, 0.5]).unwrap().argmax(), 0);
    }
}
