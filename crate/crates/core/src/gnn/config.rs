use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregation over a node's neighbors or over a graph's nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pool {
    Sum,
    Mean,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnnConfig {
    /// Message-passing rounds, each with its own two-layer MLP.
    pub num_layers: usize,
    pub hidden_dim: usize,
    pub neighbor_pool: Pool,
    pub graph_pool: Pool,
    /// Dropout on the graph readout, training only.
    pub dropout: f64,
    pub lr: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Degrees at or above this share the last one-hot slot.
    pub degree_cap: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for GnnConfig {
    fn default() -> Self {
        GnnConfig {
            num_layers: 4,
            hidden_dim: 128,
            neighbor_pool: Pool::Max,
            graph_pool: Pool::Mean,
            dropout: 0.3,
            lr: 0.01,
            epochs: 1000,
            batch_size: 32,
            degree_cap: 64,
            epsilon: 0.0,
            seed: 0,
        }
    }
}

impl GnnConfig {
    pub fn feature_width(&self) -> usize {
        self.degree_cap + 1
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout must be in [0, 1), got {}", self.dropout));
        }
        if self.num_layers == 0 {
            return fail("num_layers must be >= 1".into());
        }
        if self.hidden_dim == 0 {
            return fail("hidden_dim must be >= 1".into());
        }
        if self.degree_cap == 0 {
            return fail("degree_cap must be >= 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch_size must be >= 1".into());
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return fail(format!("lr must be positive, got {}", self.lr));
        }
        if !self.epsilon.is_finite() {
            return fail("epsilon must be finite".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let c = GnnConfig::default();
        assert_eq!((c.num_layers, c.hidden_dim, c.epochs), (4, 128, 1000));
        assert_eq!((c.neighbor_pool, c.graph_pool), (Pool::Max, Pool::Mean));
        c.validate().unwrap();
        let bad = GnnConfig { dropout: 1.5, ..c };
        assert!(bad.validate().unwrap_err().is_validation());
    }

    #[test]
    fn partial_json_overrides_defaults() {
        let c: GnnConfig = serde_json::from_str(r#"{"lr":0.001,"neighbor_pool":"SUM"}"#).unwrap();
        assert_eq!(c.lr, 0.001);
        assert_eq!(c.neighbor_pool, Pool::Sum);
        assert_eq!(c.hidden_dim, 128);
        assert!(serde_json::from_str::<GnnConfig>(r#"{"learning_rate":1}"#).is_err());
    }
}
