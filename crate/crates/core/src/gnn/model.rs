use serde::{Deserialize, Serialize};

use super::{GnnConfig, GraphBatch, Pool};
use crate::error::{Error, Result};
use crate::nn::{
    dropout_mask, softmax_cross_entropy, Activation, DenseMatrix, Linear, MlpCache, MlpParams, Parameters,
};
use crate::rng::{self, Rng};

pub const NUM_CLASSES: usize = 3;

/// GIN-style graph classifier: `num_layers` rounds of
/// `h_v ← MLP_k((1+ε)·h_v + POOL_{u∈N(v)} h_u)`, a graph readout, and a
/// linear head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnnModel {
    pub config: GnnConfig,
    pub layer_mlps: Vec<MlpParams>,
    pub classifier: Linear,
}

/// Whether dropout is active on the readout.
pub enum Mode<'a> {
    Eval,
    Train(&'a mut Rng),
}

struct LayerCache {
    input: DenseMatrix,
    mlp: MlpCache,
    /// For MAX pooling: source node per (node, dim), `usize::MAX` when the node has no neighbors.
    argmax: Vec<usize>,
}

/// Everything the backward pass needs from a forward pass.
pub struct ForwardCache {
    layers: Vec<LayerCache>,
    final_nodes: DenseMatrix,
    readout_argmax: Vec<usize>,
    mask: Option<DenseMatrix>,
    classifier_input: DenseMatrix,
}

impl GnnModel {
    /// Random initialization under `config.seed`.
    pub fn init(config: GnnConfig) -> Result<Self> {
        Self::init_with(config, &mut rng::seeded(config.seed))
    }

    pub fn init_with(config: GnnConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let h = config.hidden_dim;
        let mut layer_mlps = Vec::with_capacity(config.num_layers);
        for k in 0..config.num_layers {
            let input = if k == 0 { config.feature_width() } else { h };
            layer_mlps.push(MlpParams::init(&[input, h, h], Activation::ReLU, rng)?);
        }
        let classifier = Linear::init(h, NUM_CLASSES, rng);
        Ok(GnnModel {
            config,
            layer_mlps,
            classifier,
        })
    }

    pub fn zeros_like(&self) -> Self {
        GnnModel {
            config: self.config,
            layer_mlps: self.layer_mlps.iter().map(MlpParams::zeros_like).collect(),
            classifier: Linear::zeros(self.classifier.input_dim(), self.classifier.output_dim()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.layer_mlps.len() != self.config.num_layers {
            return Err(Error::Shape(format!(
                "{} layer MLPs for num_layers={}",
                self.layer_mlps.len(),
                self.config.num_layers
            )));
        }
        let mut width = self.config.feature_width();
        for mlp in &self.layer_mlps {
            mlp.validate()?;
            if mlp.input_dim() != width {
                return Err(Error::Shape(format!(
                    "layer MLP expects width {} but receives {width}",
                    mlp.input_dim()
                )));
            }
            width = mlp.output_dim();
        }
        self.classifier.validate()?;
        if self.classifier.input_dim() != width || self.classifier.output_dim() != NUM_CLASSES {
            return Err(Error::Shape(
                "classifier does not match the final embedding width".into(),
            ));
        }
        Ok(())
    }

    /// Per-graph logits (`num_graphs × 3`).
    pub fn forward(&self, batch: &GraphBatch, mode: Mode<'_>) -> Result<DenseMatrix> {
        let mask = match mode {
            Mode::Eval => None,
            Mode::Train(rng) => self.sample_mask(batch.num_graphs(), rng),
        };
        Ok(self.forward_cached(batch, mask)?.0)
    }

    pub fn sample_mask(&self, num_graphs: usize, rng: &mut Rng) -> Option<DenseMatrix> {
        (self.config.dropout > 0.0).then(|| dropout_mask(num_graphs, self.config.hidden_dim, self.config.dropout, rng))
    }

    /// Forward pass with an explicit readout dropout mask (`None` = eval mode).
    pub fn forward_cached(&self, batch: &GraphBatch, mask: Option<DenseMatrix>) -> Result<(DenseMatrix, ForwardCache)> {
        if batch.feature_width() != self.config.feature_width() {
            return Err(Error::Shape(format!(
                "batch features have width {} but the model expects {}",
                batch.feature_width(),
                self.config.feature_width()
            )));
        }
        let mut h = batch.features.clone();
        let mut layers = Vec::with_capacity(self.layer_mlps.len());
        for mlp in &self.layer_mlps {
            let (agg, argmax) = aggregate(&h, batch, self.config.neighbor_pool, self.config.epsilon);
            let (out, mlp_cache) = mlp.forward_cached(&agg)?;
            layers.push(LayerCache {
                input: h,
                mlp: mlp_cache,
                argmax,
            });
            h = out;
        }
        let (readout, readout_argmax) = readout(&h, batch, self.config.graph_pool);
        let classifier_input = match &mask {
            Some(m) => {
                if m.shape() != readout.shape() {
                    return Err(Error::Shape("dropout mask does not match readout".into()));
                }
                let data = readout.data().iter().zip(m.data()).map(|(r, k)| r * k).collect();
                DenseMatrix::from_vec(readout.rows(), readout.cols(), data)?
            }
            None => readout,
        };
        let logits = self.classifier.forward(&classifier_input)?;
        Ok((
            logits,
            ForwardCache {
                layers,
                final_nodes: h,
                readout_argmax,
                mask,
                classifier_input,
            },
        ))
    }

    /// Gradient of all parameters given the gradient of the logits.
    pub fn backward(&self, batch: &GraphBatch, cache: &ForwardCache, grad_logits: &DenseMatrix) -> Result<GnnModel> {
        let mut grad = self.zeros_like();
        let mut d_readout = self
            .classifier
            .backward(&cache.classifier_input, grad_logits, &mut grad.classifier)?;
        if let Some(mask) = &cache.mask {
            for (d, m) in d_readout.data_mut().iter_mut().zip(mask.data()) {
                *d *= m;
            }
        }
        let mut d_h = readout_backward(
            &d_readout,
            &cache.final_nodes,
            batch,
            self.config.graph_pool,
            &cache.readout_argmax,
        );
        for (k, layer) in cache.layers.iter().enumerate().rev() {
            let d_agg = self.layer_mlps[k].backward(&layer.mlp, &d_h, &mut grad.layer_mlps[k])?;
            if k == 0 {
                break;
            }
            d_h = aggregate_backward(
                &d_agg,
                &layer.input,
                batch,
                self.config.neighbor_pool,
                self.config.epsilon,
                &layer.argmax,
            );
        }
        Ok(grad)
    }

    /// Mean cross-entropy over the batch and its parameter gradient.
    pub fn loss_and_grad(
        &self,
        batch: &GraphBatch,
        labels: &[usize],
        mask: Option<DenseMatrix>,
    ) -> Result<(f64, GnnModel)> {
        let (logits, cache) = self.forward_cached(batch, mask)?;
        let (loss, d_logits) = softmax_cross_entropy(&logits, labels)?;
        Ok((loss, self.backward(batch, &cache, &d_logits)?))
    }
}

impl Parameters for GnnModel {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut t: Vec<&[f64]> = self.layer_mlps.iter().flat_map(|m| m.tensors()).collect();
        t.extend(self.classifier.tensors());
        t
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut t: Vec<&mut [f64]> = self.layer_mlps.iter_mut().flat_map(|m| m.tensors_mut()).collect();
        t.extend(self.classifier.tensors_mut());
        t
    }
}

/// Logits of every graph in `batch`, dropout off.
pub fn gnn_forward(model: &GnnModel, batch: &GraphBatch) -> Result<DenseMatrix> {
    model.forward(batch, Mode::Eval)
}

fn aggregate(h: &DenseMatrix, batch: &GraphBatch, pool: Pool, epsilon: f64) -> (DenseMatrix, Vec<usize>) {
    let d = h.cols();
    let mut agg = DenseMatrix::zeros(h.rows(), d);
    let mut argmax = if pool == Pool::Max {
        vec![usize::MAX; h.rows() * d]
    } else {
        Vec::new()
    };
    for (v, nbrs) in batch.neighbors.iter().enumerate() {
        let out = agg.row_mut(v);
        match pool {
            Pool::Sum | Pool::Mean => {
                for &u in nbrs {
                    for (o, x) in out.iter_mut().zip(h.row(u)) {
                        *o += x;
                    }
                }
                if pool == Pool::Mean && !nbrs.is_empty() {
                    let inv = 1.0 / nbrs.len() as f64;
                    out.iter_mut().for_each(|o| *o *= inv);
                }
            }
            Pool::Max => {
                if let Some((&first, rest)) = nbrs.split_first() {
                    out.copy_from_slice(h.row(first));
                    let arg = &mut argmax[v * d..(v + 1) * d];
                    arg.fill(first);
                    for &u in rest {
                        for (j, x) in h.row(u).iter().enumerate() {
                            if *x > out[j] {
                                out[j] = *x;
                                arg[j] = u;
                            }
                        }
                    }
                }
            }
        }
        for (o, x) in out.iter_mut().zip(h.row(v)) {
            *o += (1.0 + epsilon) * x;
        }
    }
    (agg, argmax)
}

fn aggregate_backward(
    d_agg: &DenseMatrix,
    h: &DenseMatrix,
    batch: &GraphBatch,
    pool: Pool,
    epsilon: f64,
    argmax: &[usize],
) -> DenseMatrix {
    let d = h.cols();
    let mut d_h = DenseMatrix::zeros(h.rows(), d);
    for (v, nbrs) in batch.neighbors.iter().enumerate() {
        let g = d_agg.row(v);
        for (o, x) in d_h.row_mut(v).iter_mut().zip(g) {
            *o += (1.0 + epsilon) * x;
        }
        match pool {
            Pool::Sum | Pool::Mean => {
                let scale = if pool == Pool::Mean && !nbrs.is_empty() {
                    1.0 / nbrs.len() as f64
                } else {
                    1.0
                };
                for &u in nbrs {
                    for (o, x) in d_h.row_mut(u).iter_mut().zip(g) {
                        *o += scale * x;
                    }
                }
            }
            Pool::Max => {
                if nbrs.is_empty() {
                    continue;
                }
                for j in 0..d {
                    d_h[(argmax[v * d + j], j)] += g[j];
                }
            }
        }
    }
    d_h
}

fn readout(h: &DenseMatrix, batch: &GraphBatch, pool: Pool) -> (DenseMatrix, Vec<usize>) {
    let d = h.cols();
    let mut out = DenseMatrix::zeros(batch.num_graphs(), d);
    let mut argmax = if pool == Pool::Max {
        vec![usize::MAX; batch.num_graphs() * d]
    } else {
        Vec::new()
    };
    for (g, range) in batch.node_ranges.iter().enumerate() {
        if range.is_empty() {
            continue;
        }
        let row = out.row_mut(g);
        match pool {
            Pool::Sum | Pool::Mean => {
                for v in range.clone() {
                    for (o, x) in row.iter_mut().zip(h.row(v)) {
                        *o += x;
                    }
                }
                if pool == Pool::Mean {
                    let inv = 1.0 / range.len() as f64;
                    row.iter_mut().for_each(|o| *o *= inv);
                }
            }
            Pool::Max => {
                row.copy_from_slice(h.row(range.start));
                let arg = &mut argmax[g * d..(g + 1) * d];
                arg.fill(range.start);
                for v in range.clone().skip(1) {
                    for (j, x) in h.row(v).iter().enumerate() {
                        if *x > row[j] {
                            row[j] = *x;
                            arg[j] = v;
                        }
                    }
                }
            }
        }
    }
    (out, argmax)
}

fn readout_backward(
    d_out: &DenseMatrix,
    h: &DenseMatrix,
    batch: &GraphBatch,
    pool: Pool,
    argmax: &[usize],
) -> DenseMatrix {
    let d = h.cols();
    let mut d_h = DenseMatrix::zeros(h.rows(), d);
    for (g, range) in batch.node_ranges.iter().enumerate() {
        if range.is_empty() {
            continue;
        }
        let grad = d_out.row(g);
        match pool {
            Pool::Sum | Pool::Mean => {
                let scale = if pool == Pool::Mean {
                    1.0 / range.len() as f64
                } else {
                    1.0
                };
                for v in range.clone() {
                    for (o, x) in d_h.row_mut(v).iter_mut().zip(grad) {
                        *o += scale * x;
                    }
                }
            }
            Pool::Max => {
                for j in 0..d {
                    d_h[(argmax[g * d + j], j)] += grad[j];
                }
            }
        }
    }
    d_h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::PropagationGraph;
    use crate::nn::grad_check;

    fn graph(n: usize, edges: &[(usize, usize)]) -> PropagationGraph {
        PropagationGraph::new("g", n, edges.iter().copied(), None).unwrap()
    }

    /// Draw every parameter (biases too) at random so the check point is
    /// away from ReLU kinks; zero biases make dead units produce exact zeros.
    pub(crate) fn jittered(mut model: GnnModel, seed: u64) -> GnnModel {
        use rand::Rng;
        let mut r = rng::seeded(seed ^ 0xA5A5);
        let flat: Vec<f64> = model.flatten().iter().map(|_| r.gen_range(-0.8..0.8)).collect();
        model.assign_flat(&flat);
        model
    }

    fn small_config(seed: u64) -> GnnConfig {
        GnnConfig {
            num_layers: 2,
            hidden_dim: 5,
            degree_cap: 4,
            seed,
            ..GnnConfig::default()
        }
    }

    #[test]
    fn empty_graph_logits_are_bias() {
        let model = GnnModel::init(small_config(1)).unwrap();
        let batch = GraphBatch::new([&graph(0, &[])], 4);
        let logits = gnn_forward(&model, &batch).unwrap();
        assert_eq!(logits.row(0), model.classifier.bias.as_slice());
    }

    #[test]
    fn path_differs_from_isolated_pair() {
        let model = GnnModel::init(small_config(2)).unwrap();
        let batch = GraphBatch::new([&graph(2, &[(0, 1)]), &graph(2, &[])], 4);
        let logits = gnn_forward(&model, &batch).unwrap();
        assert_ne!(logits.row(0), logits.row(1));
    }

    #[test]
    fn width_mismatch() {
        let model = GnnModel::init(small_config(0)).unwrap();
        let batch = GraphBatch::new([&graph(2, &[(0, 1)])], 7);
        assert!(gnn_forward(&model, &batch).is_err());
    }

    #[test]
    fn eval_mode_ignores_seed() {
        let model = GnnModel::init(small_config(5)).unwrap();
        let batch = GraphBatch::new([&graph(4, &[(0, 1), (1, 2), (1, 3)])], 4);
        let a = gnn_forward(&model, &batch).unwrap();
        let b = gnn_forward(&model, &batch).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_pooling_combination_gradient_checks() {
        let pools = [Pool::Sum, Pool::Mean, Pool::Max];
        let graphs = [
            graph(4, &[(0, 1), (1, 2), (1, 3)]),
            graph(3, &[(0, 1)]),
            graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (0, 2)]),
        ];
        let batch = GraphBatch::new(graphs.iter(), 4);
        let labels = [0, 2, 1];
        for (i, &np) in pools.iter().enumerate() {
            for (j, &gp) in pools.iter().enumerate() {
                let cfg = GnnConfig {
                    neighbor_pool: np,
                    graph_pool: gp,
                    epsilon: 0.25,
                    ..small_config((i * 3 + j) as u64)
                };
                let model = jittered(GnnModel::init(cfg).unwrap(), (i * 3 + j) as u64);
                let mask = model.sample_mask(3, &mut rng::seeded(9));
                let (_, grad) = model.loss_and_grad(&batch, &labels, mask.clone()).unwrap();
                let mut probe = model.clone();
                let report = grad_check(
                    |flat| {
                        probe.assign_flat(flat);
                        probe.loss_and_grad(&batch, &labels, mask.clone()).unwrap().0
                    },
                    &model.flatten(),
                    &grad.flatten(),
                    1e-4,
                )
                .unwrap();
                assert!(report.passed(), "{np:?}/{gp:?}: max {}", report.max_relative_error());
            }
        }
    }
}
