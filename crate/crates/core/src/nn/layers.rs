use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{DenseMatrix, Parameters};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Affine map `x ↦ x·W + b` with `W` stored as `in × out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linear {
    pub weight: DenseMatrix,
    pub bias: Vec<f64>,
}

impl Linear {
    pub fn zeros(input: usize, output: usize) -> Self {
        Linear {
            weight: DenseMatrix::zeros(input, output),
            bias: vec![0.0; output],
        }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn init(input: usize, output: usize, rng: &mut Rng) -> Self {
        let a = (6.0 / (input + output) as f64).sqrt();
        let mut layer = Self::zeros(input, output);
        for w in layer.weight.data_mut() {
            *w = rng.gen_range(-a..a);
        }
        layer
    }

    pub fn input_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn validate(&self) -> Result<()> {
        if self.bias.len() != self.weight.cols() {
            return Err(Error::Shape(format!(
                "bias length {} for {} outputs",
                self.bias.len(),
                self.weight.cols()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, input: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = input.matmul(&self.weight)?;
        out.add_row_vector(&self.bias)?;
        Ok(out)
    }

    /// Accumulates weight/bias gradients into `grad` and returns the input gradient.
    pub fn backward(&self, input: &DenseMatrix, grad_out: &DenseMatrix, grad: &mut Linear) -> Result<DenseMatrix> {
        let dw = input.t_matmul(grad_out)?;
        for (g, d) in grad.weight.data_mut().iter_mut().zip(dw.data()) {
            *g += d;
        }
        for (g, d) in grad.bias.iter_mut().zip(grad_out.column_sums()) {
            *g += d;
        }
        grad_out.matmul_t(&self.weight)
    }
}

impl Parameters for Linear {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![self.weight.data(), &self.bias]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![self.weight.data_mut(), &mut self.bias]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    ReLU,
    Identity,
}

impl Activation {
    fn apply(self, m: &mut DenseMatrix) {
        if self == Activation::ReLU {
            m.map_inplace(|x| x.max(0.0));
        }
    }
}

/// Stack of affine layers with `activation` between consecutive layers and
/// no activation after the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<Linear>,
    pub activation: Activation,
}

/// Intermediate values kept from a forward pass for backpropagation.
#[derive(Debug, Clone)]
pub struct MlpCache {
    /// Input to each layer (post-activation of the previous one).
    inputs: Vec<DenseMatrix>,
}

impl MlpParams {
    /// Random MLP with the given layer widths, e.g. `[in, hidden, out]`.
    pub fn init(widths: &[usize], activation: Activation, rng: &mut Rng) -> Result<Self> {
        if widths.len() < 2 {
            return Err(Error::Shape("an MLP needs at least one layer".into()));
        }
        let layers = widths.windows(2).map(|w| Linear::init(w[0], w[1], rng)).collect();
        Ok(MlpParams { layers, activation })
    }

    pub fn zeros_like(&self) -> Self {
        MlpParams {
            layers: self
                .layers
                .iter()
                .map(|l| Linear::zeros(l.input_dim(), l.output_dim()))
                .collect(),
            activation: self.activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Linear::input_dim)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Linear::output_dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Shape("an MLP needs at least one layer".into()));
        }
        for l in &self.layers {
            l.validate()?;
        }
        for (i, w) in self.layers.windows(2).enumerate() {
            if w[0].output_dim() != w[1].input_dim() {
                return Err(Error::Shape(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    w[0].output_dim(),
                    i + 1,
                    w[1].input_dim()
                )));
            }
        }
        Ok(())
    }

    pub fn forward(&self, input: &DenseMatrix) -> Result<DenseMatrix> {
        Ok(self.forward_cached(input)?.0)
    }

    pub fn forward_cached(&self, input: &DenseMatrix) -> Result<(DenseMatrix, MlpCache)> {
        if input.cols() != self.input_dim() {
            return Err(Error::Shape(format!(
                "input width {} for MLP expecting {}",
                input.cols(),
                self.input_dim()
            )));
        }
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut h = input.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next = layer.forward(&h)?;
            if i + 1 < self.layers.len() {
                self.activation.apply(&mut next);
            }
            inputs.push(h);
            h = next;
        }
        Ok((h, MlpCache { inputs }))
    }

    /// Accumulates parameter gradients into `grad`, returns the input gradient.
    pub fn backward(&self, cache: &MlpCache, grad_out: &DenseMatrix, grad: &mut MlpParams) -> Result<DenseMatrix> {
        let mut g = grad_out.clone();
        for i in (0..self.layers.len()).rev() {
            g = self.layers[i].backward(&cache.inputs[i], &g, &mut grad.layers[i])?;
            if i > 0 && self.activation == Activation::ReLU {
                // inputs[i] is relu(pre-activation); its zeros mark the inactive units
                for (gv, hv) in g.data_mut().iter_mut().zip(cache.inputs[i].data()) {
                    if *hv <= 0.0 {
                        *gv = 0.0;
                    }
                }
            }
        }
        Ok(g)
    }
}

impl Parameters for MlpParams {
    fn tensors(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| l.tensors()).collect()
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| l.tensors_mut()).collect()
    }
}

/// Forward pass of `params` on `input`.
pub fn mlp_forward(params: &MlpParams, input: &DenseMatrix) -> Result<DenseMatrix> {
    params.validate()?;
    params.forward(input)
}

/// Inverted-dropout mask: each entry is 0 with probability `p`, else `1/(1-p)`.
pub fn dropout_mask(rows: usize, cols: usize, p: f64, rng: &mut Rng) -> DenseMatrix {
    let mut mask = DenseMatrix::zeros(rows, cols);
    let keep = 1.0 / (1.0 - p);
    for m in mask.data_mut() {
        *m = if rng.gen::<f64>() < p { 0.0 } else { keep };
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn affine(weight: DenseMatrix, bias: Vec<f64>) -> Linear {
        Linear { weight, bias }
    }

    #[test]
    fn relu_hidden_layer() {
        let mlp = MlpParams {
            layers: vec![
                affine(DenseMatrix::identity(2), vec![0.0; 2]),
                affine(DenseMatrix::identity(2), vec![0.0; 2]),
            ],
            activation: Activation::ReLU,
        };
        let x = DenseMatrix::from_rows(&[vec![-1.0, 2.0]]).unwrap();
        assert_eq!(mlp_forward(&mlp, &x).unwrap().data(), &[0.0, 2.0]);
    }

    #[test]
    fn zero_weights_give_bias() {
        let mlp = MlpParams {
            layers: vec![Linear::zeros(3, 4), affine(DenseMatrix::zeros(4, 2), vec![0.5, -1.5])],
            activation: Activation::ReLU,
        };
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-4.0, 0.0, 9.0]]).unwrap();
        let y = mlp_forward(&mlp, &x).unwrap();
        assert_eq!(y.data(), &[0.5, -1.5, 0.5, -1.5]);
    }

    #[test]
    fn single_layer_is_affine() {
        let mut r = rng::seeded(1);
        let mlp = MlpParams::init(&[3, 2], Activation::ReLU, &mut r).unwrap();
        let x = DenseMatrix::from_rows(&[vec![0.3, -2.0, 1.0]]).unwrap();
        let y = mlp_forward(&mlp, &x).unwrap();
        let l = &mlp.layers[0];
        for j in 0..2 {
            let expect: f64 = (0..3).map(|k| x[(0, k)] * l.weight[(k, j)]).sum::<f64>() + l.bias[j];
            assert!((y[(0, j)] - expect).abs() < 1e-15);
        }
        // negative outputs survive: no activation after the last layer
        assert!(mlp.forward(&DenseMatrix::zeros(1, 2)).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        let mlp = MlpParams {
            layers: vec![Linear::zeros(3, 4), Linear::zeros(5, 2)],
            activation: Activation::ReLU,
        };
        assert!(mlp.validate().is_err());
    }

    #[test]
    fn dropout_mask_values() {
        let mut r = rng::seeded(3);
        let m = dropout_mask(50, 20, 0.3, &mut r);
        let kept = m.data().iter().filter(|&&v| v > 0.0).count();
        assert!(m.data().iter().all(|&v| v == 0.0 || (v - 1.0 / 0.7).abs() < 1e-15));
        assert!((600..800).contains(&kept), "{kept}");
    }
}
