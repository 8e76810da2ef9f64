use serde::{Deserialize, Serialize};

use super::Parameters;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig { lr, ..Self::default() }
    }
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Moment buffers for Adam, shaped like the parameter tensors they track.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    first_moment: Vec<Vec<f64>>,
    second_moment: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new<P: Parameters + ?Sized>(params: &P, config: AdamConfig) -> Self {
        let zeros: Vec<Vec<f64>> = params.tensors().iter().map(|t| vec![0.0; t.len()]).collect();
        AdamState {
            config,
            step: 0,
            first_moment: zeros.clone(),
            second_moment: zeros,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step<P: Parameters + ?Sized>(params: &mut P, grads: &P, state: &mut AdamState) -> Result<()> {
    let grad_tensors = grads.tensors();
    let mut param_tensors = params.tensors_mut();
    let shapes_agree = param_tensors.len() == grad_tensors.len()
        && param_tensors.len() == state.first_moment.len()
        && param_tensors
            .iter()
            .zip(&grad_tensors)
            .zip(&state.first_moment)
            .all(|((p, g), m)| p.len() == g.len() && p.len() == m.len());
    if !shapes_agree {
        return Err(Error::Shape("parameter, gradient and optimizer shapes differ".into()));
    }
    state.step += 1;
    let AdamConfig {
        lr,
        beta1,
        beta2,
        epsilon,
    } = state.config;
    let t = state.step as i32;
    let c1 = 1.0 - beta1.powi(t);
    let c2 = 1.0 - beta2.powi(t);
    for (((p, g), m), v) in param_tensors
        .iter_mut()
        .zip(&grad_tensors)
        .zip(&mut state.first_moment)
        .zip(&mut state.second_moment)
    {
        for i in 0..p.len() {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
    Ok(())
}
