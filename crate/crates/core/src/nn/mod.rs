//! Small dense neural-network kernel: matrices, MLPs, softmax
//! cross-entropy, Adam and finite-difference gradient checking.
//!
//! Gradients are derived by hand per architecture; there is no autodiff tape.

mod adam;
mod gradcheck;
mod layers;
mod loss;
mod matrix;
mod params;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{grad_check, relative_error, GradCheckReport, FD_STEP, RELATIVE_FLOOR};
pub use layers::{dropout_mask, mlp_forward, Activation, Linear, MlpCache, MlpParams};
pub use loss::{log_sum_exp, softmax, softmax_cross_entropy, softmax_rows};
pub use matrix::DenseMatrix;
pub use params::Parameters;
