//! Feed-forward network engine with backpropagation.
//!
//! Provides the target-estimation network (single output, squared-error
//! training) and the interval-generation network (two outputs interpreted as
//! prediction-interval bounds, trained with a width/coverage loss). Hidden
//! layers use tanh; the output layer is affine. Inputs and targets are
//! standardized per training call, which makes the wide-bias initialization
//! of the interval network (`-3`/`+3` output biases) dataset-independent.

mod checkpoint;
mod loss;
mod model;
mod train;

pub use loss::{interval_value_and_grad, mse_value_and_grad, IntervalLossConfig, IntervalStats};
pub use model::{Mlp, Normalization, PiModel, RegModel};
pub use train::{
    mc_predict, train_dropout_regression, train_pi_network, train_regression, TrainConfig,
    COVERAGE_TOLERANCE,
};
