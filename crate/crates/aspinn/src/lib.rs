//! Adaptive sampling driven by prediction-interval neural networks.
//!
//! The crate implements the ASPINN sampling loop: a pair of feed-forward
//! networks produces point estimates and prediction intervals, a
//! potential-epistemic-uncertainty metric scores every candidate location,
//! and a Gaussian-process surrogate selects the batch of locations whose
//! observation is expected to shrink that uncertainty the most. Synthetic
//! benchmark problems, comparison samplers (random, exact GP, MC-Dropout),
//! and an experiment harness with CSV/JSON outputs are included so the
//! whole pipeline can be exercised end to end.
//!
//! Data-parallel inner loops (candidate scoring, repeated experiment runs)
//! use rayon when the default `parallel` feature is enabled; disabling it
//! yields a fully sequential build with identical numerical results.

pub mod baselines;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod nn;
pub mod problems;
pub mod reference;
pub mod sampler;
pub mod seeds;
pub mod uncertainty;

pub use dataset::Dataset;
pub use error::{Error, Result};
