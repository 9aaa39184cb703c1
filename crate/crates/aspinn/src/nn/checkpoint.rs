//! Self-describing JSON checkpoints for both model kinds.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::model::{Mlp, Normalization, PiModel, RegModel};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    kind: String,
    input_dim: usize,
    hidden: Vec<usize>,
    n_outputs: usize,
    /// Row-major `(fan_in, fan_out)` weight matrices, one per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    normalization: Option<Normalization>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    coverage_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    coverage_warning: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    empirical_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    dropout_rate: Option<f64>,
}

fn net_to_parts(net: &Mlp) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (weights, biases) = net.layers();
    (
        weights.iter().map(|w| w.iter().copied().collect()).collect(),
        biases.iter().map(|b| b.to_vec()).collect(),
    )
}

fn net_from_parts(
    input_dim: usize,
    hidden: &[usize],
    n_outputs: usize,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
) -> Result<Mlp> {
    let mut dims = vec![input_dim];
    dims.extend_from_slice(hidden);
    dims.push(n_outputs);
    if weights.len() + 1 != dims.len() {
        return Err(Error::Config("checkpoint layer count mismatch".into()));
    }
    let mut ws = Vec::with_capacity(weights.len());
    let mut bs = Vec::with_capacity(biases.len());
    for (l, (w, b)) in weights.into_iter().zip(biases).enumerate() {
        let shape = (dims[l], dims[l + 1]);
        let w = Array2::from_shape_vec(shape, w)
            .map_err(|_| Error::Config(format!("layer {l} weight size mismatch")))?;
        if b.len() != shape.1 {
            return Err(Error::Config(format!("layer {l} bias size mismatch")));
        }
        ws.push(w);
        bs.push(Array1::from_vec(b));
    }
    Mlp::from_parts(input_dim, ws, bs)
}

fn write(path: &Path, cp: &Checkpoint) -> Result<()> {
    let json = serde_json::to_string_pretty(cp)?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<Checkpoint> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

impl RegModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        let (weights, biases) = net_to_parts(&self.net);
        write(
            path,
            &Checkpoint {
                kind: "regression".into(),
                input_dim: self.net.input_dim(),
                hidden: self.net.hidden_sizes(),
                n_outputs: 1,
                weights,
                biases,
                normalization: self.norm.clone(),
                coverage_target: None,
                coverage_warning: None,
                empirical_coverage: None,
                dropout_rate: Some(self.dropout_rate),
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp = read(path)?;
        if cp.kind != "regression" {
            return Err(Error::Config(format!(
                "expected a regression checkpoint, got {:?}",
                cp.kind
            )));
        }
        Ok(RegModel {
            net: net_from_parts(cp.input_dim, &cp.hidden, 1, cp.weights, cp.biases)?,
            norm: cp.normalization,
            dropout_rate: cp.dropout_rate.unwrap_or(0.0),
        })
    }
}

impl PiModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        let (weights, biases) = net_to_parts(&self.net);
        write(
            path,
            &Checkpoint {
                kind: "interval".into(),
                input_dim: self.net.input_dim(),
                hidden: self.net.hidden_sizes(),
                n_outputs: 2,
                weights,
                biases,
                normalization: self.norm.clone(),
                coverage_target: Some(self.coverage_target),
                coverage_warning: Some(self.coverage_warning),
                empirical_coverage: self.empirical_coverage,
                dropout_rate: None,
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp = read(path)?;
        if cp.kind != "interval" {
            return Err(Error::Config(format!(
                "expected an interval checkpoint, got {:?}",
                cp.kind
            )));
        }
        Ok(PiModel {
            net: net_from_parts(cp.input_dim, &cp.hidden, 2, cp.weights, cp.biases)?,
            norm: cp.normalization,
            coverage_target: cp.coverage_target.unwrap_or(0.95),
            lambda: 1.0,
            coverage_warning: cp.coverage_warning.unwrap_or(false),
            empirical_coverage: cp.empirical_coverage,
        })
    }
}
