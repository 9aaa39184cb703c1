//! Network parameters, forward/backward passes, and the two model wrappers.

use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::rng_for;

/// Dense feed-forward network: tanh hidden layers, affine output layer.
/// Weight matrices are stored `(fan_in, fan_out)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    input_dim: usize,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

pub(crate) struct ForwardCache {
    /// Input to each affine layer (post-activation, post-mask).
    pub layer_inputs: Vec<Array2<f64>>,
    /// tanh outputs of each hidden layer, pre-mask.
    pub tanh_vals: Vec<Array2<f64>>,
    pub output: Array2<f64>,
}

pub(crate) struct Gradients {
    pub d_weights: Vec<Array2<f64>>,
    pub d_biases: Vec<Array1<f64>>,
}

impl Mlp {
    /// Seeded Xavier-uniform initialization; biases start at zero.
    pub fn new(input_dim: usize, hidden: &[usize], n_outputs: usize, seed: u64) -> Self {
        let mut rng = rng_for(&[seed]);
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(n_outputs);
        let mut weights = Vec::with_capacity(dims.len() - 1);
        let mut biases = Vec::with_capacity(dims.len() - 1);
        for w in dims.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weight = Array2::from_shape_fn((fan_in, fan_out), |_| {
                rng.random_range(-bound..bound)
            });
            weights.push(weight);
            biases.push(Array1::zeros(fan_out));
        }
        Mlp {
            input_dim,
            weights,
            biases,
        }
    }

    /// Builds a network from explicit parameters.
    pub fn from_parts(
        input_dim: usize,
        weights: Vec<Array2<f64>>,
        biases: Vec<Array1<f64>>,
    ) -> Result<Self> {
        if weights.is_empty() || weights.len() != biases.len() {
            return Err(Error::Config(
                "weights and biases must be non-empty and of equal length".into(),
            ));
        }
        let mut fan_in = input_dim;
        for (w, b) in weights.iter().zip(&biases) {
            if w.nrows() != fan_in || w.ncols() != b.len() {
                return Err(Error::Shape {
                    expected: format!("({fan_in}, {})", b.len()),
                    got: format!("({}, {})", w.nrows(), w.ncols()),
                });
            }
            fan_in = w.ncols();
        }
        Ok(Mlp {
            input_dim,
            weights,
            biases,
        })
    }

    /// Zeroes the output layer and pins its biases, so that the initial
    /// outputs equal the biases everywhere (the wide-interval start).
    pub fn set_output_bias(&mut self, bias: &[f64]) {
        let last = self.weights.len() - 1;
        self.weights[last].fill(0.0);
        self.biases[last] = Array1::from_vec(bias.to_vec());
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_outputs(&self) -> usize {
        self.biases.last().map_or(0, Array1::len)
    }

    pub fn hidden_sizes(&self) -> Vec<usize> {
        self.biases[..self.biases.len() - 1]
            .iter()
            .map(Array1::len)
            .collect()
    }

    /// Raw network evaluation of a single sample (no normalization).
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::Shape {
                expected: format!("input of dimension {}", self.input_dim),
                got: format!("{}", x.len()),
            });
        }
        let input = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row vector");
        let cache = self.forward_batch(&input, None);
        Ok(cache.output.row(0).to_vec())
    }

    pub(crate) fn forward_batch(
        &self,
        x: &Array2<f64>,
        masks: Option<&[Array2<f64>]>,
    ) -> ForwardCache {
        let n_layers = self.weights.len();
        let mut layer_inputs = Vec::with_capacity(n_layers);
        let mut tanh_vals = Vec::with_capacity(n_layers - 1);
        let mut current = x.clone();
        for l in 0..n_layers {
            layer_inputs.push(current.clone());
            let mut z = current.dot(&self.weights[l]) + &self.biases[l];
            if l + 1 < n_layers {
                z.mapv_inplace(f64::tanh);
                tanh_vals.push(z.clone());
                if let Some(masks) = masks {
                    z *= &masks[l];
                }
                current = z;
            } else {
                current = z;
            }
        }
        ForwardCache {
            layer_inputs,
            tanh_vals,
            output: current,
        }
    }

    /// Backpropagates `d_loss/d_output` through the cached forward pass.
    pub(crate) fn backward_batch(
        &self,
        cache: &ForwardCache,
        d_output: Array2<f64>,
        masks: Option<&[Array2<f64>]>,
    ) -> Gradients {
        let n_layers = self.weights.len();
        let mut d_weights = vec![Array2::zeros((0, 0)); n_layers];
        let mut d_biases = vec![Array1::zeros(0); n_layers];
        let mut dz = d_output;
        for l in (0..n_layers).rev() {
            d_weights[l] = cache.layer_inputs[l].t().dot(&dz);
            let mut db = Array1::zeros(dz.ncols());
            for row in dz.rows() {
                db += &row;
            }
            d_biases[l] = db;
            if l > 0 {
                let mut da = dz.dot(&self.weights[l].t());
                if let Some(masks) = masks {
                    da *= &masks[l - 1];
                }
                let t = &cache.tanh_vals[l - 1];
                da.zip_mut_with(t, |d, &t| *d *= 1.0 - t * t);
                dz = da;
            }
        }
        Gradients {
            d_weights,
            d_biases,
        }
    }

    pub fn n_params(&self) -> usize {
        self.weights.iter().map(Array2::len).sum::<usize>()
            + self.biases.iter().map(Array1::len).sum::<usize>()
    }

    /// Parameters flattened layer by layer, weights (row-major) then bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter().copied());
            out.extend(b.iter().copied());
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.n_params(), "parameter count mismatch");
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(self.biases.iter_mut()) {
            for v in w.iter_mut() {
                *v = params[offset];
                offset += 1;
            }
            for v in b.iter_mut() {
                *v = params[offset];
                offset += 1;
            }
        }
    }

    pub(crate) fn layers_mut(
        &mut self,
    ) -> (&mut Vec<Array2<f64>>, &mut Vec<Array1<f64>>) {
        (&mut self.weights, &mut self.biases)
    }

    pub(crate) fn layers(&self) -> (&[Array2<f64>], &[Array1<f64>]) {
        (&self.weights, &self.biases)
    }
}

/// Per-dimension input shift/scale and target shift/scale, fitted on the
/// training data of each call. Zero spreads fall back to unit scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub x_mean: Vec<f64>,
    pub x_std: Vec<f64>,
    pub y_mean: f64,
    pub y_std: f64,
}

impl Normalization {
    pub fn fit(xs: &[Vec<f64>], ys: &[f64]) -> Self {
        let n = xs.len().max(1) as f64;
        let dims = xs.first().map_or(0, Vec::len);
        let mut x_mean = vec![0.0; dims];
        for x in xs {
            for (m, v) in x_mean.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let mut x_std = vec![0.0; dims];
        for x in xs {
            for ((s, m), v) in x_std.iter_mut().zip(&x_mean).zip(x) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut x_std {
            *s = s.sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        let y_mean = ys.iter().sum::<f64>() / n;
        let mut y_std = (ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum::<f64>() / n).sqrt();
        if y_std < 1e-12 {
            y_std = 1.0;
        }
        Normalization {
            x_mean,
            x_std,
            y_mean,
            y_std,
        }
    }

    pub fn identity(dims: usize) -> Self {
        Normalization {
            x_mean: vec![0.0; dims],
            x_std: vec![1.0; dims],
            y_mean: 0.0,
            y_std: 1.0,
        }
    }

    pub fn x_to_normalized(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.x_mean)
            .zip(&self.x_std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn y_to_normalized(&self, y: f64) -> f64 {
        (y - self.y_mean) / self.y_std
    }

    pub fn y_from_normalized(&self, y: f64) -> f64 {
        y * self.y_std + self.y_mean
    }
}

/// Target-estimation network: one output trained on squared error.
#[derive(Clone, Debug)]
pub struct RegModel {
    pub(crate) net: Mlp,
    pub(crate) norm: Option<Normalization>,
    pub(crate) dropout_rate: f64,
}

impl RegModel {
    /// Seeded initialization. `hidden` must be non-empty.
    pub fn init(input_dim: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        check_layers(input_dim, hidden)?;
        Ok(RegModel {
            net: Mlp::new(input_dim, hidden, 1, seed),
            norm: None,
            dropout_rate: 0.0,
        })
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    pub fn is_trained(&self) -> bool {
        self.norm.is_some()
    }

    pub fn normalization(&self) -> Option<&Normalization> {
        self.norm.as_ref()
    }

    /// Raw network output (no normalization pipeline).
    pub fn forward_raw(&self, x: &[f64]) -> Result<f64> {
        Ok(self.net.forward(x)?[0])
    }

    /// De-normalized point prediction; requires a trained model.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let norm = self.norm.as_ref().ok_or(Error::Untrained)?;
        let out = self.net.forward(&norm.x_to_normalized(x))?[0];
        Ok(norm.y_from_normalized(out))
    }

    /// Mean squared error in normalized target units.
    pub fn normalized_mse(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
        let norm = self.norm.as_ref().ok_or(Error::Untrained)?;
        let mut acc = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            let out = self.net.forward(&norm.x_to_normalized(x))?[0];
            let target = norm.y_to_normalized(*y);
            acc += (out - target) * (out - target);
        }
        Ok(acc / xs.len() as f64)
    }
}

/// Interval-generation network: two outputs interpreted as the lower and
/// upper prediction-interval bounds (ordered at prediction time).
#[derive(Clone, Debug)]
pub struct PiModel {
    pub(crate) net: Mlp,
    pub(crate) norm: Option<Normalization>,
    pub(crate) coverage_target: f64,
    pub(crate) lambda: f64,
    pub(crate) coverage_warning: bool,
    pub(crate) empirical_coverage: Option<f64>,
}

/// Output biases of the wide initialization, in normalized target units.
pub(crate) const WIDE_BIAS: [f64; 2] = [-3.0, 3.0];

impl PiModel {
    /// Seeded initialization; with `wide_bias` the output layer starts at
    /// zero weights and biases spanning `[-3, 3]` in normalized units.
    pub fn init(input_dim: usize, hidden: &[usize], seed: u64, wide_bias: bool) -> Result<Self> {
        check_layers(input_dim, hidden)?;
        let mut net = Mlp::new(input_dim, hidden, 2, seed);
        if wide_bias {
            net.set_output_bias(&WIDE_BIAS);
        }
        Ok(PiModel {
            net,
            norm: None,
            coverage_target: 0.95,
            lambda: 10.0,
            coverage_warning: false,
            empirical_coverage: None,
        })
    }

    pub fn with_coverage_target(mut self, target: f64) -> Result<Self> {
        if !(0.0 < target && target < 1.0) {
            return Err(Error::Config(format!(
                "coverage target must lie in (0, 1), got {target}"
            )));
        }
        self.coverage_target = target;
        Ok(self)
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    pub fn coverage_target(&self) -> f64 {
        self.coverage_target
    }

    pub fn is_trained(&self) -> bool {
        self.norm.is_some()
    }

    /// True when training could not land within the coverage tolerance and
    /// the best-coverage checkpoint was returned instead.
    pub fn coverage_warning(&self) -> bool {
        self.coverage_warning
    }

    /// Training-set coverage measured when training finished.
    pub fn training_coverage(&self) -> Option<f64> {
        self.empirical_coverage
    }

    /// Ordered raw outputs (normalized units once trained).
    pub fn raw_interval(&self, x: &[f64]) -> Result<(f64, f64)> {
        let out = self.net.forward(x)?;
        Ok((out[0].min(out[1]), out[0].max(out[1])))
    }

    /// De-normalized, ordered interval bounds; requires a trained model.
    pub fn predict_interval(&self, x: &[f64]) -> Result<(f64, f64)> {
        let norm = self.norm.as_ref().ok_or(Error::Untrained)?;
        let out = self.net.forward(&norm.x_to_normalized(x))?;
        let a = norm.y_from_normalized(out[0]);
        let b = norm.y_from_normalized(out[1]);
        Ok((a.min(b), a.max(b)))
    }

    /// Fraction of responses inside their own predicted interval.
    pub fn empirical_coverage(&self, xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
        let mut captured = 0usize;
        for (x, y) in xs.iter().zip(ys) {
            let (lo, hi) = self.predict_interval(x)?;
            if (lo..=hi).contains(y) {
                captured += 1;
            }
        }
        Ok(captured as f64 / xs.len() as f64)
    }

    /// Mean de-normalized interval width over the given locations.
    pub fn mean_width(&self, xs: &[Vec<f64>]) -> Result<f64> {
        let mut acc = 0.0;
        for x in xs {
            let (lo, hi) = self.predict_interval(x)?;
            acc += hi - lo;
        }
        Ok(acc / xs.len() as f64)
    }
}

fn check_layers(input_dim: usize, hidden: &[usize]) -> Result<()> {
    if hidden.is_empty() {
        return Err(Error::Config("hidden layer list must be non-empty".into()));
    }
    if input_dim == 0 || hidden.contains(&0) {
        return Err(Error::Config("layer sizes must be positive".into()));
    }
    Ok(())
}
