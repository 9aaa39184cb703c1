//! Full-batch training loops with an adaptive first-order optimizer.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::loss::{interval_loss, mse_loss, IntervalLossConfig};
use super::model::{Mlp, Normalization, PiModel, RegModel, WIDE_BIAS};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeds::{mix, rng_for};

/// Training-set coverage tolerance around the target; outside it the
/// best-coverage checkpoint is returned with a warning flag.
pub const COVERAGE_TOLERANCE: f64 = 0.04;

/// Full-batch training configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Step size of the coverage/width balance adaptation.
    pub eta: f64,
    /// Seed of training-time randomness (divergence restarts, dropout masks).
    pub seed: u64,
    /// Standardize inputs and targets for this call.
    pub normalize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 2000,
            learning_rate: 1e-3,
            eta: 0.1,
            seed: 0,
            normalize: true,
        }
    }
}

struct Adam {
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
    step: usize,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(net: &Mlp, lr: f64) -> Self {
        let (weights, biases) = net.layers();
        Adam {
            m_w: weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            v_w: weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            m_b: biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
            v_b: biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
            step: 0,
            lr,
        }
    }

    fn apply(&mut self, net: &mut Mlp, d_weights: &[Array2<f64>], d_biases: &[Array1<f64>]) {
        self.step += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.step as i32);
        let bc2 = 1.0 - Self::BETA2.powi(self.step as i32);
        let scale = self.lr / bc1;
        let (weights, biases) = net.layers_mut();
        for l in 0..weights.len() {
            update(
                weights[l].iter_mut(),
                d_weights[l].iter(),
                self.m_w[l].iter_mut(),
                self.v_w[l].iter_mut(),
                scale,
                bc2,
            );
            update(
                biases[l].iter_mut(),
                d_biases[l].iter(),
                self.m_b[l].iter_mut(),
                self.v_b[l].iter_mut(),
                scale,
                bc2,
            );
        }
    }
}

fn update<'a>(
    params: impl Iterator<Item = &'a mut f64>,
    grads: impl Iterator<Item = &'a f64>,
    ms: impl Iterator<Item = &'a mut f64>,
    vs: impl Iterator<Item = &'a mut f64>,
    scale: f64,
    bc2: f64,
) {
    for (((p, &g), m), v) in params.zip(grads).zip(ms).zip(vs) {
        *m = Adam::BETA1 * *m + (1.0 - Adam::BETA1) * g;
        *v = Adam::BETA2 * *v + (1.0 - Adam::BETA2) * g * g;
        *p -= scale * *m / ((*v / bc2).sqrt() + Adam::EPS);
    }
}

/// Reusable buffers of the epoch loop: activations, their gradients, and
/// parameter gradients, allocated once per training call.
struct Workspace {
    /// `acts[0]` is the input; `acts[l+1]` the (masked) output of layer `l`.
    acts: Vec<Array2<f64>>,
    /// d_loss/d_z per layer, same shapes as `acts[1..]`.
    dz: Vec<Array2<f64>>,
    d_weights: Vec<Array2<f64>>,
    d_biases: Vec<Array1<f64>>,
}

impl Workspace {
    fn new(net: &Mlp, n: usize) -> Self {
        let (weights, biases) = net.layers();
        let mut acts = Vec::with_capacity(weights.len() + 1);
        acts.push(Array2::zeros((n, net.input_dim())));
        let mut dz = Vec::with_capacity(weights.len());
        for b in biases {
            acts.push(Array2::zeros((n, b.len())));
            dz.push(Array2::zeros((n, b.len())));
        }
        Workspace {
            acts,
            dz,
            d_weights: weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            d_biases: biases.iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
        }
    }

    /// Forward pass into the preallocated activation buffers.
    fn forward(&mut self, net: &Mlp, masks: Option<&[Array2<f64>]>) {
        let (weights, biases) = net.layers();
        let n_layers = weights.len();
        for l in 0..n_layers {
            let (input, rest) = self.acts.split_at_mut(l + 1);
            let z = &mut rest[0];
            general_mat_mul(1.0, &input[l], &weights[l], 0.0, z);
            *z += &biases[l];
            if l + 1 < n_layers {
                z.mapv_inplace(f64::tanh);
                if let Some(masks) = masks {
                    *z *= &masks[l];
                }
            }
        }
    }

    fn output(&self) -> &Array2<f64> {
        self.acts.last().expect("at least one layer")
    }

    /// Backward pass from `d_loss/d_output`, filling the gradient buffers.
    /// The tanh derivative is recovered from the masked activations:
    /// `mask - keep * a^2` equals `mask * (1 - tanh^2)` for inverted-dropout
    /// masks, and reduces to `1 - a^2` without dropout.
    fn backward(
        &mut self,
        net: &Mlp,
        d_output: Array2<f64>,
        masks: Option<(&[Array2<f64>], f64)>,
    ) {
        let (weights, _) = net.layers();
        let n_layers = weights.len();
        *self.dz.last_mut().expect("at least one layer") = d_output;
        for l in (0..n_layers).rev() {
            let (dz_head, dz_tail) = self.dz.split_at_mut(l);
            let dz = &dz_tail[0];
            general_mat_mul(1.0, &self.acts[l].t(), dz, 0.0, &mut self.d_weights[l]);
            self.d_biases[l].fill(0.0);
            for row in dz.rows() {
                self.d_biases[l] += &row;
            }
            if l > 0 {
                let da = &mut dz_head[l - 1];
                general_mat_mul(1.0, dz, &weights[l].t(), 0.0, da);
                let a = &self.acts[l];
                match masks {
                    Some((masks, keep)) => {
                        let mask = &masks[l - 1];
                        for ((d, &a), &m) in da.iter_mut().zip(a.iter()).zip(mask.iter()) {
                            *d *= m - keep * a * a;
                        }
                    }
                    None => {
                        da.zip_mut_with(a, |d, &a| *d *= 1.0 - a * a);
                    }
                }
            }
        }
    }
}

fn prepared_arrays(data: &Dataset, norm: &Normalization) -> (Array2<f64>, Array1<f64>) {
    let n = data.len();
    let d = data.dims();
    let mut x = Array2::zeros((n, d));
    let mut y = Array1::zeros(n);
    for (i, (xi, yi)) in data.xs().iter().zip(data.ys()).enumerate() {
        for (j, v) in norm.x_to_normalized(xi).into_iter().enumerate() {
            x[[i, j]] = v;
        }
        y[i] = norm.y_to_normalized(*yi);
    }
    (x, y)
}

fn fit_normalization(data: &Dataset, cfg: &TrainConfig) -> Normalization {
    if cfg.normalize {
        Normalization::fit(data.xs(), data.ys())
    } else {
        Normalization::identity(data.dims())
    }
}

fn check_trainable(data: &Dataset, input_dim: usize) -> Result<()> {
    if data.len() < 2 {
        return Err(Error::Config(format!(
            "training requires at least 2 observations, got {}",
            data.len()
        )));
    }
    if data.dims() != input_dim {
        return Err(Error::Shape {
            expected: format!("data of dimension {input_dim}"),
            got: format!("{}", data.dims()),
        });
    }
    Ok(())
}

/// Trains the target-estimation network with full-batch squared-error steps.
/// A non-finite loss triggers one restart from a fresh seeded initialization
/// at half the learning rate; a second failure is an error.
pub fn train_regression(model: RegModel, data: &Dataset, cfg: &TrainConfig) -> Result<RegModel> {
    train_regression_impl(model, data, cfg, 0.0)
}

/// Same loop with inverted-dropout masks on the hidden layers, for the
/// Monte-Carlo-dropout comparison sampler.
pub fn train_dropout_regression(
    model: RegModel,
    data: &Dataset,
    cfg: &TrainConfig,
    dropout_rate: f64,
) -> Result<RegModel> {
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(Error::Config(format!(
            "dropout rate must lie in [0, 1), got {dropout_rate}"
        )));
    }
    train_regression_impl(model, data, cfg, dropout_rate)
}

fn train_regression_impl(
    mut model: RegModel,
    data: &Dataset,
    cfg: &TrainConfig,
    dropout_rate: f64,
) -> Result<RegModel> {
    check_trainable(data, model.net.input_dim())?;
    let norm = fit_normalization(data, cfg);
    let (x, y) = prepared_arrays(data, &norm);
    let hidden = model.net.hidden_sizes();

    let keep = 1.0 - dropout_rate;
    let mut lr = cfg.learning_rate;
    let mut restarted = false;
    'attempt: loop {
        let mut adam = Adam::new(&model.net, lr);
        let mut ws = Workspace::new(&model.net, x.nrows());
        ws.acts[0].assign(&x);
        let mut mask_rng = rng_for(&[cfg.seed, 0x6d61_736b]);
        for epoch in 0..cfg.epochs {
            let masks = sample_masks(&hidden, x.nrows(), dropout_rate, &mut mask_rng);
            ws.forward(&model.net, masks.as_deref());
            let (loss, d_out) = mse_loss(ws.output(), &y);
            if !loss.is_finite() {
                if restarted {
                    return Err(Error::TrainingDiverged { epoch });
                }
                restarted = true;
                lr /= 2.0;
                model.net = Mlp::new(
                    model.net.input_dim(),
                    &hidden,
                    1,
                    mix(&[cfg.seed, 0x7265_7374_6172_74]),
                );
                continue 'attempt;
            }
            ws.backward(
                &model.net,
                d_out,
                masks.as_deref().map(|m| (m, keep)),
            );
            adam.apply(&mut model.net, &ws.d_weights, &ws.d_biases);
        }
        break;
    }
    model.norm = Some(norm);
    model.dropout_rate = dropout_rate;
    Ok(model)
}

fn sample_masks(
    hidden: &[usize],
    n: usize,
    dropout_rate: f64,
    rng: &mut impl Rng,
) -> Option<Vec<Array2<f64>>> {
    if dropout_rate == 0.0 {
        return None;
    }
    let keep = 1.0 - dropout_rate;
    Some(
        hidden
            .iter()
            .map(|&width| {
                Array2::from_shape_fn((n, width), |_| {
                    if rng.random::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                })
            })
            .collect(),
    )
}

/// One stochastic forward pass of a dropout-trained model (fresh masks).
pub fn mc_predict(model: &RegModel, x: &[f64], rng: &mut impl Rng) -> Result<f64> {
    let norm = model.norm.as_ref().ok_or(Error::Untrained)?;
    let xn = norm.x_to_normalized(x);
    let input = Array2::from_shape_vec((1, xn.len()), xn).expect("row vector");
    let hidden = model.net.hidden_sizes();
    let masks = sample_masks(&hidden, 1, model.dropout_rate, rng);
    let cache = model.net.forward_batch(&input, masks.as_deref());
    Ok(norm.y_from_normalized(cache.output[[0, 0]]))
}

/// Trains the interval-generation network with the width/coverage loss.
///
/// The balance coefficient is multiplied by `1 + eta * (target - PICP)`
/// after every epoch (clipped to `[1e-3, 1e4]`). If the final training-set
/// coverage is not within [`COVERAGE_TOLERANCE`] of the target, the epoch
/// checkpoint with the closest coverage is returned and the model carries a
/// warning flag. Normalization statistics are shared with the companion
/// regression model so both networks operate on the same normalized scale.
pub fn train_pi_network(
    mut model: PiModel,
    data: &Dataset,
    reg: &RegModel,
    cfg: &TrainConfig,
) -> Result<PiModel> {
    check_trainable(data, model.net.input_dim())?;
    let norm = reg.norm.clone().ok_or(Error::Untrained)?;
    let (x, y) = prepared_arrays(data, &norm);
    let hidden = model.net.hidden_sizes();
    let loss_cfg = IntervalLossConfig {
        coverage_target: model.coverage_target,
        steepness: 150.0,
    };

    let mut lr = cfg.learning_rate;
    let lambda0 = model.lambda;
    let mut restarted = false;
    'attempt: loop {
        let mut adam = Adam::new(&model.net, lr);
        let mut ws = Workspace::new(&model.net, x.nrows());
        ws.acts[0].assign(&x);
        let mut lambda = lambda0;
        let mut best_params: Option<Vec<f64>> = None;
        let mut best_gap = f64::INFINITY;
        for epoch in 0..cfg.epochs {
            ws.forward(&model.net, None);
            let (loss, d_out, stats) = interval_loss(ws.output(), &y, lambda, &loss_cfg);
            if !loss.is_finite() {
                if restarted {
                    return Err(Error::TrainingDiverged { epoch });
                }
                restarted = true;
                lr /= 2.0;
                let mut net = Mlp::new(
                    model.net.input_dim(),
                    &hidden,
                    2,
                    mix(&[cfg.seed, 0x7069_7265_7374]),
                );
                net.set_output_bias(&WIDE_BIAS);
                model.net = net;
                continue 'attempt;
            }
            ws.backward(&model.net, d_out, None);
            adam.apply(&mut model.net, &ws.d_weights, &ws.d_biases);
            lambda = (lambda * (1.0 + cfg.eta * (model.coverage_target - stats.picp)))
                .clamp(1e-3, 1e4);

            let gap = (stats.picp - model.coverage_target).abs();
            if gap < best_gap {
                best_gap = gap;
                best_params = Some(model.net.flat_params());
            }
        }
        model.lambda = lambda;

        let final_coverage = normalized_coverage(&model.net, &x, &y);
        if (final_coverage - model.coverage_target).abs() > COVERAGE_TOLERANCE {
            if let Some(params) = best_params {
                model.net.set_flat_params(&params);
            }
            model.coverage_warning = true;
        } else {
            model.coverage_warning = false;
        }
        model.empirical_coverage = Some(normalized_coverage(&model.net, &x, &y));
        break;
    }
    model.norm = Some(norm);
    Ok(model)
}

/// Capture fraction with ordered bounds, in normalized units.
fn normalized_coverage(net: &Mlp, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let out = net.forward_batch(x, None).output;
    let mut captured = 0usize;
    for i in 0..y.len() {
        let (lo, hi) = (
            out[[i, 0]].min(out[[i, 1]]),
            out[[i, 0]].max(out[[i, 1]]),
        );
        if lo <= y[i] && y[i] <= hi {
            captured += 1;
        }
    }
    captured as f64 / y.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Problem, ProblemKind};
    use crate::seeds::rng_for;

    #[test]
    fn workspace_gradients_match_the_allocating_path() {
        use super::super::loss::mse_value_and_grad;
        let net = Mlp::new(2, &[7, 5], 1, 99);
        let mut rng = rng_for(&[100]);
        let n = 23;
        let x = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1.0..1.0));
        let y = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));

        let mut ws = Workspace::new(&net, n);
        ws.acts[0].assign(&x);
        ws.forward(&net, None);
        let (loss_ws, d_out) = mse_loss(ws.output(), &y);
        ws.backward(&net, d_out, None);
        let mut flat_ws = Vec::new();
        for (dw, db) in ws.d_weights.iter().zip(&ws.d_biases) {
            flat_ws.extend(dw.iter().copied());
            flat_ws.extend(db.iter().copied());
        }

        let (loss_ref, flat_ref) = mse_value_and_grad(&net, &x, &y);
        assert_eq!(loss_ws, loss_ref);
        assert_eq!(flat_ws, flat_ref);
    }

    fn line_dataset(n: usize) -> Dataset {
        let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0]).collect();
        Dataset::from_pairs(xs, ys).unwrap()
    }

    fn quick_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: 600,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn linear_data_reaches_small_normalized_mse() {
        let data = line_dataset(200);
        let model = RegModel::init(1, &[32, 32], 1).unwrap();
        let model = train_regression(model, &data, &quick_cfg(1)).unwrap();
        let mse = model.normalized_mse(data.xs(), data.ys()).unwrap();
        assert!(mse <= 1e-3, "normalized mse {mse}");
    }

    #[test]
    fn constant_targets_are_predicted_exactly() {
        let xs: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 0.1]).collect();
        let ys = vec![4.25; 50];
        let data = Dataset::from_pairs(xs.clone(), ys).unwrap();
        let model = RegModel::init(1, &[16], 2).unwrap();
        let cfg = TrainConfig {
            seed: 2,
            ..TrainConfig::default()
        };
        let model = train_regression(model, &data, &cfg).unwrap();
        for x in &xs {
            assert!((model.predict(x).unwrap() - 4.25).abs() < 1e-2);
        }
    }

    #[test]
    fn training_is_deterministic_in_data_config_seed() {
        let data = line_dataset(64);
        let run = || {
            let model = RegModel::init(1, &[8, 8], 3).unwrap();
            train_regression(model, &data, &quick_cfg(5))
                .unwrap()
                .network()
                .flat_params()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn tiny_datasets_are_rejected() {
        let data = line_dataset(2);
        let mut small = Dataset::new(1);
        small.push(vec![0.0], 0.0).unwrap();
        let model = RegModel::init(1, &[8], 0).unwrap();
        assert!(matches!(
            train_regression(model.clone(), &small, &quick_cfg(0)),
            Err(Error::Config(_))
        ));
        assert!(train_regression(model, &data, &quick_cfg(0)).is_ok());
    }

    #[test]
    fn dense_cos_regression_beats_the_noise_floor() {
        let problem = Problem::new(ProblemKind::Cos);
        let grid = problem.fixed_grid().unwrap();
        let mut rng = rng_for(&[77]);
        let mut data = Dataset::new(1);
        for _ in 0..600 {
            let x = grid[rng.random_range(0..grid.len())].clone();
            let y = problem.sample_observation(&x, &mut rng).unwrap();
            data.push(x, y).unwrap();
        }
        let model = RegModel::init(1, &[100, 100], 9).unwrap();
        let cfg = TrainConfig {
            epochs: 1500,
            seed: 9,
            ..TrainConfig::default()
        };
        let model = train_regression(model, &data, &cfg).unwrap();
        let rmse = (grid
            .iter()
            .map(|x| {
                let err = model.predict(x).unwrap() - problem.underlying(x);
                err * err
            })
            .sum::<f64>()
            / grid.len() as f64)
            .sqrt();
        let mean_sigma =
            grid.iter().map(|x| problem.noise_std(x)).sum::<f64>() / grid.len() as f64;
        assert!(rmse < mean_sigma, "rmse {rmse} vs mean sigma {mean_sigma}");
    }

    #[test]
    fn pi_training_requires_trained_companion() {
        let data = line_dataset(32);
        let reg = RegModel::init(1, &[8], 0).unwrap();
        let pi = PiModel::init(1, &[8], 0, true).unwrap();
        assert!(matches!(
            train_pi_network(pi, &data, &reg, &quick_cfg(0)),
            Err(Error::Untrained)
        ));
    }

    #[test]
    fn zero_noise_intervals_collapse() {
        let data = line_dataset(150);
        let cfg = TrainConfig {
            seed: 4,
            ..TrainConfig::default()
        };
        let reg = RegModel::init(1, &[32, 32], 4).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi = PiModel::init(1, &[32, 32], 5, true).unwrap();
        let pi = train_pi_network(pi, &data, &reg, &cfg).unwrap();
        // Mean width in normalized units must drop well below the initial 6.
        let norm = pi.norm.as_ref().unwrap();
        let mean_width = pi.mean_width(data.xs()).unwrap() / norm.y_std;
        assert!(mean_width < 0.2, "normalized width {mean_width}");
    }

    #[test]
    fn constant_noiseless_targets_give_degenerate_interval() {
        let xs: Vec<Vec<f64>> = (0..120).map(|i| vec![i as f64 * 0.05]).collect();
        let data = Dataset::from_pairs(xs, vec![5.0; 120]).unwrap();
        let cfg = TrainConfig {
            seed: 6,
            ..TrainConfig::default()
        };
        let reg = RegModel::init(1, &[16], 6).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi = PiModel::init(1, &[16], 7, true).unwrap();
        let pi = train_pi_network(pi, &data, &reg, &cfg).unwrap();
        let (lo, hi) = pi.predict_interval(&[1.5]).unwrap();
        assert!((lo - 5.0).abs() < 0.1 && (hi - 5.0).abs() < 0.1, "[{lo}, {hi}]");
    }

    #[test]
    fn mean_width_shrinks_from_wide_start() {
        let data = line_dataset(120);
        let cfg = quick_cfg(8);
        let reg = RegModel::init(1, &[16], 8).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi0 = PiModel::init(1, &[16], 9, true).unwrap();
        let width_before: f64 = data
            .xs()
            .iter()
            .map(|x| {
                let (lo, hi) = pi0.raw_interval(x).unwrap();
                hi - lo
            })
            .sum::<f64>()
            / data.len() as f64;
        let pi = train_pi_network(pi0, &data, &reg, &cfg).unwrap();
        let norm = pi.norm.as_ref().unwrap();
        let width_after = pi.mean_width(data.xs()).unwrap() / norm.y_std;
        assert!(width_after < width_before, "{width_after} vs {width_before}");
    }

    #[test]
    fn reported_coverage_matches_brute_force() {
        let problem = Problem::new(ProblemKind::Cos);
        let grid = problem.fixed_grid().unwrap();
        let mut rng = rng_for(&[13]);
        let mut data = Dataset::new(1);
        for _ in 0..200 {
            let x = grid[rng.random_range(0..grid.len())].clone();
            let y = problem.sample_observation(&x, &mut rng).unwrap();
            data.push(x, y).unwrap();
        }
        let cfg = TrainConfig {
            epochs: 800,
            seed: 13,
            ..TrainConfig::default()
        };
        let reg = RegModel::init(1, &[32, 32], 13).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi = PiModel::init(1, &[32, 32], 14, true).unwrap();
        let pi = train_pi_network(pi, &data, &reg, &cfg).unwrap();

        let mut captured = 0usize;
        for (x, y) in data.xs().iter().zip(data.ys()) {
            let (lo, hi) = pi.predict_interval(x).unwrap();
            if lo <= *y && *y <= hi {
                captured += 1;
            }
        }
        let brute = captured as f64 / data.len() as f64;
        assert_eq!(pi.training_coverage().unwrap(), brute);
        assert_eq!(pi.empirical_coverage(data.xs(), data.ys()).unwrap(), brute);
    }

    #[test]
    fn interval_midpoint_tracks_the_regression_fit() {
        let problem = Problem::new(ProblemKind::Cos);
        let grid = problem.fixed_grid().unwrap();
        let mut rng = rng_for(&[21]);
        let mut data = Dataset::new(1);
        for _ in 0..400 {
            let x = grid[rng.random_range(0..grid.len())].clone();
            let y = problem.sample_observation(&x, &mut rng).unwrap();
            data.push(x, y).unwrap();
        }
        let cfg = TrainConfig {
            seed: 21,
            ..TrainConfig::default()
        };
        let reg = RegModel::init(1, &[64, 64], 21).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi = PiModel::init(1, &[64, 64], 22, true).unwrap();
        let pi = train_pi_network(pi, &data, &reg, &cfg).unwrap();
        let mut gaps: Vec<f64> = grid
            .iter()
            .map(|x| {
                let (lo, hi) = pi.predict_interval(x).unwrap();
                ((lo + hi) / 2.0 - reg.predict(x).unwrap()).abs()
            })
            .collect();
        gaps.sort_by(|a, b| a.total_cmp(b));
        let median = gaps[gaps.len() / 2];
        assert!(median < 1.0, "median |midpoint - fit| = {median}");
    }
}
