//! Training losses: squared error and the width/coverage interval loss.

use ndarray::{Array1, Array2};

use super::model::Mlp;

/// Parameters of the interval loss.
#[derive(Clone, Copy, Debug)]
pub struct IntervalLossConfig {
    /// Nominal fraction of responses the intervals should capture.
    pub coverage_target: f64,
    /// Sigmoid steepness of the soft coverage estimate.
    pub steepness: f64,
}

impl Default for IntervalLossConfig {
    fn default() -> Self {
        IntervalLossConfig {
            coverage_target: 0.95,
            steepness: 150.0,
        }
    }
}

/// Per-epoch summary of the interval loss terms.
#[derive(Clone, Copy, Debug)]
pub struct IntervalStats {
    /// Hard capture fraction (raw, unordered bounds).
    pub picp: f64,
    /// Sigmoid-smoothed capture fraction.
    pub picp_soft: f64,
    /// Mean width over captured points (all points when none captured).
    pub mpiw_captured: f64,
}

/// Mean squared error and its gradient with respect to the outputs.
pub(crate) fn mse_loss(output: &Array2<f64>, targets: &Array1<f64>) -> (f64, Array2<f64>) {
    let n = targets.len() as f64;
    let mut grad = Array2::zeros(output.raw_dim());
    let mut loss = 0.0;
    for i in 0..targets.len() {
        let diff = output[[i, 0]] - targets[i];
        loss += diff * diff / n;
        grad[[i, 0]] = 2.0 * diff / n;
    }
    (loss, grad)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Interval loss `MPIW_capt + lambda * max(0, target - PICP_soft)^2`.
///
/// `MPIW_capt` is the mean width over points captured by their raw bounds
/// (capture membership is treated as constant under differentiation).
/// `PICP_soft` multiplies sigmoids of the signed distances to both bounds.
/// Returns the loss value, its gradient with respect to the `(n, 2)` output
/// matrix, and the epoch statistics used for the balance update.
pub(crate) fn interval_loss(
    output: &Array2<f64>,
    targets: &Array1<f64>,
    lambda: f64,
    cfg: &IntervalLossConfig,
) -> (f64, Array2<f64>, IntervalStats) {
    let n = targets.len();
    let nf = n as f64;
    let beta = cfg.steepness;

    let mut captured = vec![false; n];
    let mut n_captured = 0usize;
    let mut width_sum_captured = 0.0;
    let mut abs_width_sum_all = 0.0;
    let mut soft_sum = 0.0;
    let mut s_lo = vec![0.0; n];
    let mut s_hi = vec![0.0; n];
    for i in 0..n {
        let (lo, hi) = (output[[i, 0]], output[[i, 1]]);
        let y = targets[i];
        abs_width_sum_all += (hi - lo).abs();
        if lo <= y && y <= hi {
            captured[i] = true;
            n_captured += 1;
            width_sum_captured += hi - lo;
        }
        s_hi[i] = sigmoid(beta * (hi - y));
        s_lo[i] = sigmoid(beta * (y - lo));
        soft_sum += s_hi[i] * s_lo[i];
    }
    let picp = n_captured as f64 / nf;
    let picp_soft = soft_sum / nf;
    // Fallback when nothing is captured: mean |width| over all points, so
    // crossed bounds are pulled back toward each other instead of apart.
    let mpiw_captured = if n_captured > 0 {
        width_sum_captured / n_captured as f64
    } else {
        abs_width_sum_all / nf
    };
    let shortfall = (cfg.coverage_target - picp_soft).max(0.0);
    let loss = mpiw_captured + lambda * shortfall * shortfall;

    let mut grad = Array2::zeros(output.raw_dim());
    // d(penalty)/d(picp_soft); zero when coverage already meets the target.
    let pen_factor = -2.0 * lambda * shortfall;
    for i in 0..n {
        let w = if n_captured > 0 {
            if captured[i] {
                1.0 / n_captured as f64
            } else {
                0.0
            }
        } else {
            let (lo, hi) = (output[[i, 0]], output[[i, 1]]);
            (hi - lo).signum() / nf
        };
        let d_soft_d_hi = beta / nf * s_hi[i] * (1.0 - s_hi[i]) * s_lo[i];
        let d_soft_d_lo = -beta / nf * s_hi[i] * s_lo[i] * (1.0 - s_lo[i]);
        grad[[i, 0]] = -w + pen_factor * d_soft_d_lo;
        grad[[i, 1]] = w + pen_factor * d_soft_d_hi;
    }

    (
        loss,
        grad,
        IntervalStats {
            picp,
            picp_soft,
            mpiw_captured,
        },
    )
}

/// Squared-error loss of a network on `(x, y)` plus the flat parameter
/// gradient from backpropagation. Inputs are used as given.
pub fn mse_value_and_grad(net: &Mlp, x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let cache = net.forward_batch(x, None);
    let (loss, d_out) = mse_loss(&cache.output, y);
    let grads = net.backward_batch(&cache, d_out, None);
    (loss, flatten_grads(net, grads))
}

/// Interval loss of a network on `(x, y)` plus the flat parameter gradient.
pub fn interval_value_and_grad(
    net: &Mlp,
    x: &Array2<f64>,
    y: &Array1<f64>,
    lambda: f64,
    cfg: &IntervalLossConfig,
) -> (f64, Vec<f64>) {
    let cache = net.forward_batch(x, None);
    let (loss, d_out, _) = interval_loss(&cache.output, y, lambda, cfg);
    let grads = net.backward_batch(&cache, d_out, None);
    (loss, flatten_grads(net, grads))
}

fn flatten_grads(net: &Mlp, grads: super::model::Gradients) -> Vec<f64> {
    let mut out = Vec::with_capacity(net.n_params());
    for (dw, db) in grads.d_weights.iter().zip(&grads.d_biases) {
        out.extend(dw.iter().copied());
        out.extend(db.iter().copied());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn mse_of_exact_fit_is_zero() {
        let out = array![[1.0], [2.0]];
        let y = array![1.0, 2.0];
        let (loss, grad) = mse_loss(&out, &y);
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn mse_matches_hand_computation() {
        let out = array![[3.0], [0.0]];
        let y = array![1.0, 1.0];
        let (loss, grad) = mse_loss(&out, &y);
        assert_relative_eq!(loss, (4.0 + 1.0) / 2.0);
        assert_relative_eq!(grad[[0, 0]], 2.0);
        assert_relative_eq!(grad[[1, 0]], -1.0);
    }

    #[test]
    fn interval_loss_counts_hard_coverage() {
        let out = array![[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]];
        let y = array![0.0, 0.5, 2.0];
        let (_, _, stats) = interval_loss(&out, &y, 1.0, &IntervalLossConfig::default());
        assert_relative_eq!(stats.picp, 2.0 / 3.0);
        assert_relative_eq!(stats.mpiw_captured, 2.0);
    }

    #[test]
    fn full_coverage_reduces_loss_to_width_term() {
        let out = array![[-2.0, 2.0], [-2.0, 2.0]];
        let y = array![0.0, 0.1];
        let cfg = IntervalLossConfig::default();
        let (loss, _, stats) = interval_loss(&out, &y, 5.0, &cfg);
        // Sigmoids saturate well inside the interval, so no penalty remains.
        assert_relative_eq!(stats.picp_soft, 1.0, epsilon = 1e-9);
        assert_relative_eq!(loss, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn uncaptured_points_get_no_width_gradient() {
        let out = array![[-1.0, 1.0], [-1.0, 1.0]];
        let y = array![0.0, 5.0];
        let cfg = IntervalLossConfig::default();
        let (_, grad, _) = interval_loss(&out, &y, 0.0, &cfg);
        // lambda = 0 isolates the width term: only the captured row sees it.
        assert_relative_eq!(grad[[0, 1]], 1.0);
        assert_relative_eq!(grad[[1, 1]], 0.0);
    }
}
