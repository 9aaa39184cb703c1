//! Literal reference implementations used as independent oracles.
//!
//! These transcribe the defining formulas as directly as possible — nested
//! loops, full-matrix conditioning, re-evaluated bounds — with none of the
//! caching or closed forms the production paths use. The self-test command
//! and the acceptance suite compare the two paths on random instances.

use ndarray::Array2;

use crate::dataset::Dataset;
use crate::uncertainty::IntervalModel;

/// Potential epistemic uncertainty at one candidate, straight from the
/// definition: scan the neighborhood, keep pairs captured by their own
/// bounds, and sum the two minimal slacks (interval width at the candidate
/// when nothing qualifies).
pub fn potential_epistemic_literal(
    data: &Dataset,
    pi: &impl IntervalModel,
    x_p: &[f64],
    theta: f64,
) -> f64 {
    let mut neighborhood: Vec<usize> = Vec::new();
    for (i, x) in data.xs().iter().enumerate() {
        let d2: f64 = x.iter().zip(x_p).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2.sqrt() <= theta {
            neighborhood.push(i);
        }
    }
    if !neighborhood.is_empty() {
        let mut upper_slacks: Vec<f64> = Vec::new();
        let mut lower_slacks: Vec<f64> = Vec::new();
        for &i in &neighborhood {
            let x = &data.xs()[i];
            let y = data.ys()[i];
            let (lower, upper) = pi.interval(x);
            if lower <= y && y <= upper {
                upper_slacks.push(upper - y);
                lower_slacks.push(y - lower);
            }
        }
        if !upper_slacks.is_empty() {
            let min_u = upper_slacks.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            let min_l = lower_slacks.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            return min_u + min_l;
        }
        // Neighbors exist but none is captured: same fallback as the
        // empty-neighborhood branch.
    }
    let (lower, upper) = pi.interval(x_p);
    upper - lower
}

/// Candidate-by-candidate literal scoring.
pub fn potential_map_literal(
    data: &Dataset,
    pi: &impl IntervalModel,
    x_test: &[Vec<f64>],
    theta: f64,
) -> Vec<f64> {
    x_test
        .iter()
        .map(|x_p| potential_epistemic_literal(data, pi, x_p, theta))
        .collect()
}

/// Covariance construction by explicit double loop.
pub fn build_covariance_literal(x_test: &[Vec<f64>], q: &[f64], r: f64) -> Array2<f64> {
    let n = q.len();
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                q[i]
            } else {
                let d2: f64 = x_test[i]
                    .iter()
                    .zip(&x_test[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let rho = (-d2 / (2.0 * r * r)).exp();
                rho * (q[i] * q[j]).sqrt()
            };
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    k
}

/// Full-matrix Schur-complement update
/// `K'(x, x') = K(x, x') - K(x, x_p) K(x_p, x_p)^{-1} K(x_p, x')`.
pub fn condition_literal(k: &Array2<f64>, p: usize) -> Array2<f64> {
    let n = k.nrows();
    let kpp_inv = 1.0 / k[[p, p]];
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = k[[i, j]] - k[[i, p]] * kpp_inv * k[[p, j]];
        }
    }
    out
}

fn sum_diag(k: &Array2<f64>) -> f64 {
    k.diag().sum()
}

/// Greedy batch selection that literally rebuilds and conditions full
/// matrices per candidate, tracking the running maximum with a strict
/// comparison (ties go to the first, i.e. lowest, index). Candidates whose
/// pivot sits below the degeneracy floor are skipped; when none remains the
/// batch is cut short.
pub fn greedy_batch_literal(
    x_test: &[Vec<f64>],
    q: &[f64],
    batch_size: usize,
    r: f64,
) -> (Vec<usize>, Vec<f64>, bool) {
    let mut k = build_covariance_literal(x_test, q, r);
    let mut picks = Vec::new();
    let mut deltas = Vec::new();
    let mut incomplete = false;
    while picks.len() < batch_size {
        let max_diag = k.diag().iter().fold(0.0f64, |a, &b| a.max(b));
        let floor = 1e-9 * (max_diag + 1e-12);
        let mut delta_max = f64::NEG_INFINITY;
        let mut best: Option<(usize, Array2<f64>)> = None;
        for p in 0..x_test.len() {
            if k[[p, p]] < floor {
                continue;
            }
            let conditioned = condition_literal(&k, p);
            let delta = sum_diag(&k) - sum_diag(&conditioned);
            if delta > delta_max {
                delta_max = delta;
                best = Some((p, conditioned));
            }
        }
        let Some((pick, k_best)) = best else {
            incomplete = true;
            break;
        };
        k = k_best;
        picks.push(pick);
        deltas.push(delta_max);
    }
    (picks, deltas, incomplete)
}

/// Central-difference gradient of a scalar function of a parameter vector.
pub fn numeric_gradient(
    mut f: impl FnMut(&[f64]) -> f64,
    params: &[f64],
    h: f64,
) -> Vec<f64> {
    let mut work = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        let original = work[i];
        work[i] = original + h;
        let plus = f(&work);
        work[i] = original - h;
        let minus = f(&work);
        work[i] = original;
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_gradient_of_a_quadratic() {
        let f = |p: &[f64]| p[0] * p[0] + 3.0 * p[1];
        let g = numeric_gradient(f, &[2.0, 5.0], 1e-6);
        assert!((g[0] - 4.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn literal_conditioning_collapses_the_pivot() {
        let k = build_covariance_literal(&[vec![0.0], vec![0.1]], &[4.0, 9.0], 0.15);
        let conditioned = condition_literal(&k, 1);
        assert!(conditioned[[1, 1]].abs() < 1e-12);
    }
}
