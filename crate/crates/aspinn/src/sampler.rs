//! GP-surrogate batch acquisition.
//!
//! The surrogate covariance carries the potential-epistemic-uncertainty
//! values on its diagonal and RBF-correlated geometric means off it.
//! Conditioning on a candidate collapses its variance to zero; the predicted
//! total-uncertainty reduction of a candidate is the drop in the trace, and
//! batches are picked greedily against the covariance already conditioned on
//! earlier picks. Candidate scoring within one greedy step is embarrassingly
//! parallel over a read-only snapshot of the matrix.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::uncertainty::UncertaintyField;

/// RBF correlation `exp(-||x - x'||^2 / (2 r^2))`.
pub fn rbf_correlation(a: &[f64], b: &[f64], r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Config(format!(
            "kernel length must be positive, got {r}"
        )));
    }
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((-d2 / (2.0 * r * r)).exp())
}

/// Surrogate covariance over the candidate grid.
#[derive(Clone, Debug)]
pub struct SurrogateCov {
    k: Array2<f64>,
    x_test: Vec<Vec<f64>>,
    r: f64,
}

impl SurrogateCov {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.k
    }

    pub fn x_test(&self) -> &[Vec<f64>] {
        &self.x_test
    }

    pub fn kernel_length(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.k.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.k.diag().sum()
    }

    /// Pivots below this floor are excluded from conditioning and selection.
    pub fn pivot_floor(&self) -> f64 {
        let max_diag = self.k.diag().iter().fold(0.0f64, |a, &b| a.max(b));
        1e-9 * (max_diag + 1e-12)
    }
}

/// Builds the covariance: `K[i][i] = q[i]`,
/// `K[i][j] = rho(x_i, x_j) sqrt(q[i] q[j])` for `i != j`.
pub fn build_covariance(field: &UncertaintyField, r: f64) -> Result<SurrogateCov> {
    let n = field.q.len();
    if n != field.x_test.len() {
        return Err(Error::Shape {
            expected: format!("{} uncertainty values", field.x_test.len()),
            got: format!("{n}"),
        });
    }
    let mut k = Array2::zeros((n, n));
    for i in 0..n {
        k[[i, i]] = field.q[i];
        for j in (i + 1)..n {
            let rho = rbf_correlation(&field.x_test[i], &field.x_test[j], r)?;
            let v = rho * (field.q[i] * field.q[j]).sqrt();
            k[[i, j]] = v;
            k[[j, i]] = v;
        }
    }
    Ok(SurrogateCov {
        k,
        x_test: field.x_test.clone(),
        r,
    })
}

/// Conditions the covariance on an observation at candidate `p`
/// (`K' = K - K[:,p] K[p,p]^{-1} K[p,:]`). The pivot's diagonal entry
/// collapses to zero; tiny negative diagonal drift is clamped at zero.
pub fn condition(cov: &SurrogateCov, p: usize) -> Result<SurrogateCov> {
    let mut out = cov.clone();
    condition_in_place(&mut out, p)?;
    Ok(out)
}

fn condition_in_place(cov: &mut SurrogateCov, p: usize) -> Result<()> {
    let n = cov.n();
    let floor = cov.pivot_floor();
    let kpp = cov.k[[p, p]];
    if kpp < floor {
        return Err(Error::DegeneratePivot {
            index: p,
            value: kpp,
            floor,
        });
    }
    let factors: Vec<f64> = (0..n).map(|i| cov.k[[i, p]] / kpp).collect();
    let pivot_row: Vec<f64> = (0..n).map(|j| cov.k[[p, j]]).collect();
    // Update the upper triangle and mirror it, keeping K' exactly symmetric.
    for i in 0..n {
        for j in i..n {
            let v = cov.k[[i, j]] - factors[i] * pivot_row[j];
            cov.k[[i, j]] = v;
            cov.k[[j, i]] = v;
        }
    }
    for i in 0..n {
        if cov.k[[i, i]] < 0.0 && cov.k[[i, i]] > -1e-12 {
            cov.k[[i, i]] = 0.0;
        }
    }
    Ok(())
}

/// Predicted total-uncertainty reduction of observing candidate `p`:
/// `sum_i K[i,p]^2 / K[p,p]` (the trace drop under conditioning).
/// Degenerate pivots score zero so callers skip them.
pub fn acquisition_delta(cov: &SurrogateCov, p: usize) -> f64 {
    let kpp = cov.k[[p, p]];
    if kpp < cov.pivot_floor() {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..cov.n() {
        let v = cov.k[[i, p]];
        acc += v * v;
    }
    acc / kpp
}

/// A greedy batch: candidate indices in pick order with the predicted
/// reduction of each pick. `incomplete` is set when every remaining
/// candidate was degenerate before the batch filled up.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub indices: Vec<usize>,
    pub delta_j: Vec<f64>,
    pub incomplete: bool,
}

/// Greedy batch selection: each pick maximizes the predicted reduction
/// against the covariance already conditioned on the earlier picks.
/// Ties break toward the lowest grid index.
pub fn select_batch(field: &UncertaintyField, batch_size: usize, r: f64) -> Result<Batch> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    if field.x_test.is_empty() {
        return Err(Error::Config("candidate grid must be non-empty".into()));
    }
    let mut cov = build_covariance(field, r)?;
    select_from_cov(&mut cov, batch_size, score_all)
}

/// Sequential selection path, kept callable for benchmarks regardless of
/// the `parallel` feature.
pub fn select_batch_seq(field: &UncertaintyField, batch_size: usize, r: f64) -> Result<Batch> {
    if batch_size == 0 {
        return Err(Error::Config("batch size must be at least 1".into()));
    }
    if field.x_test.is_empty() {
        return Err(Error::Config("candidate grid must be non-empty".into()));
    }
    let mut cov = build_covariance(field, r)?;
    select_from_cov(&mut cov, batch_size, score_all_seq)
}

fn select_from_cov(
    cov: &mut SurrogateCov,
    batch_size: usize,
    score: impl Fn(&SurrogateCov) -> Vec<f64>,
) -> Result<Batch> {
    let mut batch = Batch {
        indices: Vec::with_capacity(batch_size),
        delta_j: Vec::with_capacity(batch_size),
        incomplete: false,
    };
    for _ in 0..batch_size {
        let floor = cov.pivot_floor();
        let scores = score(cov);
        let mut best: Option<(usize, f64)> = None;
        for (p, &s) in scores.iter().enumerate() {
            if cov.k[[p, p]] < floor {
                continue;
            }
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((p, s));
            }
        }
        let Some((pick, delta)) = best else {
            batch.incomplete = true;
            break;
        };
        condition_in_place(cov, pick).expect("selected pivot is above the floor");
        batch.indices.push(pick);
        batch.delta_j.push(delta);
    }
    Ok(batch)
}

fn score_all(cov: &SurrogateCov) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        (0..cov.n())
            .into_par_iter()
            .map(|p| acquisition_delta(cov, p))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        score_all_seq(cov)
    }
}

fn score_all_seq(cov: &SurrogateCov) -> Vec<f64> {
    (0..cov.n()).map(|p| acquisition_delta(cov, p)).collect()
}
