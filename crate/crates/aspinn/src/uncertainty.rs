//! Potential-epistemic-uncertainty metric and evaluation metrics.
//!
//! For a candidate location, the metric measures the slack between the
//! predicted interval bounds and the nearest captured observations in a
//! theta-neighborhood; where no neighbors exist, the full interval width
//! stands in. Candidates can be scored in parallel since every evaluation
//! is independent.

use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::nn::PiModel;
use crate::problems::Problem;

/// Anything that produces ordered interval bounds at a location.
pub trait IntervalModel: Sync {
    fn interval(&self, x: &[f64]) -> (f64, f64);
}

impl IntervalModel for PiModel {
    /// Panics when the model has not been trained.
    fn interval(&self, x: &[f64]) -> (f64, f64) {
        self.predict_interval(x)
            .expect("interval model must be trained")
    }
}

impl<F> IntervalModel for F
where
    F: Fn(&[f64]) -> (f64, f64) + Sync,
{
    fn interval(&self, x: &[f64]) -> (f64, f64) {
        self(x)
    }
}

/// Coordinate map distances are measured in: identity for the 1-D problems,
/// per-dimension standardization for multi-dimensional inputs.
#[derive(Clone, Debug)]
pub struct DistanceSpace {
    shift: Vec<f64>,
    scale: Vec<f64>,
}

impl DistanceSpace {
    pub fn identity(dims: usize) -> Self {
        DistanceSpace {
            shift: vec![0.0; dims],
            scale: vec![1.0; dims],
        }
    }

    /// Standardizes each dimension by the given locations' mean and spread.
    /// Dimensions without spread pass through unscaled.
    pub fn standardizing(xs: &[Vec<f64>]) -> Self {
        let dims = xs.first().map_or(0, Vec::len);
        let n = xs.len().max(1) as f64;
        let mut shift = vec![0.0; dims];
        for x in xs {
            for (m, v) in shift.iter_mut().zip(x) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; dims];
        for x in xs {
            for ((s, m), v) in scale.iter_mut().zip(&shift).zip(x) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut scale {
            *s = s.sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        DistanceSpace { shift, scale }
    }

    pub fn map(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.shift)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn map_all(&self, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        xs.iter().map(|x| self.map(x)).collect()
    }
}

/// Candidate locations with their potential-epistemic-uncertainty values.
/// Coordinates are stored in the distance space they were scored in.
#[derive(Clone, Debug)]
pub struct UncertaintyField {
    pub x_test: Vec<Vec<f64>>,
    pub q: Vec<f64>,
    pub theta: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Indices of observations within Euclidean distance `theta` of `x_p`
/// (closed ball; exact matches included).
pub fn neighborhood(x_p: &[f64], x_obs: &[Vec<f64>], theta: f64) -> Vec<usize> {
    x_obs
        .iter()
        .enumerate()
        .filter(|(_, x)| euclidean(x_p, x) <= theta)
        .map(|(i, _)| i)
        .collect()
}

/// A neighbor whose response falls inside its own predicted interval.
#[derive(Clone, Debug)]
pub struct CapturedPair {
    pub index: usize,
    pub x: Vec<f64>,
    pub y: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Filters the neighborhood down to pairs captured by their own interval,
/// with bounds evaluated at each neighbor's own location (closed bounds).
pub fn captured_pairs(
    neighbors: &[usize],
    data: &Dataset,
    pi: &impl IntervalModel,
) -> Vec<CapturedPair> {
    neighbors
        .iter()
        .filter_map(|&i| {
            let x = &data.xs()[i];
            let y = data.ys()[i];
            let (lower, upper) = pi.interval(x);
            (lower <= y && y <= upper).then(|| CapturedPair {
                index: i,
                x: x.clone(),
                y,
                lower,
                upper,
            })
        })
        .collect()
}

/// Potential epistemic uncertainty at one candidate location.
///
/// With captured neighbors: the minimal upper-bound slack plus the minimal
/// lower-bound slack over those neighbors (the two minima may come from
/// different neighbors). Without neighbors — or when none is captured —
/// the interval width at the candidate itself.
pub fn potential_epistemic(
    x_p: &[f64],
    data: &Dataset,
    pi: &impl IntervalModel,
    theta: f64,
) -> f64 {
    let neighbors = neighborhood(x_p, data.xs(), theta);
    let captured = captured_pairs(&neighbors, data, pi);
    q_from_parts(&captured, || pi.interval(x_p))
}

fn q_from_parts(captured: &[CapturedPair], interval_at_p: impl Fn() -> (f64, f64)) -> f64 {
    if captured.is_empty() {
        let (lower, upper) = interval_at_p();
        return upper - lower;
    }
    let upper_slack = captured
        .iter()
        .map(|p| p.upper - p.y)
        .fold(f64::INFINITY, f64::min);
    let lower_slack = captured
        .iter()
        .map(|p| p.y - p.lower)
        .fold(f64::INFINITY, f64::min);
    upper_slack + lower_slack
}

/// Scores every candidate location, preserving order.
pub fn potential_map(
    x_test: &[Vec<f64>],
    data: &Dataset,
    pi: &impl IntervalModel,
    theta: f64,
) -> UncertaintyField {
    let dims = x_test.first().map_or(0, Vec::len);
    potential_map_in(&DistanceSpace::identity(dims), x_test, data, pi, theta)
}

/// Scores candidates with neighborhoods computed in the given distance
/// space; interval bounds are always evaluated at the raw locations.
pub fn potential_map_in(
    space: &DistanceSpace,
    x_test: &[Vec<f64>],
    data: &Dataset,
    pi: &impl IntervalModel,
    theta: f64,
) -> UncertaintyField {
    let obs_metric = space.map_all(data.xs());
    let test_metric = space.map_all(x_test);
    // One bound evaluation per observation; the per-candidate loop reuses them.
    let obs_bounds: Vec<(f64, f64)> = data.xs().iter().map(|x| pi.interval(x)).collect();

    let score = |p: usize| {
        let captured: Vec<CapturedPair> = neighborhood(&test_metric[p], &obs_metric, theta)
            .into_iter()
            .filter_map(|i| {
                let (lower, upper) = obs_bounds[i];
                let y = data.ys()[i];
                (lower <= y && y <= upper).then(|| CapturedPair {
                    index: i,
                    x: data.xs()[i].clone(),
                    y,
                    lower,
                    upper,
                })
            })
            .collect();
        q_from_parts(&captured, || pi.interval(&x_test[p]))
    };

    let q = map_indices(x_test.len(), score);
    UncertaintyField {
        x_test: test_metric,
        q,
        theta,
    }
}

/// Sequential scoring path, kept callable for benchmarks regardless of the
/// `parallel` feature.
pub fn potential_map_seq(
    x_test: &[Vec<f64>],
    data: &Dataset,
    pi: &impl IntervalModel,
    theta: f64,
) -> UncertaintyField {
    let obs_bounds: Vec<(f64, f64)> = data.xs().iter().map(|x| pi.interval(x)).collect();
    let q = (0..x_test.len())
        .map(|p| {
            let captured: Vec<CapturedPair> = neighborhood(&x_test[p], data.xs(), theta)
                .into_iter()
                .filter_map(|i| {
                    let (lower, upper) = obs_bounds[i];
                    let y = data.ys()[i];
                    (lower <= y && y <= upper).then(|| CapturedPair {
                        index: i,
                        x: data.xs()[i].clone(),
                        y,
                        lower,
                        upper,
                    })
                })
                .collect();
            q_from_parts(&captured, || pi.interval(&x_test[p]))
        })
        .collect();
    UncertaintyField {
        x_test: x_test.to_vec(),
        q,
        theta,
    }
}

#[cfg(feature = "parallel")]
fn map_indices(n: usize, f: impl Fn(usize) -> f64 + Send + Sync) -> Vec<f64> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indices(n: usize, f: impl Fn(usize) -> f64 + Send + Sync) -> Vec<f64> {
    (0..n).map(f).collect()
}

/// Lower and upper bounds over a candidate grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl GridBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::Shape {
                expected: format!("{} upper bounds", lower.len()),
                got: format!("{}", upper.len()),
            });
        }
        Ok(GridBounds { lower, upper })
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }
}

/// Evaluates an interval model over a grid.
pub fn bounds_on_grid(pi: &impl IntervalModel, grid: &[Vec<f64>]) -> GridBounds {
    let (lower, upper) = grid.iter().map(|x| pi.interval(x)).unzip();
    GridBounds { lower, upper }
}

/// Ideal 95% bounds `f(x) ± 1.96 sigma_a(x)` from the ground truth
/// (evaluation path only).
pub fn ideal_bounds(problem: &Problem, x_test: &[Vec<f64>]) -> GridBounds {
    let mut lower = Vec::with_capacity(x_test.len());
    let mut upper = Vec::with_capacity(x_test.len());
    for x in x_test {
        let f = problem.underlying(x);
        let margin = 1.96 * problem.noise_std(x);
        lower.push(f - margin);
        upper.push(f + margin);
    }
    GridBounds { lower, upper }
}

/// Mean absolute gap between two bound pairs over the same grid:
/// `mean(|upper_a - upper_b| + |lower_a - lower_b|)`.
pub fn pi_delta(estimated: &GridBounds, ideal: &GridBounds) -> Result<f64> {
    if estimated.len() != ideal.len() {
        return Err(Error::Shape {
            expected: format!("grid of {} points", ideal.len()),
            got: format!("{}", estimated.len()),
        });
    }
    if estimated.is_empty() {
        return Err(Error::Config("bounds over an empty grid".into()));
    }
    let n = estimated.len() as f64;
    let mut acc = 0.0;
    for i in 0..estimated.len() {
        acc += (ideal.upper[i] - estimated.upper[i]).abs()
            + (ideal.lower[i] - estimated.lower[i]).abs();
    }
    Ok(acc / n)
}

/// Area under the uncertainty curve: unit-spaced rectangle rule (plain sum).
pub fn auuc(curve: &[f64]) -> f64 {
    curve.iter().sum()
}

/// A per-iteration uncertainty trajectory and its area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    pub pi_delta: Vec<f64>,
    pub auuc: f64,
}

impl LearningCurve {
    pub fn new(pi_delta: Vec<f64>) -> Self {
        let auuc = auuc(&pi_delta);
        LearningCurve { pi_delta, auuc }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemKind;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn dataset_1d(points: &[(f64, f64)]) -> Dataset {
        Dataset::from_pairs(
            points.iter().map(|(x, _)| vec![*x]).collect(),
            points.iter().map(|(_, y)| *y).collect(),
        )
        .unwrap()
    }

    #[test]
    fn neighborhood_matches_hand_example() {
        let obs = vec![vec![0.1], vec![0.3]];
        assert_eq!(neighborhood(&[0.0], &obs, 0.25), vec![0]);
    }

    #[test]
    fn zero_theta_without_exact_match_is_empty() {
        let obs = vec![vec![0.1], vec![0.3]];
        assert!(neighborhood(&[0.0], &obs, 0.0).is_empty());
        assert_eq!(neighborhood(&[0.3], &obs, 0.0), vec![1]);
    }

    #[test]
    fn neighborhood_matches_brute_force_scan() {
        let mut rng = crate::seeds::rng_for(&[31]);
        for _ in 0..20 {
            let obs: Vec<Vec<f64>> = (0..50)
                .map(|_| vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
                .collect();
            let x_p = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let theta = rng.random_range(0.0..1.5);
            let expected: Vec<usize> = (0..obs.len())
                .filter(|&i| {
                    let dx = obs[i][0] - x_p[0];
                    let dy = obs[i][1] - x_p[1];
                    (dx * dx + dy * dy).sqrt() <= theta
                })
                .collect();
            assert_eq!(neighborhood(&x_p, &obs, theta), expected);
        }
    }

    #[test]
    fn boundary_responses_are_captured() {
        let data = dataset_1d(&[(0.0, 2.0), (0.1, 5.0)]);
        let pi = |_: &[f64]| (0.0, 2.0);
        let pairs = captured_pairs(&[0, 1], &data, &pi);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].index, 0);
        assert_eq!(pairs[0].y, 2.0);
    }

    #[test]
    fn captured_pairs_match_membership_filter() {
        let mut rng = crate::seeds::rng_for(&[37]);
        let points: Vec<(f64, f64)> = (0..10)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-3.0..3.0)))
            .collect();
        let data = dataset_1d(&points);
        let pi = |x: &[f64]| (x[0] - 1.0, x[0] + 1.0);
        let all: Vec<usize> = (0..10).collect();
        let got: Vec<usize> = captured_pairs(&all, &data, &pi)
            .into_iter()
            .map(|p| p.index)
            .collect();
        let expected: Vec<usize> = points
            .iter()
            .enumerate()
            .filter(|(_, (x, y))| x - 1.0 <= *y && *y <= x + 1.0)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn empty_neighborhood_returns_interval_width() {
        let data = dataset_1d(&[(5.0, 0.0)]);
        let pi = |_: &[f64]| (2.0, 7.0);
        assert_relative_eq!(potential_epistemic(&[0.0], &data, &pi, 0.25), 5.0);
    }

    #[test]
    fn single_midpoint_neighbor_reduces_to_full_width() {
        // y sits midway in an interval of width 4.
        let data = dataset_1d(&[(0.1, 1.0)]);
        let pi = |_: &[f64]| (-1.0, 3.0);
        assert_relative_eq!(potential_epistemic(&[0.0], &data, &pi, 0.25), 4.0);
    }

    #[test]
    fn minima_may_come_from_different_neighbors() {
        // Neighbor slacks: (upper - y) in {1.0, 0.4}, (y - lower) in {2.0, 0.1}.
        let data = dataset_1d(&[(0.0, 2.0), (0.1, 0.7)]);
        let pi = |x: &[f64]| {
            if x[0] == 0.0 {
                (0.0, 3.0) // slacks 1.0 / 2.0
            } else {
                (0.6, 1.1) // slacks 0.4 / 0.1
            }
        };
        assert_relative_eq!(potential_epistemic(&[0.05], &data, &pi, 0.25), 0.5);
    }

    #[test]
    fn uncaptured_neighbors_fall_back_to_interval_width() {
        let data = dataset_1d(&[(0.1, 10.0)]);
        let pi = |_: &[f64]| (-1.0, 1.0);
        assert_relative_eq!(potential_epistemic(&[0.0], &data, &pi, 0.25), 2.0);
    }

    #[test]
    fn empty_dataset_map_equals_interval_widths() {
        let data = Dataset::new(1);
        let pi = |x: &[f64]| (0.0, 1.0 + x[0].abs());
        let grid: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64 * 0.3]).collect();
        let field = potential_map(&grid, &data, &pi, 0.25);
        for (x, q) in grid.iter().zip(&field.q) {
            assert_relative_eq!(*q, 1.0 + x[0].abs());
        }
    }

    #[test]
    fn map_agrees_with_per_candidate_metric() {
        let mut rng = crate::seeds::rng_for(&[41]);
        let points: Vec<(f64, f64)> = (0..40)
            .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let data = dataset_1d(&points);
        let pi = |x: &[f64]| (x[0].sin() - 0.8, x[0].sin() + 1.2);
        let grid: Vec<Vec<f64>> = (0..25).map(|i| vec![-2.0 + i as f64 * 0.16]).collect();
        let field = potential_map(&grid, &data, &pi, 0.25);
        for (x, q) in grid.iter().zip(&field.q) {
            assert_eq!(*q, potential_epistemic(x, &data, &pi, 0.25));
        }
        let seq = potential_map_seq(&grid, &data, &pi, 0.25);
        assert_eq!(field.q, seq.q);
    }

    #[test]
    fn dense_tight_intervals_give_near_zero_uncertainty() {
        let points: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let x = -2.0 + 4.0 * i as f64 / 199.0;
                (x, x.sin())
            })
            .collect();
        let data = dataset_1d(&points);
        let pi = |x: &[f64]| (x[0].sin() - 0.01, x[0].sin() + 0.01);
        let grid: Vec<Vec<f64>> = (0..50).map(|i| vec![-2.0 + 4.0 * i as f64 / 49.0]).collect();
        let field = potential_map(&grid, &data, &pi, 0.25);
        for q in &field.q {
            assert!(*q <= 0.02 + 1e-12, "q = {q}");
        }
    }

    #[test]
    fn adding_a_captured_neighbor_never_increases_q() {
        let pi = |x: &[f64]| (x[0] - 1.0, x[0] + 1.0);
        let mut data = dataset_1d(&[(0.05, 0.5)]);
        let before = potential_epistemic(&[0.0], &data, &pi, 0.25);
        data.push(vec![-0.05], -0.3).unwrap();
        let after = potential_epistemic(&[0.0], &data, &pi, 0.25);
        assert!(after <= before, "{after} > {before}");
    }

    #[test]
    fn standardized_space_rescales_neighborhoods() {
        let xs = vec![vec![0.0, 0.0], vec![100.0, 1.0], vec![200.0, 2.0]];
        let space = DistanceSpace::standardizing(&xs);
        let mapped = space.map_all(&xs);
        // Both dimensions carry equal weight after standardization.
        assert_relative_eq!(mapped[0][0], mapped[0][1], epsilon = 1e-12);
        assert_relative_eq!(mapped[2][0], mapped[2][1], epsilon = 1e-12);
    }

    #[test]
    fn ideal_bounds_match_hand_substitution() {
        let problem = Problem::new(ProblemKind::Cos);
        let grid = vec![vec![-2.0]];
        let bounds = ideal_bounds(&problem, &grid);
        let sigma = 2.0 + 2.0 * (-2.4f64).cos();
        assert_relative_eq!(bounds.upper[0], 15.0 + 1.96 * sigma, epsilon = 1e-12);
        assert_relative_eq!(bounds.lower[0], 15.0 - 1.96 * sigma, epsilon = 1e-12);
        assert_relative_eq!(bounds.upper[0] - bounds.lower[0], 3.92 * sigma, epsilon = 1e-12);
    }

    #[test]
    fn zero_noise_collapses_ideal_bounds() {
        let problem = Problem::new(ProblemKind::Cosqr);
        let bounds = ideal_bounds(&problem, &[vec![10.0]]);
        assert_eq!(bounds.lower[0], bounds.upper[0]);
        assert_eq!(bounds.lower[0], problem.underlying(&[10.0]));
    }

    #[test]
    fn pi_delta_of_identical_bounds_is_zero() {
        let b = GridBounds::new(vec![0.0, 1.0], vec![2.0, 3.0]).unwrap();
        assert_eq!(pi_delta(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn pi_delta_of_shifted_bounds_is_twice_the_shift() {
        let a = GridBounds::new(vec![0.0, 1.0], vec![2.0, 3.0]).unwrap();
        let shift = 0.7;
        let b = GridBounds::new(
            a.lower.iter().map(|v| v + shift).collect(),
            a.upper.iter().map(|v| v + shift).collect(),
        )
        .unwrap();
        assert_relative_eq!(pi_delta(&b, &a).unwrap(), 2.0 * shift, epsilon = 1e-12);
        // Symmetric in its arguments.
        assert_relative_eq!(
            pi_delta(&a, &b).unwrap(),
            pi_delta(&b, &a).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn pi_delta_matches_direct_summation() {
        let mut rng = crate::seeds::rng_for(&[43]);
        let n = 20;
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let lower: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..0.0)).collect();
            let upper: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
            GridBounds::new(lower, upper).unwrap()
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let mut direct = 0.0;
        for i in 0..n {
            direct += (a.upper[i] - b.upper[i]).abs() + (a.lower[i] - b.lower[i]).abs();
        }
        direct /= n as f64;
        assert!((pi_delta(&a, &b).unwrap() - direct).abs() <= 1e-12);
    }

    #[test]
    fn pi_delta_rejects_grid_mismatch() {
        let a = GridBounds::new(vec![0.0], vec![1.0]).unwrap();
        let b = GridBounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(pi_delta(&a, &b), Err(Error::Shape { .. })));
    }

    #[test]
    fn auuc_is_the_plain_sum() {
        assert_eq!(auuc(&[1.0, 1.0, 1.0]), 3.0);
        let constant = vec![0.37; 50];
        assert_relative_eq!(auuc(&constant), 50.0 * 0.37, epsilon = 1e-12);
        let curve = LearningCurve::new(vec![2.0, 1.0, 0.5]);
        assert_eq!(curve.auuc, 3.5);
    }
}
