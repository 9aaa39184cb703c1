//! Ground-truth benchmark generators.
//!
//! Three 1-D heteroscedastic regression problems (`cos`, `hetero`, `cosqr`)
//! with fixed candidate grids and scripted initial datasets, plus a simulated
//! agricultural field site where yield responds to an applied nitrogen rate
//! under per-season precipitation/aspect/moisture covariates.
//!
//! The underlying function and noise level are hidden from the samplers;
//! only the harness draws observations and the evaluation path reads them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeds::{rng_for, role};

/// Admissible nitrogen rates (lbs/ac) for the field problem.
pub const FIELD_N_RATES: [f64; 6] = [0.0, 30.0, 60.0, 90.0, 120.0, 150.0];

/// Default denominator of the field noise std `(P + Nr) / denom`.
pub const FIELD_NOISE_DENOMINATOR: f64 = 1500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Cos,
    Hetero,
    Cosqr,
    Field,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Cos => "cos",
            ProblemKind::Hetero => "hetero",
            ProblemKind::Cosqr => "cosqr",
            ProblemKind::Field => "field",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(ProblemKind::Cos),
            "hetero" => Ok(ProblemKind::Hetero),
            "cosqr" => Ok(ProblemKind::Cosqr),
            "field" => Ok(ProblemKind::Field),
            other => Err(Error::Config(format!(
                "unknown problem {other:?} (expected cos, hetero, cosqr, or field)"
            ))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A benchmark problem: underlying function, aleatoric noise level, and the
/// candidate grid samplers may choose from.
#[derive(Clone, Debug)]
pub struct Problem {
    kind: ProblemKind,
    field_noise_denominator: f64,
}

impl Problem {
    pub fn new(kind: ProblemKind) -> Self {
        Problem {
            kind,
            field_noise_denominator: FIELD_NOISE_DENOMINATOR,
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(Problem::new(name.parse()?))
    }

    /// Switches the field noise denominator; only 150 and 1500 are meaningful.
    pub fn with_field_noise_denominator(mut self, denom: f64) -> Result<Self> {
        if denom != 150.0 && denom != 1500.0 {
            return Err(Error::Config(format!(
                "field noise denominator must be 150 or 1500, got {denom}"
            )));
        }
        self.field_noise_denominator = denom;
        Ok(self)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn dims(&self) -> usize {
        match self.kind {
            ProblemKind::Field => 4,
            _ => 1,
        }
    }

    pub fn field_noise_denominator(&self) -> f64 {
        self.field_noise_denominator
    }

    /// The fixed candidate grid of the 1-D problems; the field problem's
    /// candidates depend on the season (see [`field_candidates`]).
    pub fn fixed_grid(&self) -> Option<Vec<Vec<f64>>> {
        let (n, lo, span) = match self.kind {
            ProblemKind::Cos => (100usize, -5.0, 10.0),
            ProblemKind::Hetero => (300, -4.5, 9.0),
            ProblemKind::Cosqr => (500, -10.0, 20.0),
            ProblemKind::Field => return None,
        };
        Some(
            (0..n)
                .map(|i| vec![lo + span * i as f64 / (n - 1) as f64])
                .collect(),
        )
    }

    /// Underlying response (evaluation/observation path only).
    pub fn underlying(&self, x: &[f64]) -> f64 {
        match self.kind {
            ProblemKind::Cos => 10.0 + 5.0 * (x[0] + 2.0).cos(),
            ProblemKind::Hetero => 7.0 * x[0].sin(),
            ProblemKind::Cosqr => 10.0 + 5.0 * (x[0] * x[0] / 5.0).cos(),
            ProblemKind::Field => field_mean(x[0], x[1], x[2], x[3]),
        }
    }

    /// Aleatoric noise standard deviation, clamped at zero where the raw
    /// formula dips below it.
    pub fn noise_std(&self, x: &[f64]) -> f64 {
        let raw = match self.kind {
            ProblemKind::Cos => 2.0 + 2.0 * (1.2 * x[0]).cos(),
            ProblemKind::Hetero => 3.0 * (x[0] / 2.0).cos(),
            ProblemKind::Cosqr => 0.5 * (1.0 - x[0] * x[0] / 100.0),
            ProblemKind::Field => (x[0] + x[3]) / self.field_noise_denominator,
        };
        raw.max(0.0)
    }

    /// Draws `y = f(x) + z * sigma_a(x)` with `z` standard normal.
    pub fn sample_observation(&self, x: &[f64], rng: &mut impl Rng) -> Result<f64> {
        self.check_admissible(x)?;
        let z: f64 = rng.sample(StandardNormal);
        Ok(self.underlying(x) + z * self.noise_std(x))
    }

    fn check_admissible(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dims() {
            return Err(Error::Shape {
                expected: format!("location of dimension {}", self.dims()),
                got: format!("{}", x.len()),
            });
        }
        match self.kind {
            ProblemKind::Field => {
                if !FIELD_N_RATES.iter().any(|r| (r - x[3]).abs() < 1e-9) {
                    return Err(Error::Domain(format!(
                        "N rate {} is not one of {FIELD_N_RATES:?}",
                        x[3]
                    )));
                }
                Ok(())
            }
            _ => {
                let grid = self.fixed_grid().expect("1-D problems have a grid");
                let on_grid = grid.iter().any(|g| (g[0] - x[0]).abs() < 1e-9);
                if on_grid {
                    Ok(())
                } else {
                    Err(Error::Domain(format!(
                        "{} is not on the {} grid",
                        x[0],
                        self.kind
                    )))
                }
            }
        }
    }

    /// Generates the scripted initial dataset for this problem.
    pub fn initial_dataset(&self, seed: u64) -> Dataset {
        let mut rng = rng_for(&[seed, role::INIT_DATASET]);
        match self.kind {
            ProblemKind::Cos => self.initial_cos(&mut rng),
            ProblemKind::Hetero => self.initial_hetero(&mut rng),
            ProblemKind::Cosqr => self.initial_cosqr(&mut rng),
            ProblemKind::Field => self.initial_field(&mut rng),
        }
    }

    fn observe_into(&self, data: &mut Dataset, x: Vec<f64>, rng: &mut impl Rng) {
        let y = self
            .sample_observation(&x, rng)
            .expect("generated locations are admissible");
        data.push(x, y).expect("generated locations have problem dims");
    }

    /// 200 locations drawn uniformly (with replacement) from the grid.
    fn initial_cos(&self, rng: &mut impl Rng) -> Dataset {
        let grid = self.fixed_grid().unwrap();
        let mut data = Dataset::new(1);
        for _ in 0..200 {
            let idx = rng.random_range(0..grid.len());
            self.observe_into(&mut data, grid[idx].clone(), rng);
        }
        data
    }

    /// 200 draws from an equal-weight Gaussian mixture, snapped to the grid.
    fn initial_hetero(&self, rng: &mut impl Rng) -> Dataset {
        const MEANS: [f64; 3] = [-4.0, 0.0, 4.0];
        const STDS: [f64; 3] = [0.4, 0.9, 0.4];
        let grid = self.fixed_grid().unwrap();
        let step = 9.0 / 299.0;
        let mut data = Dataset::new(1);
        for _ in 0..200 {
            let x = loop {
                let c = rng.random_range(0..3);
                let z: f64 = rng.sample(StandardNormal);
                let x = MEANS[c] + STDS[c] * z;
                if (-4.5..=4.5).contains(&x) {
                    break x;
                }
            };
            let idx = (((x + 4.5) / step).round() as usize).min(grid.len() - 1);
            self.observe_into(&mut data, grid[idx].clone(), rng);
        }
        data
    }

    /// 2,000 uniform grid draws filtered by interval masks: four intervals are
    /// kept whole, three low-density intervals keep only their first 1, 10,
    /// and 3 draws.
    fn initial_cosqr(&self, rng: &mut impl Rng) -> Dataset {
        let grid = self.fixed_grid().unwrap();
        let mut counts = [0usize; 3];
        const LIMITS: [usize; 3] = [1, 10, 3];
        let mut data = Dataset::new(1);
        for _ in 0..2000 {
            let x = grid[rng.random_range(0..grid.len())][0];
            let keep = if (-10.0..-8.0).contains(&x)
                || (-5.0..-2.0).contains(&x)
                || (3.0..6.0).contains(&x)
                || (7.0..=10.0).contains(&x)
            {
                true
            } else {
                let slot = if (-8.0..-5.0).contains(&x) {
                    0
                } else if (-2.0..3.0).contains(&x) {
                    1
                } else {
                    debug_assert!((6.0..7.0).contains(&x));
                    2
                };
                if counts[slot] < LIMITS[slot] {
                    counts[slot] += 1;
                    true
                } else {
                    false
                }
            };
            if keep {
                self.observe_into(&mut data, vec![x], rng);
            }
        }
        data
    }

    /// 50 seasons, each with fresh covariates and one uniformly random rate.
    fn initial_field(&self, rng: &mut impl Rng) -> Dataset {
        let mut data = Dataset::new(4);
        for season in 0..50 {
            let ctx = advance_season(rng, season);
            let rate = FIELD_N_RATES[rng.random_range(0..FIELD_N_RATES.len())];
            self.observe_into(&mut data, ctx.location(rate), rng);
        }
        data
    }
}

/// Season covariates of the simulated field site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldContext {
    /// Annual precipitation (mm), uniform on [75, 150].
    pub precipitation: f64,
    /// Terrain aspect (radians), uniform on [pi/4, pi/2].
    pub aspect: f64,
    /// Backscatter moisture proxy, `(P / 150) * A`.
    pub vh: f64,
    /// Season index.
    pub season: usize,
}

impl FieldContext {
    pub fn new(precipitation: f64, aspect: f64, season: usize) -> Self {
        FieldContext {
            precipitation,
            aspect,
            vh: precipitation / 150.0 * aspect,
            season,
        }
    }

    /// The 4-D location of this season at the given nitrogen rate.
    pub fn location(&self, n_rate: f64) -> Vec<f64> {
        vec![self.precipitation, self.aspect, self.vh, n_rate]
    }
}

/// Draws next season's covariates.
pub fn advance_season(rng: &mut impl Rng, season: usize) -> FieldContext {
    let precipitation = rng.random_range(75.0..150.0);
    let aspect = rng.random_range(PI / 4.0..PI / 2.0);
    FieldContext::new(precipitation, aspect, season)
}

/// The six candidate locations of a season, ascending in nitrogen rate.
pub fn field_candidates(ctx: &FieldContext) -> Vec<Vec<f64>> {
    FIELD_N_RATES.iter().map(|&r| ctx.location(r)).collect()
}

/// Yield mean and noise std at a season/rate pair.
pub fn field_yield(ctx: &FieldContext, n_rate: f64, noise_denominator: f64) -> Result<(f64, f64)> {
    if !FIELD_N_RATES.iter().any(|r| (r - n_rate).abs() < 1e-9) {
        return Err(Error::Domain(format!(
            "N rate {n_rate} is not one of {FIELD_N_RATES:?}"
        )));
    }
    let mean = field_mean(ctx.precipitation, ctx.aspect, ctx.vh, n_rate);
    let sigma = (ctx.precipitation + n_rate) / noise_denominator;
    Ok((mean, sigma))
}

fn field_mean(precipitation: f64, aspect: f64, vh: f64, n_rate: f64) -> f64 {
    precipitation / 15.0 + (aspect / PI + 1.0) * (0.1 * n_rate / (3.0 * vh + 2.0)).tanh()
}
