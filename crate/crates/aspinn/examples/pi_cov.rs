use aspinn::dataset::Dataset;
use aspinn::nn::*;
use aspinn::problems::{Problem, ProblemKind};
use aspinn::seeds::rng_for;
use rand::Rng;
use std::time::Instant;

fn main() {
    let epochs: usize = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(2000);
    let n: usize = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(500);
    let problem = Problem::new(ProblemKind::Cos);
    let grid = problem.fixed_grid().unwrap();
    for seed in 0..10u64 {
        let t0 = Instant::now();
        let mut rng = rng_for(&[seed, 99]);
        let mut data = Dataset::new(1);
        for _ in 0..n {
            let x = grid[rng.random_range(0..grid.len())].clone();
            let y = problem.sample_observation(&x, &mut rng).unwrap();
            data.push(x, y).unwrap();
        }
        let cfg = TrainConfig { epochs, seed, ..TrainConfig::default() };
        let reg = RegModel::init(1, &[100, 100], seed * 2 + 1).unwrap();
        let reg = train_regression(reg, &data, &cfg).unwrap();
        let pi = PiModel::init(1, &[100, 100], seed * 2 + 2, true).unwrap();
        let pi = train_pi_network(pi, &data, &reg, &cfg).unwrap();
        let cov = pi.training_coverage().unwrap();
        let mw = pi.mean_width(&grid).unwrap();
        // ideal mean width = 3.92 * mean sigma
        let ideal: f64 = grid.iter().map(|x| 3.92 * problem.noise_std(x)).sum::<f64>() / grid.len() as f64;
        println!(
            "seed {seed}: coverage {cov:.3} warn {} meanwidth {mw:.2} (ideal {ideal:.2})  [{:.1}s]",
            pi.coverage_warning(),
            t0.elapsed().as_secs_f64()
        );
    }
}
