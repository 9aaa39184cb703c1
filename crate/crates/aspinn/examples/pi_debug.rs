use aspinn::dataset::Dataset;
use aspinn::nn::*;
use ndarray::{Array1, Array2};

fn main() {
    let n = 150;
    let xs: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x[0]).collect();
    let data = Dataset::from_pairs(xs.clone(), ys.clone()).unwrap();

    let cfg = TrainConfig { seed: 4, ..TrainConfig::default() };
    let reg = RegModel::init(1, &[32, 32], 4).unwrap();
    let reg = train_regression(reg, &data, &cfg).unwrap();
    println!("reg mse: {:.6}", reg.normalized_mse(data.xs(), data.ys()).unwrap());

    // replicate the pi training loop with instrumentation
    let norm = reg.normalization().unwrap().clone();
    let xn: Vec<f64> = xs.iter().map(|x| norm.x_to_normalized(x)[0]).collect();
    let yn: Vec<f64> = ys.iter().map(|y| norm.y_to_normalized(*y)).collect();
    let x = Array2::from_shape_vec((n, 1), xn).unwrap();
    let y = Array1::from_vec(yn);

    let pi = PiModel::init(1, &[32, 32], 5, true).unwrap();
    let mut net = pi.network().clone();
    let mut params = net.flat_params();
    let mut lambda: f64 = std::env::args().nth(1).and_then(|v| v.parse().ok()).unwrap_or(1.0);
    let lcfg = IntervalLossConfig::default();
    // manual adam
    let mut m = vec![0.0; params.len()];
    let mut v = vec![0.0; params.len()];
    for epoch in 0..2000 {
        net.set_flat_params(&params);
        let (loss, grad) = interval_value_and_grad(&net, &x, &y, lambda, &lcfg);
        // recompute stats for printing
        let out = {
            let mut o = Vec::new();
            for i in 0..n { o.push(net.forward(&[x[[i,0]]]).unwrap()); }
            o
        };
        let mut cap = 0; let mut wsum = 0.0;
        for (o, yy) in out.iter().zip(y.iter()) {
            if o[0] <= *yy && *yy <= o[1] { cap += 1; }
            wsum += o[1] - o[0];
        }
        let picp = cap as f64 / n as f64;
        if epoch % 200 == 0 {
            println!("epoch {epoch:5} loss {loss:9.4} picp {picp:.3} lambda {lambda:9.3} meanwidth {:.3}", wsum / n as f64);
        }
        for i in 0..params.len() {
            m[i] = 0.9 * m[i] + 0.1 * grad[i];
            v[i] = 0.999 * v[i] + 0.001 * grad[i] * grad[i];
            let mh = m[i] / (1.0 - 0.9f64.powi(epoch as i32 + 1));
            let vh = v[i] / (1.0 - 0.999f64.powi(epoch as i32 + 1));
            params[i] -= 1e-3 * mh / (vh.sqrt() + 1e-8);
        }
        lambda = (lambda * (1.0 + 0.1 * (0.95 - picp))).clamp(1e-3, 1e4);
    }
}
