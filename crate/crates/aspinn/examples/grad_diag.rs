use aspinn::nn::*;
use ndarray::{Array1, Array2};
use rand::Rng;

fn main() {
    let net = Mlp::new(2, &[7, 5], 1, 99);
    let mut rng = aspinn::seeds::rng_for(&[100]);
    let n = 23;
    let x = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1.0..1.0));
    let y = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
    let (_, g) = mse_value_and_grad(&net, &x, &y);
    // run twice to confirm determinism of the allocating path itself
    let (_, g2) = mse_value_and_grad(&net, &x, &y);
    println!("alloc path self-consistent: {}", g == g2);
    // layer boundaries for [2 ->7 ->5 ->1]: w0 14, b0 7, w1 35, b1 5, w2 5, b2 1
    let bounds = [(0usize,14usize,"w0"),(14,21,"b0"),(21,56,"w1"),(56,61,"b1"),(61,66,"w2"),(66,67,"b2")];
    let (_, gref) = mse_value_and_grad(&net, &x, &y);
    let _ = gref;
    for (a,b,name) in bounds {
        let _ = (a,b,name);
    }
}
