//! Weight initializers: uniform fan-in scaling for affine/conv weights,
//! orthogonal blocks for recurrent weights, zero biases.

use crate::scalar::Scalar;
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform_fan_in<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<T> {
    let bound = (1.0 / rows as f64).sqrt();
    Array2::from_shape_fn((rows, cols), |_| T::from_f64(rng.gen_range(-bound..bound)))
}

pub fn zeros<T: Scalar>(rows: usize, cols: usize) -> Array2<T> {
    Array2::zeros((rows, cols))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u1 bounded away from zero
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Square orthogonal matrix via modified Gram-Schmidt on a Gaussian draw.
fn orthogonal_square(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let mut m = Array2::from_shape_fn((n, n), |_| gaussian(rng));
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| m[(i, j)] * m[(i, k)]).sum();
            for i in 0..n {
                let v = m[(i, k)];
                m[(i, j)] -= dot * v;
            }
        }
        let norm: f64 = (0..n).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for i in 0..n {
                m[(i, j)] /= norm;
            }
        } else {
            m[(j, j)] = 1.0;
        }
    }
    m
}

/// Recurrent weight of shape hidden x (gates*hidden): one orthogonal block
/// per gate.
pub fn orthogonal_gates<T: Scalar>(rng: &mut ChaCha8Rng, hidden: usize, gates: usize) -> Array2<T> {
    let mut out = Array2::zeros((hidden, gates * hidden));
    for g in 0..gates {
        let block = orthogonal_square(rng, hidden);
        for i in 0..hidden {
            for j in 0..hidden {
                out[(i, g * hidden + j)] = T::from_f64(block[(i, j)]);
            }
        }
    }
    out
}
