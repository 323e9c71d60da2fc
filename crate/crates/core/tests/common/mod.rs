#![allow(dead_code)]

use labelqm::{Observable, QuantumState, C64};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_ish(g: &mut ChaCha8Rng) -> f64 {
    // sum of uniforms; shape does not matter, only genericity
    (0..4).map(|_| g.random::<f64>() - 0.5).sum()
}

pub fn random_vector(g: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| C64::new(gaussian_ish(g), gaussian_ish(g))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_state(g: &mut ChaCha8Rng, n: usize) -> QuantumState {
    QuantumState::new(random_vector(g, n)).unwrap()
}

pub fn random_hermitian(g: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |_, _| C64::new(gaussian_ish(g), gaussian_ish(g)));
    (&m + m.adjoint()).scale(0.5)
}

pub fn random_observable(g: &mut ChaCha8Rng, n: usize) -> Observable {
    Observable::from_matrix(random_hermitian(g, n)).unwrap()
}

/// `<u|v>` summed by hand.
pub fn inner(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Born rule evaluated component by component.
pub fn born_oracle(state: &QuantumState, obs: &Observable) -> Vec<f64> {
    (0..obs.dim()).map(|k| inner(&obs.eigenvector(k), state.amplitudes()).norm_sqr()).collect()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
