#![allow(dead_code)]

use qucipher::{CMatrix, PureState, C64};
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-ish random unitary: Gram–Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for c in &cols {
            let dot: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= y * dot;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|a| a / norm).collect());
    }
    CMatrix::from_columns(&cols).unwrap()
}

/// Plain `Σ_c m[r][c] v[c]`.
pub fn matvec(m: &CMatrix, v: &[C64]) -> Vec<C64> {
    let n = m.dim();
    (0..n).map(|r| (0..n).map(|c| m[(r, c)] * v[c]).sum()).collect()
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn state_from_seed(k: usize, seed: u64) -> PureState {
    use rand::SeedableRng;
    PureState::random(k, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// Standard error of a Bernoulli frequency.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
