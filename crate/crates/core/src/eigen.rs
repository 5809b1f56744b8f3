//! Dominant eigenpair of a Hermitian matrix by shifted power iteration.
//!
//! The iteration runs on `ρ + s·I` where `s` lifts the Gershgorin lower bound
//! to zero, so the dominant eigenvalue is the algebraically largest one even
//! when a noisy reconstruction has negative eigenvalues.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, CMatrix, C64};
use crate::qstate::{DensityMatrix, PureState};

/// Power-iteration settings.
#[derive(Debug, Clone)]
pub struct PowerIteration {
    pub max_iterations: usize,
    /// Stop once `|ρv − λv| ≤ tolerance·|λ|`.
    pub tolerance: f64,
    /// Eigenvalue gaps below this are reported as degenerate.
    pub degeneracy_gap: f64,
    /// Seed for the perturbation of the uniform start vector.
    pub seed: u64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-8,
            degeneracy_gap: 1e-6,
            seed: 0x5eed,
        }
    }
}

/// Eigenvalue and normalized, phase-fixed eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: PureState,
    pub iterations: usize,
    pub residual: f64,
    /// Distance to the next eigenvalue (lower estimate of the spectral gap).
    pub gap: f64,
}

struct RawPair {
    value: f64,
    vector: Vec<C64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

impl PowerIteration {
    /// Dominant eigenpair of the Hermitian part of `rho`.
    pub fn run(&self, rho: &DensityMatrix) -> Result<Eigenpair> {
        let m = rho.entries().hermitian_part();
        let first = self.iterate(&m, self.start_vector(m.dim()), true);

        // The second run starts orthogonal to the first eigenvector; starting
        // from the same vector would sit in the deflated null space.
        let deflated = deflate(&m, first.value, &first.vector);
        let mut start = self.random_vector(m.dim());
        let overlap = inner(&first.vector, &start);
        for (s, f) in start.iter_mut().zip(&first.vector) {
            *s -= f * overlap;
        }
        normalize(&mut start);
        let second = self.iterate(&deflated, start, false);
        let gap = first.value - second.value;

        if gap < self.degeneracy_gap {
            return Err(Error::Degenerate { block: None, gap });
        }
        if !first.converged {
            return Err(Error::Convergence {
                iterations: first.iterations,
                residual: first.residual,
            });
        }

        let mut v = first.vector;
        fix_phase(&mut v);
        Ok(Eigenpair {
            value: first.value,
            vector: PureState::normalized(v)?,
            iterations: first.iterations,
            residual: first.residual,
            gap,
        })
    }

    /// Uniform superposition with a small seeded perturbation.
    fn start_vector(&self, n: usize) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let base = 1.0 / (n as f64).sqrt();
        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(base + 1e-3 * rng.random_range(-1.0..1.0), 1e-3 * rng.random_range(-1.0..1.0)))
            .collect();
        normalize(&mut v);
        v
    }

    fn random_vector(&self, n: usize) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(1));
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn iterate(&self, m: &CMatrix, start: Vec<C64>, strict: bool) -> RawPair {
        let cap = self.max_iterations;
        let shift = gershgorin_shift(m);
        let mut v = start;

        let mut value = 0.0;
        let mut residual = f64::INFINITY;
        let mut prev_value = f64::NAN;
        for it in 1..=cap {
            let mv = m.mul_vec(&v).expect("square");
            value = inner(&v, &mv).re;
            residual = vec_norm(
                &mv.iter()
                    .zip(&v)
                    .map(|(a, b)| a - b * value)
                    .collect::<Vec<_>>(),
            );
            if residual <= self.tolerance * value.abs() || residual == 0.0 {
                return RawPair {
                    value,
                    vector: v,
                    iterations: it,
                    residual,
                    converged: true,
                };
            }
            // Without a strict target only the Rayleigh quotient matters.
            if !strict && (value - prev_value).abs() <= 1e-14 * value.abs().max(1.0) {
                return RawPair {
                    value,
                    vector: v,
                    iterations: it,
                    residual,
                    converged: true,
                };
            }
            prev_value = value;
            let mut next: Vec<C64> = mv.iter().zip(&v).map(|(a, b)| a + b * shift).collect();
            if vec_norm(&next) == 0.0 {
                // Zero matrix; every vector is an eigenvector with eigenvalue 0.
                return RawPair {
                    value: 0.0,
                    vector: v,
                    iterations: it,
                    residual: 0.0,
                    converged: true,
                };
            }
            normalize(&mut next);
            v = next;
        }
        RawPair {
            value,
            vector: v,
            iterations: cap,
            residual,
            converged: false,
        }
    }
}

/// Dominant eigenpair with default settings.
pub fn top_eigenvector(rho: &DensityMatrix) -> Result<Eigenpair> {
    PowerIteration::default().run(rho)
}

fn gershgorin_shift(m: &CMatrix) -> f64 {
    let n = m.dim();
    let lower = (0..n)
        .map(|r| {
            let off: f64 = (0..n).filter(|&c| c != r).map(|c| m[(r, c)].norm()).sum();
            m[(r, r)].re - off
        })
        .fold(f64::INFINITY, f64::min);
    (-lower).max(0.0)
}

fn deflate(m: &CMatrix, value: f64, v: &[C64]) -> CMatrix {
    let n = m.dim();
    let mut out = m.clone();
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] -= v[r] * v[c].conj() * value;
        }
    }
    out
}

fn normalize(v: &mut [C64]) {
    let norm = vec_norm(v);
    for a in v.iter_mut() {
        *a /= norm;
    }
}

/// Rotates the global phase so the first component with magnitude above
/// 1e-6 is real and positive.
pub(crate) fn fix_phase(v: &mut [C64]) {
    if let Some(lead) = v.iter().find(|a| a.norm() > 1e-6).copied() {
        let rot = lead.conj() / lead.norm();
        for a in v.iter_mut() {
            *a *= rot;
        }
    }
}
