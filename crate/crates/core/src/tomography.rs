//! Monte-Carlo state tomography from intercepted copies of one state.
//!
//! Every sample measures each spin along an independent uniformly random
//! axis and adds the tensor product of per-spin kernels
//! `K(n, m) = 3 P(n, m) − I`. Averaged over axes and outcomes this kernel
//! returns exactly `ρ`, because `∫ n_i n_j dΩ/4π = δ_ij / 3`; the estimate's
//! relative error then falls like `1/√N` in the number of samples.
//!
//! The reconstructed matrices are left as they come out of the average (they
//! need not be positive). Only their dominant eigenvector is used to rebuild
//! the secret unitary column by column.

use num_bigint::BigUint;
use num_traits::FromPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::top_eigenvector;
use crate::error::{Error, Result};
use crate::linalg::{inner, vec_norm, CMatrix, C64, ONE};
use crate::protocol::{ChannelMessage, MessageSource};
use crate::qstate::{outcome_probability, DensityMatrix, OutcomeRecord, PureState, Spin, SpinDirection};

/// Samples per independent random substream.
const CHUNK: usize = 1024;
/// Chunks pulled from the source before each parallel pass.
const BATCH_CHUNKS: usize = 64;

/// How each direction set is turned into a contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// One message, one outcome, one kernel product.
    SingleShot,
    /// `repeats` messages measured along the same axes; the kernel products
    /// are weighted by the observed outcome frequencies.
    Frequency { repeats: usize },
}

impl Estimator {
    pub fn name(&self) -> &'static str {
        match self {
            Estimator::SingleShot => "single_shot",
            Estimator::Frequency { .. } => "frequency",
        }
    }

    fn messages_per_sample(&self) -> usize {
        match self {
            Estimator::SingleShot => 1,
            Estimator::Frequency { repeats } => *repeats,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TomographyConfig {
    /// Number of direction sets `N`.
    pub samples: usize,
    pub estimator: Estimator,
    pub seed: u64,
}

impl TomographyConfig {
    pub fn single_shot(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            estimator: Estimator::SingleShot,
            seed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    /// The raw Monte-Carlo average.
    pub rho_calc: DensityMatrix,
    /// Relative error against the true state, once known.
    pub alpha: Option<f64>,
    /// Messages consumed.
    pub samples_used: usize,
}

impl ReconstructionResult {
    /// Records the relative error against `truth`.
    pub fn with_truth(mut self, truth: &DensityMatrix) -> Result<Self> {
        self.alpha = Some(relative_error(&self.rho_calc, truth)?);
        Ok(self)
    }
}

/// `3 P(n, m) − I`.
pub fn kernel_single(direction: &SpinDirection, spin: Spin) -> CMatrix {
    direction
        .projector(spin)
        .scale(3.0)
        .sub(&CMatrix::identity(2))
        .expect("2x2")
}

/// `⊗_i K(n_i, m_i)`, qubit 0 as the most significant factor.
pub fn kernel_product(directions: &[SpinDirection], outcomes: &[Spin]) -> CMatrix {
    let mut out = CMatrix::from_vec(1, vec![ONE]).expect("1x1");
    for (dir, &spin) in directions.iter().zip(outcomes) {
        out = out.kron(&kernel_single(dir, spin));
    }
    out
}

fn random_directions(k: usize, rng: &mut ChaCha8Rng) -> Vec<SpinDirection> {
    (0..k).map(|_| SpinDirection::random(rng)).collect()
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn outcomes_of(index: usize, k: usize) -> Vec<Spin> {
    (0..k).map(|q| Spin::from_bit(index >> (k - 1 - q) & 1 == 1)).collect()
}

/// Sum of the contributions of one chunk of samples.
fn chunk_sum(
    k: usize,
    estimator: Estimator,
    messages: Vec<ChannelMessage>,
    rng: &mut ChaCha8Rng,
) -> Result<CMatrix> {
    let dim = 1usize << k;
    let mut acc = CMatrix::zeros(dim);
    match estimator {
        Estimator::SingleShot => {
            for msg in messages {
                let dirs = random_directions(k, rng);
                let (record, _) = msg.measure_spins(&dirs, rng)?;
                acc.add_assign_scaled(&kernel_product(record.directions(), record.outcomes()), 1.0);
            }
        }
        Estimator::Frequency { repeats } => {
            let mut msgs = messages.into_iter();
            loop {
                let group: Vec<_> = msgs.by_ref().take(repeats).collect();
                if group.is_empty() {
                    break;
                }
                let dirs = random_directions(k, rng);
                let mut counts = vec![0usize; dim];
                for msg in group {
                    let (record, _) = msg.measure_spins(&dirs, rng)?;
                    counts[record.outcome_index()] += 1;
                }
                for (idx, &count) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
                    let weight = count as f64 / repeats as f64;
                    acc.add_assign_scaled(&kernel_product(&dirs, &outcomes_of(idx, k)), weight);
                }
            }
        }
    }
    Ok(acc)
}

/// Reconstructs the density matrix of the identical states `source` yields.
///
/// Samples are split into fixed chunks, each with its own random substream,
/// and chunk sums are added in chunk order, so the result depends only on
/// the seed and not on the thread count.
pub fn reconstruct_density<S: MessageSource + ?Sized>(
    source: &mut S,
    config: &TomographyConfig,
) -> Result<ReconstructionResult> {
    if config.samples == 0 {
        return Err(Error::Domain("tomography needs at least one sample".into()));
    }
    if let Estimator::Frequency { repeats: 0 } = config.estimator {
        return Err(Error::Domain("frequency estimator needs at least one repeat".into()));
    }
    let k = source.num_qubits();
    let per_sample = config.estimator.messages_per_sample();
    let num_chunks = config.samples.div_ceil(CHUNK);
    let mut total = CMatrix::zeros(1 << k);
    let mut consumed = 0;

    for batch_start in (0..num_chunks).step_by(BATCH_CHUNKS) {
        let batch_end = (batch_start + BATCH_CHUNKS).min(num_chunks);
        let mut work = Vec::with_capacity(batch_end - batch_start);
        for chunk in batch_start..batch_end {
            let samples = CHUNK.min(config.samples - chunk * CHUNK);
            let mut msgs = Vec::with_capacity(samples * per_sample);
            for _ in 0..samples * per_sample {
                let msg = source
                    .next_message()
                    .ok_or(Error::Budget { consumed })?;
                if msg.num_qubits() != k {
                    return Err(Error::Domain("source yielded a message of the wrong width".into()));
                }
                consumed += 1;
                msgs.push(msg);
            }
            work.push((chunk, msgs));
        }
        let sums = work
            .into_par_iter()
            .map(|(chunk, msgs)| chunk_sum(k, config.estimator, msgs, &mut chunk_rng(config.seed, chunk)))
            .collect::<Result<Vec<_>>>()?;
        for s in &sums {
            total.add_assign_scaled(s, 1.0);
        }
    }

    Ok(ReconstructionResult {
        rho_calc: DensityMatrix::from_matrix(total.scale(1.0 / config.samples as f64))?,
        alpha: None,
        samples_used: consumed,
    })
}

/// Replaces the Monte-Carlo average with a midpoint rule on a
/// `grid × grid` mesh in `(cos θ, φ)` per qubit, using exact outcome
/// probabilities. Cost grows as `grid^(2K)`.
pub fn reconstruct_by_quadrature(state: &PureState, grid: usize) -> Result<DensityMatrix> {
    let k = state.num_qubits();
    if grid == 0 {
        return Err(Error::Domain("quadrature grid must be non-empty".into()));
    }
    let points = grid.checked_pow(2 * k as u32).filter(|&p| p <= 100_000_000);
    let Some(points) = points else {
        return Err(Error::Resource(format!("{grid}^{} quadrature points", 2 * k)));
    };
    let nodes: Vec<SpinDirection> = (0..grid * grid)
        .map(|i| {
            let (iu, ip) = (i / grid, i % grid);
            let u = -1.0 + (iu as f64 + 0.5) * 2.0 / grid as f64;
            let phi = (ip as f64 + 0.5) * std::f64::consts::TAU / grid as f64;
            SpinDirection::new(u.acos(), phi).expect("midpoints lie inside the ranges")
        })
        .collect();
    let dim = 1usize << k;
    let mut acc = CMatrix::zeros(dim);
    let weight = 1.0 / points as f64;
    for flat in 0..points {
        let mut rest = flat;
        let dirs: Vec<SpinDirection> = (0..k)
            .map(|_| {
                let d = nodes[rest % nodes.len()];
                rest /= nodes.len();
                d
            })
            .collect();
        for idx in 0..dim {
            let outcomes = outcomes_of(idx, k);
            let record = OutcomeRecord::new(dirs.clone(), outcomes)?;
            let p = outcome_probability(state, &record)?;
            acc.add_assign_scaled(&kernel_product(&dirs, record.outcomes()), p * weight);
        }
    }
    DensityMatrix::from_matrix(acc)
}

/// `α = |ρ_calc − ρ_true| / |ρ_true|`.
pub fn relative_error(rho_calc: &DensityMatrix, rho_true: &DensityMatrix) -> Result<f64> {
    let norm = rho_true.frobenius_norm();
    if norm == 0.0 {
        return Err(Error::Domain("relative error against a zero matrix".into()));
    }
    Ok(rho_calc.frobenius_distance(rho_true)? / norm)
}

/// Prefactors of the message-count estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateParams {
    /// Prefactor of `Const·α⁻²·2^K`.
    pub constant: f64,
    /// Prefactor of `C·2^(2K)`.
    pub c: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self { constant: 1.0, c: 1.0 }
    }
}

/// Ceiling of a non-negative float as an exact integer. Values within 1e-9
/// (relative) of an integer are snapped to it first so that decimal inputs
/// such as `α = 0.1` do not round up by one.
pub fn ceil_to_biguint(value: f64) -> Result<BigUint> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::Domain(format!("cannot represent {value} as a message count")));
    }
    let nearest = value.round();
    let snapped = if (value - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        value.ceil()
    };
    BigUint::from_f64(snapped).ok_or_else(|| Error::Domain(format!("cannot represent {value}")))
}

/// `ceil(Const · α⁻² · 2^K)` intercepted messages for precision `α`.
pub fn required_messages(alpha: f64, num_qubits: u32, params: &EstimateParams) -> Result<BigUint> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("target precision {alpha} outside (0, 1]")));
    }
    if !(params.constant > 0.0) {
        return Err(Error::Domain("Const must be positive".into()));
    }
    let per_state = params.constant * (1.0 / alpha).powi(2);
    ceil_to_biguint(per_state * 2f64.powi(num_qubits as i32))
}

/// Classical work for turning `2^K` reconstructions into the unitary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalCosts {
    /// `2^(3K)`: one `2^(2K)` eigenvector search per state.
    pub operations: BigUint,
    /// `2^(2K)` complex numbers held in memory.
    pub data: BigUint,
    /// About `2^(2K)` elementary gates to rebuild the network.
    pub gates: BigUint,
}

pub fn classical_cost_estimates(num_qubits: u32) -> ClassicalCosts {
    let two = BigUint::from(2u32);
    ClassicalCosts {
        operations: two.pow(3 * num_qubits),
        data: two.pow(2 * num_qubits),
        gates: two.pow(2 * num_qubits),
    }
}

/// Unitary rebuilt from per-block reconstructions.
#[derive(Debug, Clone)]
pub struct AssembledUnitary {
    /// Column `k` is the dominant eigenvector of `ρ_k` (phase-fixed).
    pub matrix: CMatrix,
    /// `|U†U − I|_F`.
    pub unitarity_defect: f64,
    pub eigenvalues: Vec<f64>,
}

impl AssembledUnitary {
    /// Per-column fidelity `|⟨truth_k|col_k⟩|²`, blind to column phases.
    pub fn column_fidelities(&self, truth: &CMatrix) -> Result<Vec<f64>> {
        if truth.dim() != self.matrix.dim() {
            return Err(Error::Domain("dimension mismatch".into()));
        }
        Ok((0..truth.dim())
            .map(|k| inner(&truth.column(k), &self.matrix.column(k)).norm_sqr())
            .collect())
    }

    /// Closest-in-order orthonormalization of the columns (modified
    /// Gram–Schmidt), usable as a decoding unitary.
    pub fn orthonormalized(&self) -> Result<CMatrix> {
        let dim = self.matrix.dim();
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut v = self.matrix.column(k);
            for q in &cols {
                let proj = inner(q, &v);
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= b * proj;
                }
            }
            let norm = vec_norm(&v);
            if norm < 1e-6 {
                return Err(Error::Degenerate {
                    block: Some(k),
                    gap: norm,
                });
            }
            v.iter_mut().for_each(|a| *a /= norm);
            cols.push(v);
        }
        CMatrix::from_columns(&cols)
    }
}

/// Stacks the dominant eigenvectors of the `2^K` reconstructions.
pub fn assemble_unitary(results: &[ReconstructionResult]) -> Result<AssembledUnitary> {
    let dim = results.len();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Domain(format!("need 2^K reconstructions, got {dim}")));
    }
    let mut columns = Vec::with_capacity(dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    for (k, r) in results.iter().enumerate() {
        if r.rho_calc.dim() != dim {
            return Err(Error::Domain(format!(
                "reconstruction {k} is {0}x{0}, expected {dim}x{dim}",
                r.rho_calc.dim()
            )));
        }
        let pair = top_eigenvector(&r.rho_calc.symmetrized()).map_err(|e| match e {
            Error::Degenerate { gap, .. } => Error::Degenerate { block: Some(k), gap },
            other => other,
        })?;
        eigenvalues.push(pair.value);
        columns.push(pair.vector.amplitudes().to_vec());
    }
    let matrix = CMatrix::from_columns(&columns)?;
    Ok(AssembledUnitary {
        unitarity_defect: matrix.unitarity_defect(),
        matrix,
        eigenvalues,
    })
}

/// Eve's decoder built from a stolen unitary: applies its adjoint and
/// measures along Z.
#[derive(Debug, Clone)]
pub struct StolenDecoder {
    adjoint: CMatrix,
}

impl StolenDecoder {
    pub fn new(assembled: &AssembledUnitary) -> Result<Self> {
        Ok(Self {
            adjoint: assembled.orthonormalized()?.adjoint(),
        })
    }

    pub fn decode<R: rand::Rng + ?Sized>(&self, msg: ChannelMessage, rng: &mut R) -> Result<usize> {
        Ok(msg.evolve_unitary(&self.adjoint)?.measure_z(rng).0)
    }
}
