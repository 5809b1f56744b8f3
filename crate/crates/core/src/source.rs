//! Plaintext blocks and the sources that produce them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attacks::correlation::Correlator;
use crate::error::{Error, Result};
use crate::qstate::{sample_index, MAX_QUBITS};

/// `K` classical bits, bit 0 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlaintextBlock {
    value: usize,
    num_qubits: usize,
}

impl PlaintextBlock {
    pub fn new(value: usize, num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS || value >= 1 << num_qubits {
            return Err(Error::Domain(format!(
                "block value {value} does not fit in {num_qubits} bits"
            )));
        }
        Ok(Self { value, num_qubits })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let value = bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b));
        Self::new(value, bits.len())
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.num_qubits)
            .map(|i| self.value >> (self.num_qubits - 1 - i) & 1 == 1)
            .collect()
    }

    /// Splits a bit string into `K`-bit blocks, zero-padding the last one.
    pub fn chunk(bits: &[bool], num_qubits: usize) -> Result<Vec<Self>> {
        bits.chunks(num_qubits.max(1))
            .map(|chunk| {
                let mut padded = chunk.to_vec();
                padded.resize(num_qubits, false);
                Self::from_bits(&padded)
            })
            .collect()
    }
}

/// Row-stochastic transition matrix over block values.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    dim: usize,
    rows: Vec<f64>,
}

impl TransitionMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Validation("empty transition matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Validation(format!("row {i} has length {}, expected {dim}", row.len())));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(Error::Validation(format!("row {i} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("row {i} sums to {sum}")));
            }
        }
        Ok(Self {
            dim,
            rows: rows.into_iter().flatten().collect(),
        })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::new(vec![vec![1.0 / dim as f64; dim]; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.rows[from * self.dim + to]
    }

    fn row(&self, from: usize) -> &[f64] {
        &self.rows[from * self.dim..(from + 1) * self.dim]
    }

    fn left_mul(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (o, &t) in out.iter_mut().zip(self.row(i)) {
                *o += p * t;
            }
        }
        out
    }

    /// Stationary distribution reached from the uniform start.
    ///
    /// Iterates the lazy chain `(T + I) / 2`, which has the same stationary
    /// distributions as `T` and is aperiodic, so periodic chains converge too.
    /// Reducible chains return the limit of the uniform start.
    pub fn stationary(&self) -> Vec<f64> {
        let mut dist = vec![1.0 / self.dim as f64; self.dim];
        for _ in 0..1_000_000 {
            let stepped = self.left_mul(&dist);
            let next: Vec<f64> = stepped.iter().zip(&dist).map(|(a, b)| 0.5 * (a + b)).collect();
            let delta: f64 = next.iter().zip(&dist).map(|(a, b)| (a - b).abs()).sum();
            dist = next;
            if delta < 1e-15 {
                break;
            }
        }
        let total: f64 = dist.iter().sum();
        dist.iter().map(|p| p / total).collect()
    }

    /// Exact `ξ_kl(y) = π_k (T^y)_kl` for a chain started in `π`.
    pub fn exact_correlator(&self, lag: usize) -> Correlator {
        let pi = self.stationary();
        let mut entries = vec![0.0; self.dim * self.dim];
        for (k, &pk) in pi.iter().enumerate() {
            let mut row = vec![0.0; self.dim];
            row[k] = 1.0;
            for _ in 0..lag {
                row = self.left_mul(&row);
            }
            for (l, &p) in row.iter().enumerate() {
                entries[k * self.dim + l] = pk * p;
            }
        }
        Correlator::from_entries(lag, self.dim, entries).expect("square table")
    }
}

#[derive(Debug, Clone)]
pub enum SourceKind {
    /// Independent uniform blocks.
    Uniform,
    /// Markov chain started in its stationary distribution.
    Markov(TransitionMatrix),
    /// A fixed sequence, repeated.
    Fixed(Vec<usize>),
}

/// Infinite, seeded stream of block values.
#[derive(Debug, Clone)]
pub struct PlaintextSource {
    num_qubits: usize,
    kind: SourceKind,
    rng: ChaCha8Rng,
    current: Option<usize>,
    position: usize,
}

impl PlaintextSource {
    pub fn uniform(num_qubits: usize, seed: u64) -> Result<Self> {
        Self::with_kind(num_qubits, SourceKind::Uniform, seed)
    }

    pub fn markov(num_qubits: usize, transitions: TransitionMatrix, seed: u64) -> Result<Self> {
        Self::with_kind(num_qubits, SourceKind::Markov(transitions), seed)
    }

    pub fn fixed(num_qubits: usize, sequence: Vec<usize>) -> Result<Self> {
        Self::with_kind(num_qubits, SourceKind::Fixed(sequence), 0)
    }

    pub fn with_kind(num_qubits: usize, kind: SourceKind, seed: u64) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Domain(format!("unsupported register size {num_qubits}")));
        }
        let dim = 1usize << num_qubits;
        match &kind {
            SourceKind::Uniform => {}
            SourceKind::Markov(t) if t.dim() != dim => {
                return Err(Error::Validation(format!(
                    "transition matrix is {0}x{0}, expected {dim}x{dim}",
                    t.dim()
                )))
            }
            SourceKind::Markov(_) => {}
            SourceKind::Fixed(seq) => {
                if seq.is_empty() {
                    return Err(Error::Domain("fixed plaintext sequence is empty".into()));
                }
                if let Some(bad) = seq.iter().find(|&&k| k >= dim) {
                    return Err(Error::Domain(format!("block value {bad} does not fit in {num_qubits} bits")));
                }
            }
        }
        Ok(Self {
            num_qubits,
            kind,
            rng: ChaCha8Rng::seed_from_u64(seed),
            current: None,
            position: 0,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    pub fn next_block(&mut self) -> usize {
        let dim = 1usize << self.num_qubits;
        let value = match &self.kind {
            SourceKind::Uniform => self.rng.random_range(0..dim),
            SourceKind::Markov(t) => match self.current {
                None => sample_index(t.stationary(), &mut self.rng),
                Some(prev) => sample_index(t.row(prev).iter().copied(), &mut self.rng),
            },
            SourceKind::Fixed(seq) => seq[self.position % seq.len()],
        };
        self.current = Some(value);
        self.position += 1;
        value
    }

    pub fn take_blocks(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.next_block()).collect()
    }
}

impl Iterator for PlaintextSource {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        Some(self.next_block())
    }
}

/// Markov plaintext source; see [`PlaintextSource::markov`].
pub fn markov_source(num_qubits: usize, transitions: TransitionMatrix, seed: u64) -> Result<PlaintextSource> {
    PlaintextSource::markov(num_qubits, transitions, seed)
}
