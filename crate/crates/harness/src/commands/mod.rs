//! One module per CLI verb. Each has a typed config read from [`Settings`],
//! a `run` function returning a serializable report, and an `execute`
//! function that renders it.

pub mod attack;
pub mod detect;
pub mod estimate;
pub mod keygen;
pub mod roundtrip;
pub mod tomo;

use std::path::Path;

use qucipher::{read_key_file, GateLibrary, NetworkKey, TransitionMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, Result};
use crate::settings::Settings;

/// Rendered output of a command plus an optional acceptance violation.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub violation: Option<String>,
}

impl Outcome {
    pub fn ok(text: String) -> Self {
        Self { text, violation: None }
    }
}

/// `L` of the default library: seven single-qubit gates per qubit plus a
/// CNOT for every ordered pair.
pub fn default_library_size(k: u64) -> u64 {
    7 * k + k * k.saturating_sub(1)
}

/// Default network length `2K²`.
pub fn default_gates(k: u64) -> u64 {
    2 * k * k
}

/// Independent substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derived seed for unit `index` of an experiment, for APIs taking a `u64`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    substream(seed, index.wrapping_add(1 << 32)).random()
}

pub(crate) fn qubits(settings: &Settings, default: usize, cap: usize) -> Result<usize> {
    let k: usize = settings.get_or("qubits", default)?;
    if k == 0 {
        return Err(HarnessError::Usage("qubits must be at least 1".into()));
    }
    if k > cap {
        return Err(HarnessError::Resource(format!(
            "this command is limited to {cap} qubits, got {k}"
        )));
    }
    Ok(k)
}

/// The default library for `k`, cut to `library-size` gates when given.
pub(crate) fn library(settings: &Settings, k: usize) -> Result<GateLibrary> {
    let full = GateLibrary::default_for(k)?;
    match settings.get::<usize>("library-size")? {
        None => Ok(full),
        Some(l) if l == full.len() => Ok(full),
        Some(l) => full.truncated(l).map_err(|e| {
            HarnessError::Usage(format!(
                "library-size {l}: {e} (the default library for K={k} has {} gates)",
                full.len()
            ))
        }),
    }
}

/// Key from `key-file`, or a random one of length `len` from `rng`.
pub(crate) fn session_key(
    settings: &Settings,
    library: &GateLibrary,
    len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<NetworkKey> {
    match settings.raw("key-file") {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path)).map_err(|source| HarnessError::Io {
                path: path.to_string(),
                source,
            })?;
            Ok(read_key_file(library, &text)?)
        }
        None => {
            if len == 0 {
                return Err(HarnessError::Usage("gates must be at least 1".into()));
            }
            Ok(NetworkKey::random(library, len, rng)?)
        }
    }
}

/// Source statistics for correlation experiments: a fixed asymmetric chain
/// at `K = 2`, a seeded random one otherwise.
pub fn markov_chain(k: usize, seed: u64) -> Result<TransitionMatrix> {
    if k == 2 {
        return Ok(TransitionMatrix::new(vec![
            vec![0.70, 0.20, 0.05, 0.05],
            vec![0.10, 0.60, 0.20, 0.10],
            vec![0.05, 0.15, 0.30, 0.50],
            vec![0.30, 0.10, 0.10, 0.50],
        ])?);
    }
    let dim = 1usize << k;
    let mut rng = substream(seed, 0x4d41_524b);
    let rows = (0..dim)
        .map(|_| {
            let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>().powi(3) + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let mut row: Vec<f64> = raw.iter().map(|x| x / total).collect();
            // Put the rounding remainder on the last entry so rows sum to one.
            let head: f64 = row[..dim - 1].iter().sum();
            row[dim - 1] = 1.0 - head;
            row
        })
        .collect();
    Ok(TransitionMatrix::new(rows)?)
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
