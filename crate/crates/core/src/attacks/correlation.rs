//! Candidate testing against known block correlations of the source.
//!
//! Each candidate decodes a fresh window of intercepted messages; the
//! decoded sequence's lagged pair frequencies are compared with the known
//! correlators. Decoding measures the messages, so every window is spent.

use num_bigint::BigUint;
use rand::Rng;

use super::guess::{check_cap, decode_equivalent, enumerate_keys};
use super::AttackStatus;
use crate::error::{Error, Result};
use crate::gateset::{GateLibrary, NetworkKey};
use crate::protocol::MessageSource;

/// Joint frequency table `ξ_kl(y)` of blocks `k` then `l` at distance `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlator {
    lag: usize,
    dim: usize,
    entries: Vec<f64>,
}

impl Correlator {
    pub fn from_entries(lag: usize, dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Validation(format!(
                "correlator needs {dim}x{dim} entries, got {}",
                entries.len()
            )));
        }
        Ok(Self { lag, dim, entries })
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.dim + l]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn frobenius_distance(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Validation("correlator dimensions differ".into()));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt())
    }
}

/// Pair frequencies of `sequence` at distance `lag`, normalized over the
/// `len - lag` available pairs.
pub fn empirical_correlator(sequence: &[usize], dim: usize, lag: usize) -> Result<Correlator> {
    if sequence.len() <= lag {
        return Err(Error::Domain(format!(
            "sequence of length {} has no pairs at lag {lag}",
            sequence.len()
        )));
    }
    if let Some(bad) = sequence.iter().find(|&&k| k >= dim) {
        return Err(Error::Domain(format!("block value {bad} outside 0..{dim}")));
    }
    let pairs = sequence.len() - lag;
    let mut entries = vec![0.0; dim * dim];
    for t in 0..pairs {
        entries[sequence[t] * dim + sequence[t + lag]] += 1.0;
    }
    for e in &mut entries {
        *e /= pairs as f64;
    }
    Correlator::from_entries(lag, dim, entries)
}

/// `Σ_y ‖ξ̂(y) − ξ(y)‖_F` over the known correlators.
pub fn correlation_statistic(decoded: &[usize], known: &[Correlator]) -> Result<f64> {
    if known.is_empty() {
        return Err(Error::Domain("no reference correlators given".into()));
    }
    known.iter().try_fold(0.0, |acc, xi| {
        let hat = empirical_correlator(decoded, xi.dim(), xi.lag())?;
        Ok(acc + hat.frobenius_distance(xi)?)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTest {
    pub candidate: NetworkKey,
    pub statistic: f64,
    pub accepted: bool,
    pub messages_used: usize,
}

/// Decodes `window` intercepted messages with `candidate` and accepts when
/// the correlation statistic is at most `tau`.
///
/// Fails with [`Error::Budget`] if the stream runs dry mid-window.
pub fn correlation_test<S, R>(
    library: &GateLibrary,
    candidate: &NetworkKey,
    stream: &mut S,
    known: &[Correlator],
    window: usize,
    tau: f64,
    rng: &mut R,
) -> Result<CorrelationTest>
where
    S: MessageSource + ?Sized,
    R: Rng + ?Sized,
{
    let max_lag = known.iter().map(Correlator::lag).max().unwrap_or(0);
    if window <= max_lag {
        return Err(Error::Domain(format!("window {window} must exceed the largest lag {max_lag}")));
    }
    let inverse = candidate.inverse(library)?;
    let mut decoded = Vec::with_capacity(window);
    for used in 0..window {
        let Some(msg) = stream.next_message() else {
            return Err(Error::Budget { consumed: used });
        };
        decoded.push(msg.evolve(library, &inverse)?.measure_z(rng).0);
    }
    let statistic = correlation_statistic(&decoded, known)?;
    Ok(CorrelationTest {
        candidate: candidate.clone(),
        statistic,
        accepted: statistic <= tau,
        messages_used: window,
    })
}

/// Nearest-rank `q`-quantile of `statistics`.
pub fn calibrate_tau(statistics: &[f64], q: f64) -> Result<f64> {
    if statistics.is_empty() || !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain("calibration needs samples and a quantile in [0, 1]".into()));
    }
    let mut sorted = statistics.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Ok(sorted[rank - 1])
}

#[derive(Debug, Clone)]
pub struct CorrelationConfig {
    /// Messages decoded per candidate.
    pub window: usize,
    /// Acceptance threshold on the statistic.
    pub tau: f64,
    /// Largest `L^M` the attack will enumerate.
    pub enumeration_cap: u64,
    /// Stop at the first accepted candidate instead of scanning the keyspace
    /// for rivals.
    pub stop_at_first: bool,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self {
            window: 2000,
            tau: 0.05,
            enumeration_cap: 1_000_000,
            stop_at_first: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorrelationOutcome {
    pub status: AttackStatus,
    /// Representative of the single accepted class, if unique.
    pub found: Option<NetworkKey>,
    pub accepted: Vec<NetworkKey>,
    /// Accepted candidates grouped by how they decode.
    pub classes: usize,
    pub candidates_tried: u64,
    pub messages_consumed: u64,
    pub keyspace: BigUint,
}

impl CorrelationOutcome {
    pub fn is_ambiguous(&self) -> bool {
        self.status == AttackStatus::Ambiguous
    }
}

/// Enumerates length-`M` networks and keeps those whose decoded window
/// matches the known correlations. More than one decode-distinct survivor
/// is reported as ambiguity rather than a key.
pub fn correlation_attack<S, R>(
    library: &GateLibrary,
    key_len: usize,
    stream: &mut S,
    known: &[Correlator],
    config: &CorrelationConfig,
    rng: &mut R,
) -> Result<CorrelationOutcome>
where
    S: MessageSource + ?Sized,
    R: Rng + ?Sized,
{
    let keyspace = check_cap(library, key_len, config.enumeration_cap)?;
    let mut out = CorrelationOutcome {
        status: AttackStatus::KeyspaceExhausted,
        found: None,
        accepted: Vec::new(),
        classes: 0,
        candidates_tried: 0,
        messages_consumed: 0,
        keyspace,
    };
    let mut representatives: Vec<NetworkKey> = Vec::new();
    for candidate in enumerate_keys(library, key_len) {
        out.candidates_tried += 1;
        let test = match correlation_test(library, &candidate, stream, known, config.window, config.tau, rng) {
            Ok(t) => t,
            Err(Error::Budget { consumed }) => {
                out.messages_consumed += consumed as u64;
                out.status = AttackStatus::BudgetExhausted;
                break;
            }
            Err(e) => return Err(e),
        };
        out.messages_consumed += test.messages_used as u64;
        if !test.accepted {
            continue;
        }
        let mut new_class = true;
        for rep in &representatives {
            if decode_equivalent(library, rep, &candidate)? {
                new_class = false;
                break;
            }
        }
        if new_class {
            representatives.push(candidate.clone());
        }
        out.accepted.push(candidate);
        if config.stop_at_first {
            break;
        }
    }
    out.classes = representatives.len();
    if out.status == AttackStatus::BudgetExhausted {
        return Ok(out);
    }
    match representatives.len() {
        0 => {}
        1 => {
            out.status = AttackStatus::Found;
            out.found = representatives.pop();
        }
        _ => out.status = AttackStatus::Ambiguous,
    }
    Ok(out)
}
