//! Exhaustive network guessing with a sequential accept/reject test.
//!
//! A wrong candidate `V` decodes a message for block `k` correctly with
//! probability `p = |⟨k|V⁻¹U|k⟩|²`, so it survives `n` consecutive checks
//! with probability `pⁿ`. Most candidates are rejected after a message or two.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::Rng;

use super::{AttackOutcome, AttackStatus};
use crate::error::{Error, Result};
use crate::gateset::{apply_network, network_to_matrix_capped, GateLibrary, NetworkKey, MATRIX_QUBIT_CAP};
use crate::protocol::KnownPlaintextOracle;
use crate::qstate::PureState;

/// `L^M`, exactly.
pub fn keyspace_size(library_size: u64, key_len: u32) -> BigUint {
    BigUint::from(library_size).pow(key_len)
}

/// `|⟨k| V⁻¹ U |k⟩|²` for true network `U` and candidate `V`.
pub fn acceptance_probability(
    library: &GateLibrary,
    true_key: &NetworkKey,
    candidate: &NetworkKey,
    k: usize,
) -> Result<f64> {
    if library.num_qubits() > MATRIX_QUBIT_CAP {
        return Err(Error::Resource(format!(
            "acceptance probabilities are evaluated up to {MATRIX_QUBIT_CAP} qubits"
        )));
    }
    let sent = apply_network(&PureState::basis(k, library.num_qubits())?, library, true_key)?;
    let decoded = apply_network(&sent, library, &candidate.inverse(library)?)?;
    Ok(decoded.amplitudes()[k].norm_sqr())
}

/// Whether two networks decode every basis-state message identically, i.e.
/// `B⁻¹A` is diagonal up to phases.
pub fn decode_equivalent(library: &GateLibrary, a: &NetworkKey, b: &NetworkKey) -> Result<bool> {
    for k in 0..1usize << library.num_qubits() {
        if acceptance_probability(library, a, b, k)? < 1.0 - 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestStatus {
    /// No decision yet (traffic or the per-candidate cap ran out).
    Alive,
    Rejected,
    Accepted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateTest {
    pub candidate: NetworkKey,
    pub measurements_used: usize,
    pub status: TestStatus,
}

/// Decodes known-plaintext messages with `candidate` until the first
/// mismatch (reject) or `n_acc` consecutive matches (accept), using at most
/// `max_n` messages.
pub fn sequential_test<O, R>(
    library: &GateLibrary,
    candidate: &NetworkKey,
    oracle: &mut O,
    n_acc: usize,
    max_n: usize,
    rng: &mut R,
) -> Result<CandidateTest>
where
    O: KnownPlaintextOracle + ?Sized,
    R: Rng + ?Sized,
{
    if n_acc == 0 {
        return Err(Error::Domain("n_acc must be at least 1".into()));
    }
    let inverse = candidate.inverse(library)?;
    let mut test = CandidateTest {
        candidate: candidate.clone(),
        measurements_used: 0,
        status: TestStatus::Alive,
    };
    while test.measurements_used < max_n {
        let Some((msg, k)) = oracle.next_pair() else {
            break;
        };
        test.measurements_used += 1;
        let (decoded, _) = msg.evolve(library, &inverse)?.measure_z(rng);
        if decoded != k {
            test.status = TestStatus::Rejected;
            return Ok(test);
        }
        if test.measurements_used == n_acc {
            test.status = TestStatus::Accepted;
            return Ok(test);
        }
    }
    Ok(test)
}

/// Lexicographic enumeration of every length-`M` gate sequence.
pub fn enumerate_keys(library: &GateLibrary, key_len: usize) -> impl Iterator<Item = NetworkKey> + '_ {
    let l = library.len();
    let mut digits = vec![0usize; key_len];
    let mut done = key_len == 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let key = NetworkKey::new(library, digits.clone()).expect("ids below L");
        // Odometer increment, last position fastest.
        done = true;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < l {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(key)
    })
}

#[derive(Debug, Clone)]
pub struct GuessConfig {
    /// Consecutive matches needed to accept a candidate.
    pub n_acc: usize,
    /// Largest `L^M` the attack will enumerate.
    pub enumeration_cap: u64,
}

impl Default for GuessConfig {
    fn default() -> Self {
        Self {
            n_acc: 20,
            enumeration_cap: 1_000_000,
        }
    }
}

pub(crate) fn check_cap(library: &GateLibrary, key_len: usize, cap: u64) -> Result<BigUint> {
    if key_len == 0 {
        return Err(Error::Domain("network length must be at least 1".into()));
    }
    let keyspace = keyspace_size(library.len() as u64, key_len as u32);
    if keyspace > BigUint::from(cap) {
        return Err(Error::Resource(format!(
            "keyspace {}^{} = {keyspace} exceeds the enumeration cap {cap}",
            library.len(),
            key_len
        )));
    }
    Ok(keyspace)
}

/// Tries every length-`M` network in lexicographic order until one passes
/// the sequential test.
pub fn guess_attack<O, R>(
    library: &GateLibrary,
    key_len: usize,
    oracle: &mut O,
    config: &GuessConfig,
    rng: &mut R,
) -> Result<AttackOutcome>
where
    O: KnownPlaintextOracle + ?Sized,
    R: Rng + ?Sized,
{
    let keyspace = check_cap(library, key_len, config.enumeration_cap)?;
    let mut outcome = AttackOutcome {
        status: AttackStatus::KeyspaceExhausted,
        found: None,
        candidates_tried: 0,
        messages_consumed: 0,
        keyspace,
    };
    for candidate in enumerate_keys(library, key_len) {
        outcome.candidates_tried += 1;
        let test = sequential_test(library, &candidate, oracle, config.n_acc, usize::MAX, rng)?;
        outcome.messages_consumed += test.measurements_used as u64;
        match test.status {
            TestStatus::Accepted => {
                outcome.status = AttackStatus::Found;
                outcome.found = Some(candidate);
                return Ok(outcome);
            }
            TestStatus::Alive => {
                outcome.status = AttackStatus::BudgetExhausted;
                return Ok(outcome);
            }
            TestStatus::Rejected => {}
        }
    }
    Ok(outcome)
}

/// Number of distinct unitaries (up to global phase) among all length-`M`
/// networks, by dense evaluation.
pub fn distinct_action_classes(library: &GateLibrary, key_len: usize, cap: u64) -> Result<usize> {
    check_cap(library, key_len, cap)?;
    let mut seen = HashSet::new();
    for key in enumerate_keys(library, key_len) {
        let m = network_to_matrix_capped(library, &key, MATRIX_QUBIT_CAP)?;
        let entries = m.as_slice();
        let lead = entries
            .iter()
            .find(|a| a.norm() > 1e-6)
            .copied()
            .expect("unitary has a nonzero entry");
        let rot = lead.conj() / lead.norm();
        let canonical: Vec<(i64, i64)> = entries
            .iter()
            .map(|a| {
                let v = a * rot;
                ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64)
            })
            .collect();
        seen.insert(canonical);
    }
    Ok(seen.len())
}
