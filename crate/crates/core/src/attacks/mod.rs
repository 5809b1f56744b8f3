//! Eavesdropping attacks that try to recover the secret network.
//!
//! [`guess`] enumerates networks and rejects each with a sequential test on
//! known-plaintext traffic. [`correlation`] needs no plaintexts, only the
//! block statistics of the source, and pays for every candidate with
//! intercepted messages that its measurements destroy.

pub mod correlation;
pub mod guess;

use num_bigint::BigUint;

use crate::gateset::NetworkKey;

pub use correlation::{
    calibrate_tau, correlation_attack, correlation_statistic, correlation_test, empirical_correlator,
    CorrelationConfig, CorrelationOutcome, CorrelationTest, Correlator,
};
pub use guess::{
    acceptance_probability, decode_equivalent, distinct_action_classes, enumerate_keys, guess_attack,
    keyspace_size, sequential_test, CandidateTest, GuessConfig, TestStatus,
};

/// How an enumeration attack ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackStatus {
    Found,
    /// Every candidate was tried and none was accepted.
    KeyspaceExhausted,
    /// The intercepted traffic ran out first.
    BudgetExhausted,
    /// Several candidates that decode differently were all accepted.
    Ambiguous,
}

/// Totals of an enumeration attack.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    pub status: AttackStatus,
    pub found: Option<NetworkKey>,
    pub candidates_tried: u64,
    pub messages_consumed: u64,
    /// `L^M`.
    pub keyspace: BigUint,
}

impl AttackOutcome {
    pub fn is_found(&self) -> bool {
        self.status == AttackStatus::Found
    }
}
