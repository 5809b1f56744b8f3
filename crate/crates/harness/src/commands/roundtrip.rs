//! Encode and decode every block under many random keys.

use qucipher::{alice_encode, bob_decode, NetworkKey, SessionConfig};
use rayon::prelude::*;
use serde::Serialize;

use super::{default_gates, library, qubits, substream, Outcome};
use crate::error::Result;
use crate::output::render_json;
use crate::settings::Settings;

pub const MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripConfig {
    pub qubits: usize,
    pub gates: usize,
    pub library_size: usize,
    pub keys: usize,
    pub seed: u64,
    /// Bob decodes with a key whose first gate was swapped.
    pub corrupt: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    #[serde(rename = "K")]
    pub k: usize,
    pub keys: usize,
    pub blocks_checked: usize,
    pub failures: usize,
    /// Indices of keys with at least one failure (first 20).
    pub failing_keys: Vec<usize>,
    pub seed: u64,
}

impl RoundtripConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 4, MAX_QUBITS)?;
        Ok(Self {
            qubits: k,
            gates: s.get_or("gates", default_gates(k as u64) as usize)?,
            library_size: library(s, k)?.len(),
            keys: s.get_or("keys", 100)?,
            seed: s.get_or("seed", 1)?,
            corrupt: s.flag("corrupt")?,
        })
    }
}

/// Bob's copy with the first gate replaced by a Hadamard (or by X when it
/// already was one).
fn corrupted(lib: &qucipher::GateLibrary, key: &NetworkKey) -> Result<NetworkKey> {
    let mut seq = key.sequence().to_vec();
    seq[0] = if seq[0] == 0 { 5 } else { 0 };
    Ok(NetworkKey::new(lib, seq)?)
}

pub fn run(cfg: &RoundtripConfig) -> Result<RoundtripReport> {
    let mut s = Settings::default();
    s.set("library-size", Some(cfg.library_size))?;
    let lib = library(&s, cfg.qubits)?;
    let dim = 1usize << cfg.qubits;
    let per_key: Vec<usize> = (0..cfg.keys)
        .into_par_iter()
        .map(|i| -> Result<usize> {
            let key = NetworkKey::random(&lib, cfg.gates, &mut substream(cfg.seed, 2 * i as u64))?;
            let alice = SessionConfig::new(lib.clone(), key.clone());
            let bob = if cfg.corrupt {
                SessionConfig::new(lib.clone(), corrupted(&lib, &key)?)
            } else {
                alice.clone()
            };
            let mut rng = substream(cfg.seed, 2 * i as u64 + 1);
            let mut failures = 0;
            for block in 0..dim {
                let msg = alice_encode(block, &alice, block as u64)?;
                if bob_decode(msg, &bob, &mut rng)? != block {
                    failures += 1;
                }
            }
            Ok(failures)
        })
        .collect::<Result<_>>()?;
    Ok(RoundtripReport {
        k: cfg.qubits,
        keys: cfg.keys,
        blocks_checked: cfg.keys * dim,
        failures: per_key.iter().sum(),
        failing_keys: per_key
            .iter()
            .enumerate()
            .filter(|(_, &f)| f > 0)
            .map(|(i, _)| i)
            .take(20)
            .collect(),
        seed: cfg.seed,
    })
}

pub fn execute(s: &Settings) -> Result<Outcome> {
    let cfg = RoundtripConfig::from_settings(s)?;
    let report = run(&cfg)?;
    let violation = (report.failures > 0).then(|| {
        format!(
            "{} of {} blocks decoded wrongly",
            report.failures, report.blocks_checked
        )
    });
    Ok(Outcome {
        text: render_json(&report, &cfg),
        violation,
    })
}
