//! Random key emitted in the key-file format.

use qucipher::write_key_file;
use serde::Serialize;

use super::{default_gates, library, qubits, session_key, substream, Outcome};
use crate::error::Result;
use crate::settings::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct KeygenConfig {
    pub qubits: usize,
    pub gates: usize,
    pub seed: u64,
}

pub fn execute(s: &Settings) -> Result<Outcome> {
    let k = qubits(s, 2, qucipher::qstate::MAX_QUBITS)?;
    let cfg = KeygenConfig {
        qubits: k,
        gates: s.get_or("gates", default_gates(k as u64) as usize)?,
        seed: s.get_or("seed", 1)?,
    };
    let lib = library(s, k)?;
    let key = session_key(&Settings::default(), &lib, cfg.gates, &mut substream(cfg.seed, 0))?;
    Ok(Outcome::ok(write_key_file(&lib, &key)?))
}
