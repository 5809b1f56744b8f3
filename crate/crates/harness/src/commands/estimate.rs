//! Closed-form cost estimates and the secure-time figure.

use num_bigint::BigUint;
use qucipher::tomography::{ceil_to_biguint, classical_cost_estimates, required_messages, EstimateParams};
use serde::Serialize;

use super::{default_gates, default_library_size, Outcome};
use crate::error::{HarnessError, Result};
use crate::output::render_json;
use crate::settings::{require_positive, Settings};

const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateConfig {
    pub qubits: u32,
    pub gates: u64,
    pub library_size: u64,
    pub c: f64,
    #[serde(rename = "const")]
    pub constant: f64,
    pub alpha: f64,
    pub bitrate: f64,
}

impl EstimateConfig {
    pub fn new(qubits: u32) -> Self {
        let k = u64::from(qubits);
        Self {
            qubits,
            gates: default_gates(k),
            library_size: default_library_size(k),
            c: 1.0,
            constant: 1.0,
            alpha: 0.1,
            bitrate: 50_000.0,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self> {
        let qubits = require_positive("qubits", s.get_or("qubits", 8u32)?)?;
        let d = Self::new(qubits);
        let alpha = require_positive("alpha", s.get_or("alpha", d.alpha)?)?;
        if alpha > 1.0 {
            return Err(HarnessError::Usage(format!("alpha must be at most 1, got {alpha}")));
        }
        Ok(Self {
            qubits,
            gates: require_positive("gates", s.get_or("gates", d.gates)?)?,
            library_size: require_positive("library-size", s.get_or("library-size", d.library_size)?)?,
            c: require_positive("c", s.get_or("c", d.c)?)?,
            constant: require_positive("const", s.get_or("const", d.constant)?)?,
            alpha,
            bitrate: require_positive("bitrate", s.get_or("bitrate", d.bitrate)?)?,
        })
    }
}

/// Every count is an exact decimal string.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    #[serde(rename = "K")]
    pub k: u32,
    /// `Const·α⁻²·2^K` messages for one reconstruction.
    pub n_intercepted: String,
    /// `2^(3K)` classical operations.
    pub n_operations: String,
    /// `2^(2K)` stored numbers.
    pub n_data: String,
    /// `2^(2K)` gates to rebuild the network.
    pub n_gates: String,
    /// `L^M` candidate networks.
    pub n_quant: String,
    /// `C·2^(2K)` messages for the whole unitary.
    pub n_messages: String,
    /// `K·2^(2K)` order-of-magnitude bit count.
    pub n_bit: String,
    /// `n_messages · K` bits that can be sent before the budget is reached.
    pub bits_carried: String,
    /// `K²·log₂K²` order-of-magnitude key length.
    pub n_key_estimate: f64,
    /// `M·⌈log₂L⌉` bits of the serialized sequence.
    pub n_key_bits: String,
    pub secure_seconds: f64,
    pub secure_years: f64,
}

fn id_width(l: u64) -> u64 {
    if l <= 1 {
        1
    } else {
        u64::from(64 - (l - 1).leading_zeros())
    }
}

pub fn run(cfg: &EstimateConfig) -> Result<CostReport> {
    let k = cfg.qubits;
    let costs = classical_cost_estimates(k);
    let params = EstimateParams {
        constant: cfg.constant,
        c: cfg.c,
    };
    let two_2k = BigUint::from(2u32).pow(2 * k);
    let n_messages = if cfg.c.fract() == 0.0 && cfg.c < 2f64.powi(53) {
        BigUint::from(cfg.c as u64) * &two_2k
    } else {
        ceil_to_biguint(cfg.c * 4f64.powi(k as i32))?
    };
    let bits_carried = &n_messages * BigUint::from(k);
    let seconds: f64 = bits_carried.to_string().parse::<f64>().unwrap_or(f64::INFINITY) / cfg.bitrate;
    let k2 = f64::from(k).powi(2);
    Ok(CostReport {
        k,
        n_intercepted: required_messages(cfg.alpha, k, &params)?.to_string(),
        n_operations: costs.operations.to_string(),
        n_data: costs.data.to_string(),
        n_gates: costs.gates.to_string(),
        n_quant: BigUint::from(cfg.library_size).pow(cfg.gates as u32).to_string(),
        n_messages: n_messages.to_string(),
        n_bit: (BigUint::from(k) * &two_2k).to_string(),
        bits_carried: bits_carried.to_string(),
        n_key_estimate: k2 * k2.log2(),
        n_key_bits: (BigUint::from(cfg.gates) * BigUint::from(id_width(cfg.library_size))).to_string(),
        secure_seconds: seconds,
        secure_years: seconds / SECONDS_PER_YEAR,
    })
}

pub fn execute(s: &Settings) -> Result<Outcome> {
    let cfg = EstimateConfig::from_settings(s)?;
    if cfg.gates > u64::from(u32::MAX) {
        return Err(HarnessError::Resource(format!("gates {} is too large to exponentiate", cfg.gates)));
    }
    let report = run(&cfg)?;
    Ok(Outcome::ok(render_json(&report, &cfg)))
}
