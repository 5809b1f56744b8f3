//! One session against a registered eavesdropper.

use qucipher::protocol::intercept_resend_z_error_rate;
use qucipher::{run_session, EveStrategy, NetworkKey, PlaintextSource, SessionConfig, SessionTranscript, Verdict};
use serde::Serialize;

use super::{default_gates, derive_seed, library, qubits, session_key, substream, Outcome};
use crate::error::{HarnessError, Result};
use crate::output::{emit, render_json};
use crate::settings::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct DetectConfig {
    pub qubits: usize,
    pub gates: usize,
    pub seed: u64,
    pub strategy: String,
    pub messages: usize,
    pub tolerance: f64,
    pub check_fraction: f64,
    pub key_file: Option<String>,
    pub transcript: Option<String>,
}

impl DetectConfig {
    pub fn new(qubits: usize, seed: u64, strategy: &str) -> Self {
        Self {
            qubits,
            gates: default_gates(qubits as u64) as usize,
            seed,
            strategy: strategy.to_string(),
            messages: 1000,
            tolerance: 0.0,
            check_fraction: 0.1,
            key_file: None,
            transcript: None,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 3, qucipher::gateset::MATRIX_QUBIT_CAP)?;
        let mut cfg = Self::new(k, s.get_or("seed", 1)?, s.raw("strategy").unwrap_or("resend-z"));
        cfg.gates = s.get_or("gates", cfg.gates)?;
        cfg.messages = s.get_or("messages", cfg.messages)?;
        cfg.tolerance = s.get_or("tolerance", cfg.tolerance)?;
        cfg.check_fraction = s.get_or("check-fraction", cfg.check_fraction)?;
        cfg.key_file = s.raw("key-file").map(str::to_string);
        cfg.transcript = s.raw("transcript").map(str::to_string);
        if cfg.strategy != "resend-guess" && EveStrategy::from_tag(&cfg.strategy).is_none() {
            return Err(HarnessError::Usage(format!(
                "unknown strategy `{}` (passive, resend-z, resend-guess, collect, sample-forward)",
                cfg.strategy
            )));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectReport {
    pub verdict: Verdict,
    pub checked: usize,
    pub errors: usize,
    pub lost: usize,
    pub strategy: String,
    pub messages: usize,
    pub decode_errors: usize,
    /// Mismatch rate over every delivered message.
    pub empirical_error_rate: Option<f64>,
    /// `1 − mean_k Σ_j |⟨j|U|k⟩|⁴` for Z-basis intercept-resend.
    pub analytic_error_rate: Option<f64>,
    /// Binomial standard error of the empirical rate under the analytic one.
    pub sigma: Option<f64>,
    pub within_4_sigma: Option<bool>,
    #[serde(rename = "K")]
    pub k: usize,
    pub seed: u64,
}

pub fn run(cfg: &DetectConfig) -> Result<(DetectReport, SessionTranscript)> {
    let mut s = Settings::default();
    s.set("key-file", cfg.key_file.as_ref())?;
    let lib = library(&Settings::default(), cfg.qubits)?;
    let key = session_key(&s, &lib, cfg.gates, &mut substream(cfg.seed, 0))?;
    let eve = match cfg.strategy.as_str() {
        "resend-guess" => EveStrategy::InterceptResendGuess {
            guess: NetworkKey::random(&lib, key.len(), &mut substream(cfg.seed, 4))?,
        },
        tag => EveStrategy::from_tag(tag).expect("validated"),
    };
    let mut session = SessionConfig::new(lib.clone(), key.clone()).with_seeds(
        derive_seed(cfg.seed, 1),
        derive_seed(cfg.seed, 2),
        derive_seed(cfg.seed, 3),
    );
    session.error_tolerance = cfg.tolerance;
    session.check_fraction = cfg.check_fraction;
    let mut plain = PlaintextSource::uniform(cfg.qubits, derive_seed(cfg.seed, 5))?;
    let t = run_session(&mut plain, cfg.messages, &eve, &session)?;

    let empirical = t.decode_error_rate();
    let analytic = match eve {
        EveStrategy::InterceptResendZ => Some(intercept_resend_z_error_rate(&lib, &key)?),
        EveStrategy::Passive => Some(0.0),
        _ => None,
    };
    let delivered = t.records.len() - t.lost;
    let sigma = analytic
        .filter(|_| delivered > 0)
        .map(|p| (p * (1.0 - p) / delivered as f64).sqrt());
    let within = match (empirical, analytic, sigma) {
        (Some(e), Some(a), Some(sd)) => Some((e - a).abs() <= 4.0 * sd + 1e-12),
        _ => None,
    };
    let report = DetectReport {
        verdict: t.verdict,
        checked: t.checked,
        errors: t.check_errors,
        lost: t.lost,
        strategy: cfg.strategy.clone(),
        messages: cfg.messages,
        decode_errors: t.decode_errors,
        empirical_error_rate: empirical,
        analytic_error_rate: analytic,
        sigma,
        within_4_sigma: within,
        k: cfg.qubits,
        seed: cfg.seed,
    };
    Ok((report, t))
}

pub fn execute(s: &Settings) -> Result<Outcome> {
    let cfg = DetectConfig::from_settings(s)?;
    let (report, transcript) = run(&cfg)?;
    if let Some(path) = &cfg.transcript {
        emit(&transcript.to_json_lines(), Some(std::path::Path::new(path)))?;
    }
    Ok(Outcome::ok(render_json(&report, &cfg)))
}
