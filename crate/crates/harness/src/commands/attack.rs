//! Exhaustive network guessing and correlation matching.

use num_bigint::BigUint;
use qucipher::attacks::{
    calibrate_tau, correlation_attack, correlation_statistic, decode_equivalent, distinct_action_classes,
    empirical_correlator, guess_attack, keyspace_size, AttackStatus, CorrelationConfig, Correlator, GuessConfig,
};
use qucipher::{GateLibrary, NetworkKey, PlaintextSource, SessionConfig, TrafficTap, TransitionMatrix};
use serde::Serialize;

use super::{derive_seed, library, markov_chain, qubits, session_key, substream, Outcome};
use crate::error::{HarnessError, Result};
use crate::output::render_json;
use crate::settings::Settings;

/// Largest keyspace for which distinct actions are counted by brute force.
const CLASS_COUNT_CAP: u64 = 100_000;
/// Source windows used to calibrate τ when none is given.
pub const CALIBRATION_RUNS: usize = 100;

#[derive(Debug, Clone, Serialize)]
pub struct GuessCmdConfig {
    pub qubits: usize,
    pub library_size: usize,
    pub gates: usize,
    pub seed: u64,
    pub n_acc: usize,
    pub cap: u64,
    pub budget: Option<usize>,
    pub key_file: Option<String>,
}

impl GuessCmdConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 2, qucipher::gateset::MATRIX_QUBIT_CAP)?;
        let n_acc = s.get_or("n-acc", 20)?;
        if n_acc == 0 {
            return Err(HarnessError::Usage("n-acc must be at least 1".into()));
        }
        Ok(Self {
            qubits: k,
            library_size: library(s, k)?.len(),
            gates: s.get_or("gates", 2)?,
            seed: s.get_or("seed", 1)?,
            n_acc,
            cap: s.get_or("cap", 1_000_000)?,
            budget: s.get("budget")?,
            key_file: s.raw("key-file").map(str::to_string),
        })
    }

    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        s.set("library-size", Some(self.library_size))?;
        s.set("key-file", self.key_file.as_ref())?;
        Ok(s)
    }
}

/// Shared shape of both attack reports.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub mode: &'static str,
    pub found: bool,
    pub candidates: u64,
    pub messages: u64,
    /// `L^M` as a decimal string.
    pub keyspace: String,
    pub seed: u64,
    pub status: AttackStatus,
    /// Gate labels of the recovered network.
    pub recovered: Option<Vec<String>>,
    /// Whether the recovered network decodes like the true one.
    pub decodes_like_true_key: Option<bool>,
    /// Distinct unitaries (up to global phase) among the `L^M` networks,
    /// counted when the keyspace is small.
    pub distinct_actions: Option<usize>,
}

fn labels(lib: &GateLibrary, key: &NetworkKey) -> Vec<String> {
    key.sequence()
        .iter()
        .map(|&id| lib.gate(id).expect("id in library").kind.label())
        .collect()
}

fn check_keyspace(lib: &GateLibrary, m: usize, cap: u64) -> Result<BigUint> {
    if m == 0 {
        return Err(HarnessError::Usage("gates must be at least 1".into()));
    }
    let keyspace = keyspace_size(lib.len() as u64, m as u32);
    if keyspace > BigUint::from(cap) {
        return Err(HarnessError::Resource(format!(
            "keyspace {}^{m} = {keyspace} exceeds the cap {cap}; lower --gates or --library-size, or raise --cap",
            lib.len()
        )));
    }
    Ok(keyspace)
}

fn distinct_actions(lib: &GateLibrary, m: usize, keyspace: &BigUint) -> Result<Option<usize>> {
    if lib.num_qubits() > 2 || *keyspace > BigUint::from(CLASS_COUNT_CAP) {
        return Ok(None);
    }
    Ok(Some(distinct_action_classes(lib, m, CLASS_COUNT_CAP)?))
}

pub fn guess(cfg: &GuessCmdConfig) -> Result<AttackReport> {
    let s = cfg.settings()?;
    let lib = library(&s, cfg.qubits)?;
    let keyspace = check_keyspace(&lib, cfg.gates, cfg.cap)?;
    let key = session_key(&s, &lib, cfg.gates, &mut substream(cfg.seed, 0))?;
    let session = SessionConfig::new(lib.clone(), key.clone());
    let plain = PlaintextSource::uniform(cfg.qubits, derive_seed(cfg.seed, 1))?;
    let mut tap = TrafficTap::new(&session, plain);
    if let Some(b) = cfg.budget {
        tap = tap.with_budget(b);
    }
    let config = GuessConfig {
        n_acc: cfg.n_acc,
        enumeration_cap: cfg.cap,
    };
    let out = guess_attack(&lib, cfg.gates, &mut tap, &config, &mut substream(cfg.seed, 2))?;
    let decodes_like = out
        .found
        .as_ref()
        .map(|f| decode_equivalent(&lib, &key, f))
        .transpose()?;
    Ok(AttackReport {
        mode: "guess",
        found: out.is_found(),
        candidates: out.candidates_tried,
        messages: out.messages_consumed,
        keyspace: keyspace.to_string(),
        seed: cfg.seed,
        status: out.status,
        recovered: out.found.as_ref().map(|f| labels(&lib, f)),
        decodes_like_true_key: decodes_like,
        distinct_actions: distinct_actions(&lib, cfg.gates, &keyspace)?,
    })
}

pub fn execute_guess(s: &Settings) -> Result<Outcome> {
    let cfg = GuessCmdConfig::from_settings(s)?;
    let report = guess(&cfg)?;
    Ok(Outcome::ok(render_json(&report, &cfg)))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrCmdConfig {
    pub qubits: usize,
    pub library_size: usize,
    pub gates: usize,
    pub seed: u64,
    /// `markov` or `uniform`.
    pub source: String,
    pub window: usize,
    pub tau: Option<f64>,
    pub lags: Vec<usize>,
    pub cap: u64,
    pub budget: Option<usize>,
    pub key_file: Option<String>,
}

impl CorrCmdConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 2, qucipher::gateset::MATRIX_QUBIT_CAP)?;
        let source = s.raw("source").unwrap_or("markov").to_string();
        if source != "markov" && source != "uniform" {
            return Err(HarnessError::Usage(format!("unknown source `{source}` (markov or uniform)")));
        }
        let lags = s.list("lags")?.unwrap_or_else(|| vec![0, 1]);
        let window = s.get_or("window", 2000)?;
        if lags.is_empty() || lags.iter().any(|&y| y >= window) {
            return Err(HarnessError::Usage("lags must be non-empty and below the window".into()));
        }
        Ok(Self {
            qubits: k,
            library_size: library(s, k)?.len(),
            gates: s.get_or("gates", 1)?,
            seed: s.get_or("seed", 1)?,
            source,
            window,
            tau: s.get("tau")?,
            lags,
            cap: s.get_or("cap", 1_000_000)?,
            budget: s.get("budget")?,
            key_file: s.raw("key-file").map(str::to_string),
        })
    }

    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        s.set("library-size", Some(self.library_size))?;
        s.set("key-file", self.key_file.as_ref())?;
        Ok(s)
    }

    pub fn transitions(&self) -> Result<TransitionMatrix> {
        if self.source == "uniform" {
            Ok(TransitionMatrix::uniform(1 << self.qubits)?)
        } else {
            markov_chain(self.qubits, self.seed)
        }
    }

    pub fn plaintext(&self, seed: u64) -> Result<PlaintextSource> {
        Ok(if self.source == "uniform" {
            PlaintextSource::uniform(self.qubits, seed)?
        } else {
            PlaintextSource::markov(self.qubits, self.transitions()?, seed)?
        })
    }
}

/// The known correlators at the given lags.
pub fn known_correlators(t: &TransitionMatrix, lags: &[usize]) -> Vec<Correlator> {
    lags.iter().map(|&y| t.exact_correlator(y)).collect()
}

/// 99th percentile of the statistic over `runs` windows sampled from the
/// source model itself, which is what a correct decoding yields.
pub fn calibrate_from_source(
    cfg: &CorrCmdConfig,
    known: &[Correlator],
    runs: usize,
    seed: u64,
) -> Result<f64> {
    let stats = (0..runs)
        .map(|r| {
            let window = cfg.plaintext(derive_seed(seed, r as u64))?.take_blocks(cfg.window);
            Ok(correlation_statistic(&window, known)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(calibrate_tau(&stats, 0.99)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct XiTable {
    pub lag: usize,
    pub known: Vec<Vec<f64>>,
    pub empirical: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrReport {
    #[serde(flatten)]
    pub attack: AttackReport,
    pub ambiguous: bool,
    /// Decode-distinct classes among accepted candidates.
    pub classes: usize,
    pub accepted: usize,
    pub tau: f64,
    pub window: usize,
    /// `2^K` and `2^(2K)`, the first- and second-order polynomial budgets
    /// to compare the window against.
    pub p1: String,
    pub p2: String,
    /// Messages spent decoding one extra window with the recovered key for
    /// the empirical tables.
    pub verification_messages: usize,
    pub xi: Vec<XiTable>,
}

fn table(xi: &Correlator) -> Vec<Vec<f64>> {
    (0..xi.dim()).map(|k| (0..xi.dim()).map(|l| xi.get(k, l)).collect()).collect()
}

pub fn correlate(cfg: &CorrCmdConfig) -> Result<CorrReport> {
    let s = cfg.settings()?;
    let lib = library(&s, cfg.qubits)?;
    let keyspace = check_keyspace(&lib, cfg.gates, cfg.cap)?;
    let key = session_key(&s, &lib, cfg.gates, &mut substream(cfg.seed, 0))?;
    let session = SessionConfig::new(lib.clone(), key.clone());
    let transitions = cfg.transitions()?;
    let known = known_correlators(&transitions, &cfg.lags);
    let tau = match cfg.tau {
        Some(t) => t,
        None => calibrate_from_source(cfg, &known, CALIBRATION_RUNS, derive_seed(cfg.seed, 3))?,
    };
    let mut tap = TrafficTap::new(&session, cfg.plaintext(derive_seed(cfg.seed, 1))?);
    if let Some(b) = cfg.budget {
        tap = tap.with_budget(b);
    }
    let config = CorrelationConfig {
        window: cfg.window,
        tau,
        enumeration_cap: cfg.cap,
        stop_at_first: false,
    };
    let mut rng = substream(cfg.seed, 2);
    let out = correlation_attack(&lib, cfg.gates, &mut tap, &known, &config, &mut rng)?;

    // Empirical tables from one more window decoded with the recovered key.
    let mut verification_messages = 0;
    let mut empirical: Vec<Option<Vec<Vec<f64>>>> = vec![None; known.len()];
    if let Some(found) = &out.found {
        let inverse = found.inverse(&lib)?;
        let mut decoded = Vec::with_capacity(cfg.window);
        while decoded.len() < cfg.window {
            let Some(msg) = qucipher::MessageSource::next_message(&mut tap) else {
                break;
            };
            decoded.push(msg.evolve(&lib, &inverse)?.measure_z(&mut rng).0);
        }
        verification_messages = decoded.len();
        if decoded.len() > cfg.lags.iter().copied().max().unwrap_or(0) {
            for (slot, xi) in empirical.iter_mut().zip(&known) {
                *slot = Some(table(&empirical_correlator(&decoded, xi.dim(), xi.lag())?));
            }
        }
    }
    let dim = BigUint::from(2u32).pow(cfg.qubits as u32);
    Ok(CorrReport {
        attack: AttackReport {
            mode: "correlation",
            found: out.status == AttackStatus::Found,
            candidates: out.candidates_tried,
            messages: out.messages_consumed,
            keyspace: keyspace.to_string(),
            seed: cfg.seed,
            status: out.status,
            recovered: out.found.as_ref().map(|f| labels(&lib, f)),
            decodes_like_true_key: out
                .found
                .as_ref()
                .map(|f| decode_equivalent(&lib, &key, f))
                .transpose()?,
            distinct_actions: distinct_actions(&lib, cfg.gates, &keyspace)?,
        },
        ambiguous: out.is_ambiguous(),
        classes: out.classes,
        accepted: out.accepted.len(),
        tau,
        window: cfg.window,
        p1: dim.to_string(),
        p2: (&dim * &dim).to_string(),
        verification_messages,
        xi: known
            .iter()
            .zip(empirical)
            .map(|(xi, emp)| XiTable {
                lag: xi.lag(),
                known: table(xi),
                empirical: emp,
            })
            .collect(),
    })
}

pub fn execute_correlation(s: &Settings) -> Result<Outcome> {
    let cfg = CorrCmdConfig::from_settings(s)?;
    let report = correlate(&cfg)?;
    Ok(Outcome::ok(render_json(&report, &cfg)))
}
