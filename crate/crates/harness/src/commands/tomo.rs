//! Tomography scaling runs and the end-to-end unitary theft.

use qucipher::qstate::density_from_pure;
use qucipher::tomography::{
    assemble_unitary, reconstruct_by_quadrature, reconstruct_density, relative_error, Estimator,
    ReconstructionResult, StolenDecoder, TomographyConfig,
};
use qucipher::{alice_encode, network_to_matrix, Error, PlaintextSource, SessionConfig, TrafficTap};
use rayon::prelude::*;
use serde::Serialize;

use super::{default_gates, derive_seed, least_squares, library, qubits, session_key, substream, Outcome};
use crate::error::{HarnessError, Result};
use crate::output::{render_csv, render_json};
use crate::settings::Settings;

pub const MAX_QUBITS: usize = 3;

fn estimator(s: &Settings) -> Result<Estimator> {
    match s.raw("estimator").unwrap_or("single_shot") {
        "single_shot" | "single-shot" => Ok(Estimator::SingleShot),
        "frequency" => Ok(Estimator::Frequency {
            repeats: s.get_or("repeats", 8)?,
        }),
        other => Err(HarnessError::Usage(format!(
            "unknown estimator `{other}` (single_shot or frequency)"
        ))),
    }
}

fn estimator_label(e: &Estimator) -> String {
    match e {
        Estimator::SingleShot => "single_shot".into(),
        Estimator::Frequency { repeats } => format!("frequency:{repeats}"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingConfig {
    pub qubits: usize,
    pub gates: usize,
    pub n_grid: Vec<usize>,
    pub seeds: u64,
    pub seed: u64,
    pub block: usize,
    pub estimator: String,
    #[serde(skip)]
    pub estimator_kind: Estimator,
}

impl ScalingConfig {
    pub fn new(qubits: usize, seed: u64) -> Self {
        Self {
            qubits,
            gates: default_gates(qubits as u64) as usize,
            n_grid: vec![100, 1_000, 10_000, 100_000],
            seeds: 20,
            seed,
            block: 0,
            estimator: "single_shot".into(),
            estimator_kind: Estimator::SingleShot,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 1, MAX_QUBITS)?;
        let kind = estimator(s)?;
        let mut cfg = Self::new(k, s.get_or("seed", 1)?);
        cfg.gates = s.get_or("gates", cfg.gates)?;
        cfg.n_grid = s.list("n-grid")?.unwrap_or(cfg.n_grid);
        cfg.seeds = s.get_or("seeds", cfg.seeds)?;
        cfg.block = s.get_or("block", 0)?;
        cfg.estimator = estimator_label(&kind);
        cfg.estimator_kind = kind;
        if cfg.n_grid.is_empty() || cfg.n_grid.contains(&0) || cfg.seeds == 0 {
            return Err(HarnessError::Usage("n-grid entries and seeds must be positive".into()));
        }
        if cfg.block >= 1 << k {
            return Err(HarnessError::Usage(format!("block {} does not fit in {k} bits", cfg.block)));
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln α` against `ln N`.
    pub slope: Option<f64>,
    /// Mean of `α²·N / 2^K`, a fitted `Const`.
    pub const_estimate: f64,
}

pub fn scaling(cfg: &ScalingConfig) -> Result<ScalingReport> {
    let lib = qucipher::GateLibrary::default_for(cfg.qubits)?;
    let key = qucipher::NetworkKey::random(&lib, cfg.gates.max(1), &mut substream(cfg.seed, 0))?;
    let session = SessionConfig::new(lib, key);
    let truth = density_from_pure(&alice_encode(cfg.block, &session, 0)?.into_state());
    let units: Vec<(usize, usize, u64)> = cfg
        .n_grid
        .iter()
        .enumerate()
        .flat_map(|(g, &n)| (0..cfg.seeds).map(move |s| (g, n, s)))
        .collect();
    let mut rows = units
        .par_iter()
        .map(|&(g, n, s)| -> Result<ScalingRow> {
            let mut tap = TrafficTap::repeating(&session, cfg.block)?;
            let tomo = TomographyConfig {
                samples: n,
                estimator: cfg.estimator_kind,
                seed: derive_seed(cfg.seed, (g as u64) << 20 | s),
            };
            let r = reconstruct_density(&mut tap, &tomo)?;
            Ok(ScalingRow {
                k: cfg.qubits,
                n,
                seed: s,
                alpha: relative_error(&r.rho_calc, &truth)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    let points: Vec<(f64, f64)> = rows.iter().map(|r| ((r.n as f64).ln(), r.alpha.ln())).collect();
    let dim = (1usize << cfg.qubits) as f64;
    let const_estimate = rows.iter().map(|r| r.alpha.powi(2) * r.n as f64).sum::<f64>() / rows.len() as f64 / dim;
    Ok(ScalingReport {
        slope: least_squares(&points).map(|(m, _)| m),
        rows,
        const_estimate,
    })
}

pub fn execute_scaling(s: &Settings) -> Result<Outcome> {
    let cfg = ScalingConfig::from_settings(s)?;
    let report = scaling(&cfg)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.k.to_string(), r.n.to_string(), r.seed.to_string(), format!("{:.9}", r.alpha)])
        .collect();
    let trailer = vec![
        format!(
            "slope={}",
            report.slope.map_or("nan".to_string(), |m| format!("{m:.6}"))
        ),
        format!("const_estimate={:.6}", report.const_estimate),
    ];
    Ok(Outcome::ok(render_csv(&cfg, &["K", "N", "seed", "alpha"], &rows, &trailer)))
}

#[derive(Debug, Clone, Serialize)]
pub struct TomoAttackConfig {
    pub qubits: usize,
    pub gates: usize,
    pub samples: usize,
    pub seed: u64,
    /// Fresh messages decoded with the stolen unitary.
    pub fresh: usize,
    pub estimator: String,
    pub quadrature: bool,
    #[serde(skip)]
    pub estimator_kind: Estimator,
}

impl TomoAttackConfig {
    pub fn new(qubits: usize, samples: usize, seed: u64) -> Self {
        Self {
            qubits,
            gates: default_gates(qubits as u64) as usize,
            samples,
            seed,
            fresh: 1000,
            estimator: "single_shot".into(),
            quadrature: false,
            estimator_kind: Estimator::SingleShot,
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self> {
        let k = qubits(s, 2, MAX_QUBITS)?;
        let kind = estimator(s)?;
        let mut cfg = Self::new(k, s.get_or("samples", 100_000)?, s.get_or("seed", 1)?);
        cfg.gates = s.get_or("gates", cfg.gates)?;
        cfg.fresh = s.get_or("fresh", cfg.fresh)?;
        cfg.quadrature = s.flag("quadrature")?;
        cfg.estimator = if cfg.quadrature { "quadrature".into() } else { estimator_label(&kind) };
        cfg.estimator_kind = kind;
        if cfg.quadrature && k != 1 {
            return Err(HarnessError::Resource("quadrature mode is limited to 1 qubit".into()));
        }
        if cfg.samples == 0 {
            return Err(HarnessError::Usage("samples must be positive".into()));
        }
        Ok(cfg)
    }
}

/// Reconstruction report plus the theft results.
#[derive(Debug, Clone, Serialize)]
pub struct TomoAttackReport {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub estimator: String,
    /// Mean relative error over the `2^K` reconstructions.
    pub alpha: Option<f64>,
    pub unitarity_defect: Option<f64>,
    pub seed: u64,
    pub column_fidelities: Vec<f64>,
    pub min_column_fidelity: Option<f64>,
    pub decode_rate: Option<f64>,
    pub messages_intercepted: usize,
    /// Block whose reconstruction had no clear dominant eigenvector.
    pub degenerate_state: Option<usize>,
}

pub fn attack(cfg: &TomoAttackConfig) -> Result<TomoAttackReport> {
    let k = cfg.qubits;
    let lib = library(&Settings::default(), k)?;
    let key = session_key(&Settings::default(), &lib, cfg.gates.max(1), &mut substream(cfg.seed, 0))?;
    let session = SessionConfig::new(lib.clone(), key.clone());
    let dim = 1usize << k;
    let truth_u = network_to_matrix(&lib, &key)?;

    let results = (0..dim)
        .map(|block| -> Result<ReconstructionResult> {
            let psi = alice_encode(block, &session, 0)?.into_state();
            let truth = density_from_pure(&psi);
            let r = if cfg.quadrature {
                ReconstructionResult {
                    rho_calc: reconstruct_by_quadrature(&psi, 100)?,
                    alpha: None,
                    samples_used: 0,
                }
            } else {
                let mut tap = TrafficTap::repeating(&session, block)?;
                let tomo = TomographyConfig {
                    samples: cfg.samples,
                    estimator: cfg.estimator_kind,
                    seed: derive_seed(cfg.seed, block as u64 + 1),
                };
                reconstruct_density(&mut tap, &tomo)?
            };
            Ok(r.with_truth(&truth)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha = results.iter().map(|r| r.alpha.unwrap_or(0.0)).sum::<f64>() / dim as f64;
    let mut report = TomoAttackReport {
        k,
        n: cfg.samples,
        estimator: cfg.estimator.clone(),
        alpha: Some(alpha),
        unitarity_defect: None,
        seed: cfg.seed,
        column_fidelities: Vec::new(),
        min_column_fidelity: None,
        decode_rate: None,
        messages_intercepted: results.iter().map(|r| r.samples_used).sum(),
        degenerate_state: None,
    };
    let assembled = match assemble_unitary(&results) {
        Ok(a) => a,
        Err(Error::Degenerate { block, .. }) => {
            report.degenerate_state = block;
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.unitarity_defect = Some(assembled.unitarity_defect);
    report.column_fidelities = assembled.column_fidelities(&truth_u)?;
    report.min_column_fidelity = report.column_fidelities.iter().copied().reduce(f64::min);

    let decoder = StolenDecoder::new(&assembled)?;
    let mut plain = PlaintextSource::uniform(k, derive_seed(cfg.seed, 0xf0))?;
    let mut rng = substream(cfg.seed, 0xf1);
    let mut hits = 0;
    for i in 0..cfg.fresh {
        let block = plain.next_block();
        if decoder.decode(alice_encode(block, &session, i as u64)?, &mut rng)? == block {
            hits += 1;
        }
    }
    report.decode_rate = (cfg.fresh > 0).then(|| hits as f64 / cfg.fresh as f64);
    Ok(report)
}

pub fn execute_attack(s: &Settings) -> Result<Outcome> {
    let cfg = TomoAttackConfig::from_settings(s)?;
    let report = attack(&cfg)?;
    Ok(Outcome::ok(render_json(&report, &cfg)))
}
