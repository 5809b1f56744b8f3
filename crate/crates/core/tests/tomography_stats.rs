mod common;

use qucipher::qstate::density_from_pure;
use qucipher::tomography::{
    assemble_unitary, reconstruct_by_quadrature, reconstruct_density, relative_error, Estimator, ReconstructionResult,
    StolenDecoder, TomographyConfig,
};
use qucipher::{
    alice_encode, network_to_matrix, CMatrix, DensityMatrix, GateLibrary, NetworkKey, PureState, SessionConfig,
    TrafficTap, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bell_session() -> SessionConfig {
    let lib = GateLibrary::default_for(2).unwrap();
    // H on qubit 0, then CNOT 0→1.
    let key = NetworkKey::new(&lib, vec![0, 14]).unwrap();
    SessionConfig::new(lib, key)
}

fn reconstruct(cfg: &SessionConfig, block: usize, samples: usize, seed: u64) -> ReconstructionResult {
    let mut tap = TrafficTap::repeating(cfg, block).unwrap();
    reconstruct_density(&mut tap, &TomographyConfig::single_shot(samples, seed)).unwrap()
}

#[test]
fn quadrature_is_exact_for_single_qubit_states() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let states = [
        PureState::basis(0, 1).unwrap(),
        PureState::from_amplitudes(vec![C64::new(h, 0.0), C64::new(0.0, h)]).unwrap(),
        PureState::from_amplitudes(vec![C64::new(0.6, 0.0), C64::new(0.0, -0.8)]).unwrap(),
        common::state_from_seed(1, 12),
    ];
    for s in &states {
        let rho = reconstruct_by_quadrature(s, 100).unwrap();
        assert!(rho.frobenius_distance(&density_from_pure(s)).unwrap() < 1e-3);
    }
}

#[test]
fn single_shot_mean_is_unbiased_at_k2() {
    const SEEDS: u64 = 50;
    const N: usize = 2000;
    let cfg = bell_session();
    let truth = density_from_pure(&alice_encode(0, &cfg, 0).unwrap().into_state());
    let runs: Vec<CMatrix> = (0..SEEDS)
        .map(|s| reconstruct(&cfg, 0, N, s).rho_calc.into_entries())
        .collect();
    for r in 0..4 {
        for c in 0..4 {
            for part in [|z: C64| z.re, |z: C64| z.im] {
                let xs: Vec<f64> = runs.iter().map(|m| part(m[(r, c)])).collect();
                let mean = xs.iter().sum::<f64>() / SEEDS as f64;
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (SEEDS - 1) as f64;
                let se = (var / SEEDS as f64).sqrt();
                let target = part(truth.entries()[(r, c)]);
                assert!((mean - target).abs() <= 4.0 * se + 1e-12, "entry ({r},{c}): {mean} vs {target}");
            }
        }
    }
}

#[test]
fn zero_state_reconstructs_within_tenth() {
    let lib = GateLibrary::default_for(1).unwrap();
    // X X is the identity, so Alice sends |0⟩.
    let cfg = SessionConfig::new(lib.clone(), NetworkKey::new(&lib, vec![5, 5]).unwrap());
    let r = reconstruct(&cfg, 0, 10_000, 1);
    let zero = density_from_pure(&PureState::basis(0, 1).unwrap());
    assert!(r.rho_calc.symmetrized().frobenius_distance(&zero).unwrap() < 0.1);
}

#[test]
fn alpha_shrinks_on_average_with_more_samples() {
    let cfg = bell_session();
    let truth = density_from_pure(&alice_encode(0, &cfg, 0).unwrap().into_state());
    let mean_alpha = |n: usize| {
        (0..20)
            .map(|s| relative_error(&reconstruct(&cfg, 0, n, s).rho_calc, &truth).unwrap())
            .sum::<f64>()
            / 20.0
    };
    let a = [mean_alpha(100), mean_alpha(1000), mean_alpha(10_000)];
    assert!(a[0] > a[1] && a[1] > a[2], "{a:?}");
    // Quadrupling N halves α within 30%.
    let ratio = mean_alpha(1000) / mean_alpha(4000);
    assert!((ratio - 2.0).abs() <= 0.6, "ratio {ratio}");
}

/// Messages per state to reach `alpha` at `K`, from the measured `α²·N`.
fn measured_budget(k: usize, alpha: f64) -> f64 {
    const N: usize = 4000;
    let lib = GateLibrary::default_for(k).unwrap();
    let key = NetworkKey::random(&lib, 2 * k * k, &mut ChaCha8Rng::seed_from_u64(k as u64)).unwrap();
    let cfg = SessionConfig::new(lib, key);
    let truth = density_from_pure(&alice_encode(0, &cfg, 0).unwrap().into_state());
    let mean_sq = (0..10)
        .map(|s| relative_error(&reconstruct(&cfg, 0, N, s).rho_calc, &truth).unwrap().powi(2))
        .sum::<f64>()
        / 10.0;
    N as f64 * mean_sq / (alpha * alpha)
}

#[test]
fn budget_growth_per_qubit_tracks_doubling() {
    let budgets: Vec<f64> = (1..=3).map(|k| measured_budget(k, 0.2)).collect();
    for w in budgets.windows(2) {
        let step = w[1] / w[0];
        assert!((0.5..=8.0).contains(&step), "budgets {budgets:?}");
    }
}

#[test]
fn frequency_estimator_is_also_consistent() {
    let cfg = bell_session();
    let truth = density_from_pure(&alice_encode(1, &cfg, 0).unwrap().into_state());
    let mut tap = TrafficTap::repeating(&cfg, 1).unwrap();
    let config = TomographyConfig {
        samples: 2000,
        estimator: Estimator::Frequency { repeats: 8 },
        seed: 4,
    };
    let r = reconstruct_density(&mut tap, &config).unwrap();
    assert_eq!(r.samples_used, 16_000);
    assert!(relative_error(&r.rho_calc, &truth).unwrap() < 0.25);
}

#[test]
fn stolen_unitary_decodes_fresh_traffic() {
    let cfg = bell_session();
    let truth = network_to_matrix(&cfg.library, &cfg.key).unwrap();
    let results: Vec<_> = (0..4).map(|b| reconstruct(&cfg, b, 20_000, 100 + b as u64)).collect();
    let assembled = assemble_unitary(&results).unwrap();
    let fids = assembled.column_fidelities(&truth).unwrap();
    assert!(fids.iter().all(|&f| f > 0.9), "{fids:?}");
    let decoder = StolenDecoder::new(&assembled).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let hits = (0..400)
        .filter(|&i| {
            let block = i % 4;
            decoder.decode(alice_encode(block, &cfg, i as u64).unwrap(), &mut rng).unwrap() == block
        })
        .count();
    assert!(hits >= 360, "{hits}/400");
}

#[test]
fn column_fidelity_ignores_column_phases() {
    let cfg = bell_session();
    let truth = network_to_matrix(&cfg.library, &cfg.key).unwrap();
    let results: Vec<_> = (0..4)
        .map(|b| {
            let col: Vec<C64> = truth.column(b).iter().map(|a| a * C64::from_polar(1.0, b as f64)).collect();
            ReconstructionResult {
                rho_calc: DensityMatrix::from_pure(&PureState::from_amplitudes(col).unwrap()),
                alpha: None,
                samples_used: 0,
            }
        })
        .collect();
    let fids = assemble_unitary(&results).unwrap().column_fidelities(&truth).unwrap();
    assert!(fids.iter().all(|f| (f - 1.0).abs() < 1e-9));
}
