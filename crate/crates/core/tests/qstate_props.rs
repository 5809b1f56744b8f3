mod common;

use common::{binomial_sigma, matvec, max_abs_diff, random_unitary, state_from_seed};
use proptest::prelude::*;
use qucipher::qstate::{density_from_pure, frobenius_norm, outcome_probability};
use qucipher::{measure_spins, OutcomeRecord, PureState, Spin, SpinDirection, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn directions(k: usize, seed: u64) -> Vec<SpinDirection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k).map(|_| SpinDirection::random(&mut rng)).collect()
}

fn all_records(dirs: &[SpinDirection]) -> Vec<OutcomeRecord> {
    let k = dirs.len();
    (0..1usize << k)
        .map(|j| {
            let outcomes = (0..k).map(|q| Spin::from_bit(j >> (k - 1 - q) & 1 == 1)).collect();
            OutcomeRecord::new(dirs.to_vec(), outcomes).unwrap()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitaries_preserve_norm(k in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = PureState::random(k, &mut rng).unwrap();
        let u = random_unitary(1 << k, &mut rng);
        let out = s.apply_unitary(&u).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn basis_column_matches_matrix_vector_oracle(k in 1usize..=3, idx in 0usize..8, seed in any::<u64>()) {
        let idx = idx % (1 << k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(1 << k, &mut rng);
        let basis = PureState::basis(idx, k).unwrap();
        let out = basis.apply_unitary(&u).unwrap();
        prop_assert!(max_abs_diff(out.amplitudes(), &matvec(&u, basis.amplitudes())) < 1e-12);
        prop_assert!((out.amplitudes()[..].iter().zip(u.column(idx)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)) < 1e-12);
    }

    #[test]
    fn outcome_probabilities_are_complete(k in 1usize..=4, seed in any::<u64>()) {
        let s = state_from_seed(k, seed);
        let dirs = directions(k, seed ^ 0xabc);
        let total: f64 = all_records(&dirs).iter().map(|r| outcome_probability(&s, r).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collapse_is_idempotent(k in 1usize..=4, seed in any::<u64>()) {
        let s = state_from_seed(k, seed);
        let dirs = directions(k, seed.wrapping_add(1));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (first, collapsed) = measure_spins(&s, &dirs, &mut rng).unwrap();
        prop_assert!((outcome_probability(&collapsed, &first).unwrap() - 1.0).abs() < 1e-9);
        for _ in 0..5 {
            let (again, _) = measure_spins(&collapsed, &dirs, &mut rng).unwrap();
            prop_assert_eq!(again.outcomes(), first.outcomes());
        }
    }

    #[test]
    fn pure_density_has_unit_norm(k in 1usize..=4, seed in any::<u64>()) {
        let rho = density_from_pure(&state_from_seed(k, seed));
        prop_assert!((frobenius_norm(&rho) - 1.0).abs() < 1e-9);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn direction_vectors_are_unit(theta in 0.0..std::f64::consts::PI, phi in 0.0..std::f64::consts::TAU) {
        let n = SpinDirection::new(theta, phi).unwrap().unit_vector();
        prop_assert!((n.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

/// Brute-force joint probability: `|⟨a|⟨b| Ψ⟩|²` with explicit product bras.
fn brute_joint(state: &PureState, dirs: &[SpinDirection; 2], a: Spin, b: Spin) -> f64 {
    let ea = dirs[0].eigenvector(a);
    let eb = dirs[1].eigenvector(b);
    let amps = state.amplitudes();
    let mut overlap = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            overlap += (ea[i] * eb[j]).conj() * amps[2 * i + j];
        }
    }
    overlap.norm_sqr()
}

#[test]
fn singlet_is_anticorrelated_along_z() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = PureState::from_amplitudes(vec![
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
        C64::new(-h, 0.0),
        C64::new(0.0, 0.0),
    ])
    .unwrap();
    let dirs = [SpinDirection::PLUS_Z, SpinDirection::PLUS_Z];
    for a in Spin::BOTH {
        for b in Spin::BOTH {
            let rec = OutcomeRecord::new(dirs.to_vec(), vec![a, b]).unwrap();
            let p = outcome_probability(&singlet, &rec).unwrap();
            assert!((p - brute_joint(&singlet, &dirs, a, b)).abs() < 1e-12);
            let expected = if a == b { 0.0 } else { 0.5 };
            assert!((p - expected).abs() < 1e-12);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let (rec, _) = measure_spins(&singlet, &dirs, &mut rng).unwrap();
        assert_ne!(rec.outcomes()[0], rec.outcomes()[1]);
    }
}

#[test]
fn random_two_qubit_probabilities_match_brute_force() {
    for seed in 0..20 {
        let s = state_from_seed(2, seed);
        let d = directions(2, seed + 100);
        let dirs = [d[0], d[1]];
        for a in Spin::BOTH {
            for b in Spin::BOTH {
                let rec = OutcomeRecord::new(d.clone(), vec![a, b]).unwrap();
                let p = outcome_probability(&s, &rec).unwrap();
                assert!((p - brute_joint(&s, &dirs, a, b)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn measurement_frequencies_converge() {
    const N: usize = 100_000;
    for (k, seed) in [(1usize, 5u64), (2, 6), (3, 7)] {
        let s = state_from_seed(k, seed);
        let dirs = directions(k, seed * 31);
        let probs: Vec<f64> = all_records(&dirs)
            .iter()
            .map(|r| outcome_probability(&s, r).unwrap())
            .collect();
        let mut counts = vec![0usize; probs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..N {
            counts[measure_spins(&s, &dirs, &mut rng).unwrap().0.outcome_index()] += 1;
        }
        for (p, c) in probs.iter().zip(&counts) {
            let freq = *c as f64 / N as f64;
            let sigma = binomial_sigma(*p, N).max(1e-12);
            assert!((freq - p).abs() <= 4.0 * sigma, "K={k}: freq {freq} vs p {p}");
        }
    }
}

#[test]
fn z_measurement_frequencies_converge() {
    const N: usize = 100_000;
    let s = state_from_seed(2, 77);
    let probs = s.z_probabilities();
    let mut counts = [0usize; 4];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..N {
        counts[s.measure_z(&mut rng).0] += 1;
    }
    for (p, c) in probs.iter().zip(counts) {
        assert!((c as f64 / N as f64 - p).abs() <= 4.0 * binomial_sigma(*p, N));
    }
}
