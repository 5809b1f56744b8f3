mod common;

use std::collections::HashMap;

use common::{binomial_sigma, max_abs_diff};
use proptest::prelude::*;
use qucipher::protocol::{intercept_resend_z_error_rate, MessageRecord};
use qucipher::{
    alice_encode, bob_decode, network_to_matrix, run_session, ChannelMessage, Error, EveStrategy, GateLibrary,
    NetworkKey, PlaintextSource, PureState, QuantumChannel, SessionConfig, Verdict,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn session(k: usize, len: usize, seed: u64) -> SessionConfig {
    let lib = GateLibrary::default_for(k).unwrap();
    let key = NetworkKey::random(&lib, len, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    SessionConfig::new(lib, key).with_seeds(seed, seed + 1, seed + 2)
}

/// `Σ_j |⟨j|Ψ_k⟩|⁴` straight from the dense matrix column.
fn survival_oracle(config: &SessionConfig, k: usize) -> f64 {
    let m = network_to_matrix(&config.library, &config.key).unwrap();
    m.column(k).iter().map(|a| a.norm_sqr().powi(2)).sum()
}

/// First keys from a seeded stream whose Z intercept error rate is at least `min_rate`.
fn entangling_sessions(k: usize, count: usize, min_rate: f64) -> Vec<(SessionConfig, f64)> {
    let mut out = Vec::new();
    let mut seed = 1000;
    while out.len() < count {
        let cfg = session(k, 2 * k * k, seed);
        let rate = intercept_resend_z_error_rate(&cfg.library, &cfg.key).unwrap();
        if rate >= min_rate {
            out.push((cfg, rate));
        }
        seed += 1;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bob_always_decodes_without_eve(k in 1usize..=4, seed in any::<u64>()) {
        let cfg = session(k, 2 * k * k, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for block in 0..1usize << k {
            let msg = alice_encode(block, &cfg, block as u64).unwrap();
            prop_assert_eq!(bob_decode(msg, &cfg, &mut rng).unwrap(), block);
        }
    }

    #[test]
    fn passive_sessions_never_abort(k in 1usize..=3, seed in any::<u64>()) {
        let cfg = session(k, 2 * k * k, seed);
        let mut src = PlaintextSource::uniform(k, seed).unwrap();
        let t = run_session(&mut src, 300, &EveStrategy::Passive, &cfg).unwrap();
        prop_assert_eq!(t.decode_errors, 0);
        prop_assert_eq!(t.lost, 0);
        prop_assert_ne!(t.verdict, Verdict::Abort);
    }

    #[test]
    fn encoded_state_is_matrix_column(k in 1usize..=3, block in 0usize..8, seed in any::<u64>()) {
        let block = block % (1 << k);
        let cfg = session(k, 10, seed);
        let m = network_to_matrix(&cfg.library, &cfg.key).unwrap();
        let state = alice_encode(block, &cfg, 0).unwrap().into_state();
        prop_assert!(max_abs_diff(state.amplitudes(), &m.column(block)) < 1e-9);
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Send(u64),
    Intercept(u64),
    Deliver(u64),
    Measure(u64),
}

fn op() -> impl Strategy<Value = Op> {
    (0u64..3, 0u8..4).prop_map(|(s, o)| match o {
        0 => Op::Send(s),
        1 => Op::Intercept(s),
        2 => Op::Deliver(s),
        _ => Op::Measure(s),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Where {
    Unsent,
    InFlight,
    Held,
    Delivered,
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Random interleavings of channel calls never put two copies of a
    /// message into the world, and each message is measured at most once.
    #[test]
    fn channel_never_duplicates_a_message(ops in prop::collection::vec(op(), 1..40)) {
        let mut channel = QuantumChannel::new();
        let mut hand: HashMap<u64, ChannelMessage> = HashMap::new();
        let mut slot: HashMap<u64, Where> = HashMap::new();
        let mut measured: HashMap<u64, usize> = HashMap::new();
        let mut delivered: HashMap<u64, usize> = HashMap::new();
        let mut lost = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);

        for op in ops {
            match op {
                Op::Send(s) => {
                    let state = *slot.get(&s).unwrap_or(&Where::Unsent);
                    let msg = match (state, hand.remove(&s)) {
                        (_, Some(m)) => m,
                        (Where::Unsent, None) => ChannelMessage::prepare(s, PureState::basis(0, 1).unwrap()),
                        _ => continue,
                    };
                    let res = channel.transmit(msg);
                    match state {
                        Where::Unsent | Where::Held => {
                            prop_assert!(res.is_ok());
                            slot.insert(s, Where::InFlight);
                        }
                        _ => prop_assert!(matches!(res, Err(Error::Contract(_)))),
                    }
                }
                Op::Intercept(s) => {
                    let res = channel.intercept(s);
                    if slot.get(&s) == Some(&Where::InFlight) {
                        hand.insert(s, res.unwrap());
                        slot.insert(s, Where::Held);
                    } else {
                        prop_assert!(res.is_err());
                    }
                }
                Op::Deliver(s) => {
                    let res = channel.deliver(s);
                    match slot.get(&s) {
                        Some(Where::InFlight) => {
                            let msg = res.unwrap().expect("in-flight message arrives");
                            *delivered.entry(s).or_default() += 1;
                            *measured.entry(s).or_default() += 1;
                            msg.measure_z(&mut rng);
                            slot.insert(s, Where::Delivered);
                        }
                        Some(Where::Held) => {
                            prop_assert!(res.unwrap().is_none());
                            lost += 1;
                            slot.insert(s, Where::Delivered);
                        }
                        _ => prop_assert!(res.is_err()),
                    }
                }
                Op::Measure(s) => {
                    if let Some(msg) = hand.remove(&s) {
                        *measured.entry(s).or_default() += 1;
                        msg.measure_z(&mut rng);
                    }
                }
            }
            prop_assert_eq!(channel.lost(), lost);
            for s in 0..3 {
                // One copy at most: in the channel or in Eve's hand.
                let in_channel = slot.get(&s) == Some(&Where::InFlight);
                prop_assert!(!(in_channel && hand.contains_key(&s)));
                prop_assert!(*delivered.get(&s).unwrap_or(&0) <= 1);
            }
        }
        for (s, n) in measured {
            prop_assert!(n <= 1, "message {s} measured {n} times");
        }
    }
}

#[test]
fn identical_seeds_give_identical_transcripts() {
    let cfg = session(2, 8, 77);
    let run = || {
        let mut src = PlaintextSource::uniform(2, 5).unwrap();
        run_session(&mut src, 400, &EveStrategy::SampleAndForward, &cfg)
            .unwrap()
            .to_json_lines()
    };
    assert_eq!(run(), run());
}

#[test]
fn z_intercept_survival_matches_amplitude_oracle() {
    const N: usize = 4000;
    for (cfg, _) in entangling_sessions(2, 5, 0.1) {
        for k in 0..4 {
            let p = survival_oracle(&cfg, k);
            let mut src = PlaintextSource::fixed(2, vec![k]).unwrap();
            let t = run_session(&mut src, N, &EveStrategy::InterceptResendZ, &cfg).unwrap();
            let rate = 1.0 - t.decode_error_rate().unwrap();
            assert!(
                (rate - p).abs() <= 4.0 * binomial_sigma(p, N) + 1e-12,
                "block {k}: survival {rate} vs oracle {p}"
            );
        }
    }
}

#[test]
fn intercept_resend_z_aborts_with_expected_error_rate() {
    let sessions = entangling_sessions(3, 20, 0.1);
    for (cfg, expected) in &sessions {
        let mut src = PlaintextSource::uniform(3, cfg.alice_seed).unwrap();
        let t = run_session(&mut src, 1000, &EveStrategy::InterceptResendZ, cfg).unwrap();
        assert_eq!(t.verdict, Verdict::Abort);
        let all = t.decode_error_rate().unwrap();
        assert!((all - expected).abs() <= 4.0 * binomial_sigma(*expected, 1000));
        let checked = t.check_error_rate().unwrap();
        assert!((checked - expected).abs() <= 4.0 * binomial_sigma(*expected, t.checked));
    }
}

#[test]
fn collecting_eve_is_caught_by_loss() {
    let cfg = session(2, 8, 3);
    let mut src = PlaintextSource::uniform(2, 1).unwrap();
    let t = run_session(&mut src, 50, &EveStrategy::CollectForTomography, &cfg).unwrap();
    assert_eq!(t.lost, 50);
    assert_eq!(t.verdict, Verdict::Abort);
    assert!(t.records.iter().all(|r: &MessageRecord| r.k_prime.is_none() && !r.matched));
}

#[test]
fn wrong_guess_resend_is_detected() {
    let cfg = session(2, 8, 21);
    let guess = NetworkKey::new(&cfg.library, vec![0, 14]).unwrap();
    let mut src = PlaintextSource::uniform(2, 1).unwrap();
    let t = run_session(&mut src, 1000, &EveStrategy::InterceptResendGuess { guess }, &cfg).unwrap();
    assert!(t.decode_errors > 0);
    // The true key re-encodes perfectly.
    let mut src = PlaintextSource::uniform(2, 1).unwrap();
    let honest = EveStrategy::InterceptResendGuess { guess: cfg.key.clone() };
    let t = run_session(&mut src, 500, &honest, &cfg).unwrap();
    assert_eq!(t.decode_errors, 0);
}
