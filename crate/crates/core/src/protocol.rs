//! Alice/Bob sessions over a simulated quantum channel.
//!
//! Alice encodes block `k` as `U|k⟩`, Bob applies `U⁻¹` and measures along Z.
//! A [`ChannelMessage`] owns its state and exposes no way to read or copy it:
//! the holder can evolve it unitarily or measure it, and measuring consumes
//! it. The [`QuantumChannel`] additionally keeps a per-sequence-number ledger
//! so that no message can be delivered twice or re-sent while in flight.
//!
//! Eavesdropping is detected by check rounds: after Bob has measured, Alice
//! reveals a seeded fraction of the plaintexts and the two compare.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gateset::{apply_network, GateLibrary, NetworkKey};
use crate::linalg::CMatrix;
use crate::qstate::{measure_spins, OutcomeRecord, PureState, SpinDirection};
use crate::source::PlaintextSource;

/// A transmitted state. Not `Clone`.
#[derive(Debug)]
pub struct ChannelMessage {
    seq: u64,
    state: PureState,
}

impl ChannelMessage {
    /// Prepares a message from a classical description of a state.
    pub fn prepare(seq: u64, state: PureState) -> Self {
        Self { seq, state }
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// Runs a gate network on the message.
    pub fn evolve(self, library: &GateLibrary, key: &NetworkKey) -> Result<Self> {
        Ok(Self {
            seq: self.seq,
            state: apply_network(&self.state, library, key)?,
        })
    }

    /// Applies a dense unitary to the message.
    pub fn evolve_unitary(self, u: &CMatrix) -> Result<Self> {
        Ok(Self {
            seq: self.seq,
            state: self.state.apply_unitary(u)?,
        })
    }

    /// Measures every qubit along its direction, destroying the message.
    pub fn measure_spins<R: Rng + ?Sized>(
        self,
        directions: &[SpinDirection],
        rng: &mut R,
    ) -> Result<(OutcomeRecord, PureState)> {
        measure_spins(&self.state, directions, rng)
    }

    /// Measures every qubit along +Z, destroying the message.
    pub fn measure_z<R: Rng + ?Sized>(self, rng: &mut R) -> (usize, PureState) {
        self.state.measure_z(rng)
    }

    /// Destroys the message and hands its state to the simulator. No party
    /// in a session uses this; it exists for analysis and tests.
    pub fn into_state(self) -> PureState {
        self.state
    }
}

#[derive(Debug)]
enum Slot {
    InFlight(ChannelMessage),
    /// Taken off the channel by an interceptor and not (yet) re-sent.
    Held,
    Delivered,
}

/// Ordered channel from Alice to Bob with a consumption ledger.
#[derive(Debug, Default)]
pub struct QuantumChannel {
    slots: BTreeMap<u64, Slot>,
    lost: usize,
}

impl QuantumChannel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Puts a message on the channel. A sequence number may be sent fresh or
    /// re-sent after interception, but never while a message with the same
    /// number is in flight or after delivery.
    pub fn transmit(&mut self, msg: ChannelMessage) -> Result<()> {
        match self.slots.get(&msg.seq) {
            None | Some(Slot::Held) => {
                self.slots.insert(msg.seq, Slot::InFlight(msg));
                Ok(())
            }
            Some(Slot::InFlight(_)) => Err(Error::Contract(format!(
                "a second message with sequence number {} would duplicate one in flight",
                msg.seq
            ))),
            Some(Slot::Delivered) => Err(Error::Contract(format!(
                "message {} was already delivered",
                msg.seq
            ))),
        }
    }

    /// Takes an in-flight message off the channel.
    pub fn intercept(&mut self, seq: u64) -> Result<ChannelMessage> {
        match self.slots.remove(&seq) {
            Some(Slot::InFlight(msg)) => {
                self.slots.insert(seq, Slot::Held);
                Ok(msg)
            }
            Some(other) => {
                self.slots.insert(seq, other);
                Err(Error::Contract(format!("message {seq} is not in flight")))
            }
            None => Err(Error::Contract(format!("message {seq} was never sent"))),
        }
    }

    /// Hands message `seq` to the receiver. `Ok(None)` means the message was
    /// intercepted and never re-sent; it is counted as lost.
    pub fn deliver(&mut self, seq: u64) -> Result<Option<ChannelMessage>> {
        match self.slots.remove(&seq) {
            Some(Slot::InFlight(msg)) => {
                self.slots.insert(seq, Slot::Delivered);
                Ok(Some(msg))
            }
            Some(Slot::Held) => {
                self.slots.insert(seq, Slot::Delivered);
                self.lost += 1;
                Ok(None)
            }
            Some(Slot::Delivered) => {
                self.slots.insert(seq, Slot::Delivered);
                Err(Error::Contract(format!("message {seq} was already delivered")))
            }
            None => Err(Error::Contract(format!("message {seq} was never sent"))),
        }
    }

    pub fn lost(&self) -> usize {
        self.lost
    }
}

/// Everything a session needs; all randomness comes from the three seeds.
#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub library: GateLibrary,
    pub key: NetworkKey,
    /// Fraction of rounds revealed for comparison after Bob measures.
    pub check_fraction: f64,
    /// Largest tolerated check-round error rate.
    pub error_tolerance: f64,
    pub alice_seed: u64,
    pub bob_seed: u64,
    pub eve_seed: u64,
}

impl SessionConfig {
    pub fn new(library: GateLibrary, key: NetworkKey) -> Self {
        Self {
            library,
            key,
            check_fraction: 0.1,
            error_tolerance: 0.0,
            alice_seed: 1,
            bob_seed: 2,
            eve_seed: 3,
        }
    }

    pub fn with_seeds(mut self, alice: u64, bob: u64, eve: u64) -> Self {
        self.alice_seed = alice;
        self.bob_seed = bob;
        self.eve_seed = eve;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.library.num_qubits()
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.check_fraction) {
            return Err(Error::Domain(format!("check fraction {} outside [0, 1]", self.check_fraction)));
        }
        if !(self.error_tolerance >= 0.0) {
            return Err(Error::Domain("error tolerance must be non-negative".into()));
        }
        if self.key.library_fingerprint() != self.library.fingerprint() {
            return Err(Error::Key("session key does not belong to the session library".into()));
        }
        Ok(())
    }
}

/// The sender: encodes blocks and numbers messages.
#[derive(Debug)]
pub struct Alice<'a> {
    config: &'a SessionConfig,
    next_seq: u64,
}

impl<'a> Alice<'a> {
    pub fn new(config: &'a SessionConfig) -> Self {
        Self { config, next_seq: 0 }
    }

    /// `U|k⟩` with a fresh sequence number.
    pub fn encode(&mut self, k: usize) -> Result<ChannelMessage> {
        let msg = alice_encode(k, self.config, self.next_seq)?;
        self.next_seq += 1;
        Ok(msg)
    }
}

/// `U|k⟩` as message number `seq`.
pub fn alice_encode(k: usize, config: &SessionConfig, seq: u64) -> Result<ChannelMessage> {
    let basis = PureState::basis(k, config.num_qubits())?;
    Ok(ChannelMessage::prepare(seq, apply_network(&basis, &config.library, &config.key)?))
}

/// Applies `U⁻¹`, measures along Z and reads off the block value.
pub fn bob_decode<R: Rng + ?Sized>(msg: ChannelMessage, config: &SessionConfig, rng: &mut R) -> Result<usize> {
    let inverse = config.key.inverse(&config.library)?;
    let (k, _) = msg.evolve(&config.library, &inverse)?.measure_z(rng);
    Ok(k)
}

/// Registered eavesdropper behaviours.
#[derive(Debug, Clone, PartialEq)]
pub enum EveStrategy {
    /// Leaves the channel alone.
    Passive,
    /// Measures every message along Z and re-sends the collapsed state.
    InterceptResendZ,
    /// Decodes with a guessed network, then re-encodes the result with it.
    InterceptResendGuess { guess: NetworkKey },
    /// Measures along random directions for tomography and sends nothing on.
    CollectForTomography,
    /// Measures along random directions and re-sends the collapsed state.
    SampleAndForward,
}

impl EveStrategy {
    pub fn tag(&self) -> &'static str {
        match self {
            EveStrategy::Passive => "passive",
            EveStrategy::InterceptResendZ => "resend-z",
            EveStrategy::InterceptResendGuess { .. } => "resend-guess",
            EveStrategy::CollectForTomography => "collect",
            EveStrategy::SampleAndForward => "sample-forward",
        }
    }

    /// Parses a tag; `resend-guess` needs a key and is built directly.
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "passive" => Some(EveStrategy::Passive),
            "resend-z" => Some(EveStrategy::InterceptResendZ),
            "collect" => Some(EveStrategy::CollectForTomography),
            "sample-forward" => Some(EveStrategy::SampleAndForward),
            _ => None,
        }
    }

    fn act<R: Rng + ?Sized>(
        &self,
        channel: &mut QuantumChannel,
        seq: u64,
        config: &SessionConfig,
        rng: &mut R,
    ) -> Result<()> {
        let k = config.num_qubits();
        match self {
            EveStrategy::Passive => {}
            EveStrategy::InterceptResendZ => {
                let msg = channel.intercept(seq)?;
                let (_, collapsed) = msg.measure_z(rng);
                channel.transmit(ChannelMessage::prepare(seq, collapsed))?;
            }
            EveStrategy::InterceptResendGuess { guess } => {
                let inverse = guess.inverse(&config.library)?;
                let msg = channel.intercept(seq)?;
                let (guessed, _) = msg.evolve(&config.library, &inverse)?.measure_z(rng);
                let resent = ChannelMessage::prepare(seq, PureState::basis(guessed, k)?)
                    .evolve(&config.library, guess)?;
                channel.transmit(resent)?;
            }
            EveStrategy::CollectForTomography => {
                let dirs: Vec<_> = (0..k).map(|_| SpinDirection::random(rng)).collect();
                channel.intercept(seq)?.measure_spins(&dirs, rng)?;
            }
            EveStrategy::SampleAndForward => {
                let dirs: Vec<_> = (0..k).map(|_| SpinDirection::random(rng)).collect();
                let (_, collapsed) = channel.intercept(seq)?.measure_spins(&dirs, rng)?;
                channel.transmit(ChannelMessage::prepare(seq, collapsed))?;
            }
        }
        Ok(())
    }
}

/// One line of the session transcript.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MessageRecord {
    pub seq: u64,
    pub k: usize,
    pub check: bool,
    pub eve: String,
    /// `None` when the message never reached Bob.
    pub k_prime: Option<usize>,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Clean,
    Abort,
    /// No check rounds and no losses: nothing to decide on.
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Clean => "clean",
            Verdict::Abort => "abort",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptSummary {
    pub verdict: Verdict,
    pub checked: usize,
    pub errors: usize,
    pub lost: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub records: Vec<MessageRecord>,
    /// Number of check rounds.
    pub checked: usize,
    /// Check rounds where Bob's block differed from Alice's.
    pub check_errors: usize,
    /// All delivered rounds where Bob's block differed from Alice's.
    pub decode_errors: usize,
    pub lost: usize,
    pub verdict: Verdict,
}

impl SessionTranscript {
    pub fn check_error_rate(&self) -> Option<f64> {
        (self.checked > 0).then(|| self.check_errors as f64 / self.checked as f64)
    }

    /// Mismatch rate over every delivered message, checked or not.
    pub fn decode_error_rate(&self) -> Option<f64> {
        let delivered = self.records.len() - self.lost;
        (delivered > 0).then(|| self.decode_errors as f64 / delivered as f64)
    }

    pub fn summary(&self) -> TranscriptSummary {
        TranscriptSummary {
            verdict: self.verdict,
            checked: self.checked,
            errors: self.check_errors,
            lost: self.lost,
        }
    }

    /// One JSON object per message, then a summary line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary()).expect("summary serializes"));
        out.push('\n');
        out
    }
}

/// Abort iff any message was lost or the check error rate exceeds `tolerance`.
pub fn detect_eavesdropping(transcript: &SessionTranscript, tolerance: f64) -> Verdict {
    if transcript.lost > 0 {
        return Verdict::Abort;
    }
    match transcript.check_error_rate() {
        None => Verdict::Indeterminate,
        Some(rate) if rate > tolerance => Verdict::Abort,
        Some(_) => Verdict::Clean,
    }
}

/// Streams `messages` blocks from `source` through Eve to Bob.
pub fn run_session(
    source: &mut PlaintextSource,
    messages: usize,
    eve: &EveStrategy,
    config: &SessionConfig,
) -> Result<SessionTranscript> {
    config.validate()?;
    if source.num_qubits() != config.num_qubits() {
        return Err(Error::Domain("plaintext source and library disagree on K".into()));
    }
    let mut alice_rng = ChaCha8Rng::seed_from_u64(config.alice_seed);
    let mut bob_rng = ChaCha8Rng::seed_from_u64(config.bob_seed);
    let mut eve_rng = ChaCha8Rng::seed_from_u64(config.eve_seed);
    let inverse = config.key.inverse(&config.library)?;

    let mut alice = Alice::new(config);
    let mut channel = QuantumChannel::new();
    let mut records = Vec::with_capacity(messages);
    let (mut checked, mut check_errors, mut decode_errors) = (0, 0, 0);

    for _ in 0..messages {
        let k = source.next_block();
        let msg = alice.encode(k)?;
        let seq = msg.seq();
        channel.transmit(msg)?;
        eve.act(&mut channel, seq, config, &mut eve_rng)?;

        let k_prime = match channel.deliver(seq)? {
            Some(msg) => Some(msg.evolve(&config.library, &inverse)?.measure_z(&mut bob_rng).0),
            None => None,
        };
        // Decided after Bob's measurement.
        let check = alice_rng.random::<f64>() < config.check_fraction;
        let matched = k_prime == Some(k);
        if k_prime.is_some() && !matched {
            decode_errors += 1;
        }
        if check && k_prime.is_some() {
            checked += 1;
            if !matched {
                check_errors += 1;
            }
        }
        records.push(MessageRecord {
            seq,
            k,
            check,
            eve: eve.tag().to_string(),
            k_prime,
            matched,
        });
    }

    let mut transcript = SessionTranscript {
        records,
        checked,
        check_errors,
        decode_errors,
        lost: channel.lost(),
        verdict: Verdict::Indeterminate,
    };
    transcript.verdict = detect_eavesdropping(&transcript, config.error_tolerance);
    Ok(transcript)
}

/// Expected Bob error rate under Z-basis intercept-resend with uniform
/// plaintexts: `1 − mean_k Σ_j |⟨j|U|k⟩|⁴`.
pub fn intercept_resend_z_error_rate(library: &GateLibrary, key: &NetworkKey) -> Result<f64> {
    let k = library.num_qubits();
    let dim = 1usize << k;
    let mut survive = 0.0;
    for block in 0..dim {
        let psi = apply_network(&PureState::basis(block, k)?, library, key)?;
        survive += psi.amplitudes().iter().map(|a| a.norm_sqr().powi(2)).sum::<f64>();
    }
    Ok(1.0 - survive / dim as f64)
}

/// Something that hands Eve intercepted messages.
pub trait MessageSource {
    fn next_message(&mut self) -> Option<ChannelMessage>;

    fn num_qubits(&self) -> usize;
}

/// Something that hands Eve intercepted messages together with their plaintext.
pub trait KnownPlaintextOracle {
    fn next_pair(&mut self) -> Option<(ChannelMessage, usize)>;
}

/// Eve's tap on Alice's traffic, with an optional message budget.
#[derive(Debug)]
pub struct TrafficTap<'a> {
    alice: Alice<'a>,
    source: PlaintextSource,
    remaining: Option<usize>,
    consumed: usize,
}

impl<'a> TrafficTap<'a> {
    pub fn new(config: &'a SessionConfig, source: PlaintextSource) -> Self {
        Self {
            alice: Alice::new(config),
            source,
            remaining: None,
            consumed: 0,
        }
    }

    /// Every message carries block `k` (known plaintext).
    pub fn repeating(config: &'a SessionConfig, k: usize) -> Result<Self> {
        Ok(Self::new(config, PlaintextSource::fixed(config.num_qubits(), vec![k])?))
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.remaining = Some(budget);
        self
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    fn pull(&mut self) -> Option<(ChannelMessage, usize)> {
        if let Some(rem) = self.remaining.as_mut() {
            if *rem == 0 {
                return None;
            }
            *rem -= 1;
        }
        let k = self.source.next_block();
        let msg = self.alice.encode(k).expect("block from a source of matching width");
        self.consumed += 1;
        Some((msg, k))
    }
}

impl MessageSource for TrafficTap<'_> {
    fn next_message(&mut self) -> Option<ChannelMessage> {
        self.pull().map(|(msg, _)| msg)
    }

    fn num_qubits(&self) -> usize {
        self.source.num_qubits()
    }
}

impl KnownPlaintextOracle for TrafficTap<'_> {
    fn next_pair(&mut self) -> Option<(ChannelMessage, usize)> {
        self.pull()
    }
}
