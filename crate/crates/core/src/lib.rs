//! Simulation of a block cipher that hides plaintext in entangled register
//! states.
//!
//! Alice prepares the computational basis state `|k⟩` for a `K`-bit block,
//! runs it through a secret gate network `U` and sends the register. Bob,
//! who shares the network, applies `U⁻¹` and reads `k` back with a Z-basis
//! measurement. Messages cannot be copied, so an eavesdropper has to
//! measure them and disturbs what Bob sees.
//!
//! ```
//! use qucipher::{bob_decode, alice_encode, GateLibrary, NetworkKey, SessionConfig};
//! use rand::SeedableRng;
//!
//! let library = GateLibrary::default_for(2)?;
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let key = NetworkKey::random(&library, 8, &mut rng)?;
//! let config = SessionConfig::new(library, key);
//!
//! let msg = alice_encode(2, &config, 0)?;
//! assert_eq!(bob_decode(msg, &config, &mut rng)?, 2);
//! # Ok::<(), qucipher::Error>(())
//! ```
//!
//! The modules follow the life of a message: [`qstate`] and [`linalg`] hold
//! the register simulation, [`gateset`] the keys, [`protocol`] the channel
//! and session, [`tomography`] and [`attacks`] what an eavesdropper can do
//! with intercepted traffic.

pub mod attacks;
pub mod eigen;
pub mod error;
pub mod gateset;
pub mod linalg;
pub mod protocol;
pub mod qstate;
pub mod source;
pub mod tomography;

pub use error::{Error, Result};
pub use gateset::{
    apply_network, deserialize_key, inverse_key, network_to_matrix, read_key_file, serialize_key, write_key_file,
    GateKind, GateLibrary, GateSpec, KeyBits, NetworkKey,
};
pub use linalg::{CMatrix, C64};
pub use protocol::{
    alice_encode, bob_decode, detect_eavesdropping, run_session, ChannelMessage, EveStrategy, KnownPlaintextOracle,
    MessageSource, QuantumChannel, SessionConfig, SessionTranscript, TrafficTap, Verdict,
};
pub use qstate::{measure_spins, DensityMatrix, OutcomeRecord, PureState, Spin, SpinDirection};
pub use source::{markov_source, PlaintextBlock, PlaintextSource, TransitionMatrix};

// Book chapters are compiled as doctests so their listings stay runnable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/registers.md")]
    mod registers {}
    #[doc = include_str!("../../../book/src/keys.md")]
    mod keys {}
    #[doc = include_str!("../../../book/src/sessions.md")]
    mod sessions {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
