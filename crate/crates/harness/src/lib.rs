//! Experiment runner behind the `qucipher` command-line tool.
//!
//! Every verb reads a flat `key = value` config merged with flags (flags
//! win), runs deterministically from its seed, and writes a JSON report or
//! a CSV table that embeds the resolved configuration.

pub mod commands;
pub mod error;
pub mod output;
pub mod settings;

pub use commands::Outcome;
pub use error::{HarnessError, Result};
pub use settings::Settings;

/// CLI verbs in the order they are documented.
pub const VERBS: &[&str] = &[
    "estimate",
    "roundtrip",
    "tomo-scaling",
    "tomo-attack",
    "guess-attack",
    "corr-attack",
    "detect",
    "keygen",
];

/// Runs `verb` with resolved settings.
pub fn dispatch(verb: &str, settings: &Settings) -> Result<Outcome> {
    match verb {
        "estimate" => commands::estimate::execute(settings),
        "roundtrip" => commands::roundtrip::execute(settings),
        "tomo-scaling" => commands::tomo::execute_scaling(settings),
        "tomo-attack" => commands::tomo::execute_attack(settings),
        "guess-attack" => commands::attack::execute_guess(settings),
        "corr-attack" => commands::attack::execute_correlation(settings),
        "detect" => commands::detect::execute(settings),
        "keygen" => commands::keygen::execute(settings),
        other => Err(HarnessError::Usage(format!("unknown command `{other}`"))),
    }
}
