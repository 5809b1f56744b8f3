use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qucipher_harness::{dispatch, output::emit, HarnessError, Settings};

#[derive(Parser)]
#[command(name = "qucipher", version, about = "Entangled-state block cipher experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form message, work and key-length estimates.
    Estimate(Opts),
    /// Encode and decode every block under random keys.
    Roundtrip(Opts),
    /// Reconstruction error against sample count (CSV).
    TomoScaling(Opts),
    /// Steal the network by tomography and decode fresh traffic.
    TomoAttack(Opts),
    /// Exhaustive network guessing with known plaintexts.
    GuessAttack(Opts),
    /// Network search driven by known source correlations.
    CorrAttack(Opts),
    /// One session against an eavesdropping strategy.
    Detect(Opts),
    /// Write a random key file.
    Keygen(Opts),
}

/// Flags shared by all verbs; each verb reads the ones it needs. Every flag
/// can also be set as `name = value` in the `--config` file.
#[derive(Args, Debug)]
struct Opts {
    /// Flat `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Register size K.
    #[arg(long)]
    qubits: Option<u32>,
    /// Network length M.
    #[arg(long)]
    gates: Option<u64>,
    /// Library size L.
    #[arg(long = "library-size")]
    library_size: Option<u64>,
    /// Target relative error.
    #[arg(long)]
    alpha: Option<f64>,
    /// Samples per reconstructed state.
    #[arg(long)]
    samples: Option<u64>,
    /// Channel bit rate in bit/s.
    #[arg(long)]
    bitrate: Option<f64>,
    /// Prefactor of the full-unitary message estimate.
    #[arg(long)]
    c: Option<f64>,
    /// Prefactor of the per-state message estimate.
    #[arg(long = "const")]
    constant: Option<f64>,
    #[arg(long)]
    keys: Option<u64>,
    #[arg(long)]
    messages: Option<u64>,
    /// passive, resend-z, resend-guess, collect or sample-forward.
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    seeds: Option<u64>,
    /// Comma-separated sample counts.
    #[arg(long = "n-grid")]
    n_grid: Option<String>,
    /// single_shot or frequency.
    #[arg(long)]
    estimator: Option<String>,
    #[arg(long)]
    repeats: Option<u64>,
    #[arg(long = "n-acc")]
    n_acc: Option<u64>,
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Comma-separated correlation lags.
    #[arg(long)]
    lags: Option<String>,
    /// markov or uniform.
    #[arg(long)]
    source: Option<String>,
    /// Write the session transcript (JSON lines) here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    #[arg(long = "key-file")]
    key_file: Option<PathBuf>,
    #[arg(long = "check-fraction")]
    check_fraction: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Largest keyspace an attack may enumerate.
    #[arg(long)]
    cap: Option<u64>,
    /// Intercepted-message budget.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    block: Option<u64>,
    /// Fresh messages decoded after a tomography attack.
    #[arg(long)]
    fresh: Option<u64>,
    /// Decode with a deliberately corrupted key.
    #[arg(long)]
    corrupt: bool,
    /// Use exact quadrature instead of sampling (K = 1).
    #[arg(long)]
    quadrature: bool,
}

impl Opts {
    fn settings(&self) -> Result<Settings, HarnessError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        s.set("seed", self.seed)?;
        s.set("out", self.out.as_ref().map(|p| p.display()))?;
        s.set("qubits", self.qubits)?;
        s.set("gates", self.gates)?;
        s.set("library-size", self.library_size)?;
        s.set("alpha", self.alpha)?;
        s.set("samples", self.samples)?;
        s.set("bitrate", self.bitrate)?;
        s.set("c", self.c)?;
        s.set("const", self.constant)?;
        s.set("keys", self.keys)?;
        s.set("messages", self.messages)?;
        s.set("strategy", self.strategy.as_ref())?;
        s.set("seeds", self.seeds)?;
        s.set("n-grid", self.n_grid.as_ref())?;
        s.set("estimator", self.estimator.as_ref())?;
        s.set("repeats", self.repeats)?;
        s.set("n-acc", self.n_acc)?;
        s.set("window", self.window)?;
        s.set("tau", self.tau)?;
        s.set("lags", self.lags.as_ref())?;
        s.set("source", self.source.as_ref())?;
        s.set("transcript", self.transcript.as_ref().map(|p| p.display()))?;
        s.set("key-file", self.key_file.as_ref().map(|p| p.display()))?;
        s.set("check-fraction", self.check_fraction)?;
        s.set("tolerance", self.tolerance)?;
        s.set("cap", self.cap)?;
        s.set("budget", self.budget)?;
        s.set("block", self.block)?;
        s.set("fresh", self.fresh)?;
        s.set("corrupt", self.corrupt.then_some(true))?;
        s.set("quadrature", self.quadrature.then_some(true))?;
        Ok(s)
    }
}

fn run(verb: &str, opts: &Opts) -> Result<Option<String>, HarnessError> {
    let settings = opts.settings()?;
    let outcome = dispatch(verb, &settings)?;
    let out = settings.raw("out").map(PathBuf::from);
    emit(&outcome.text, out.as_deref())?;
    Ok(outcome.violation)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (verb, opts) = match &cli.command {
        Command::Estimate(o) => ("estimate", o),
        Command::Roundtrip(o) => ("roundtrip", o),
        Command::TomoScaling(o) => ("tomo-scaling", o),
        Command::TomoAttack(o) => ("tomo-attack", o),
        Command::GuessAttack(o) => ("guess-attack", o),
        Command::CorrAttack(o) => ("corr-attack", o),
        Command::Detect(o) => ("detect", o),
        Command::Keygen(o) => ("keygen", o),
    };
    match run(verb, opts) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(violation)) => {
            eprintln!("qucipher {verb}: {violation}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qucipher {verb}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
