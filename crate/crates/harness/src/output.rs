//! Report writers. JSON reports carry a `generated_at` line and the resolved
//! configuration; CSV files start with a `#` timestamp line and a `#` config
//! line before the column header. Nothing else depends on the clock.

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::error::{HarnessError, Result};

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize, C: Serialize> {
    generated_at: u64,
    #[serde(flatten)]
    report: &'a R,
    config: &'a C,
}

/// Pretty JSON with a trailing newline.
pub fn render_json<R: Serialize, C: Serialize>(report: &R, config: &C) -> String {
    let env = Envelope {
        generated_at: timestamp(),
        report,
        config,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

/// CSV text: timestamp line, config line, header, rows. Fields must not
/// contain commas.
pub fn render_csv<C: Serialize>(config: &C, header: &[&str], rows: &[Vec<String>], trailer: &[String]) -> String {
    let mut s = format!("# generated_at={}\n", timestamp());
    s.push_str(&format!(
        "# config={}\n",
        serde_json::to_string(config).expect("config serializes")
    ));
    s.push_str(&header.join(","));
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    for line in trailer {
        s.push_str(&format!("# {line}\n"));
    }
    s
}

/// Writes to `path`, or stdout when `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| HarnessError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| HarnessError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Drops the clock-dependent line so two outputs can be compared.
pub fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("generated_at"))
        .collect::<Vec<_>>()
        .join("\n")
}
