//! Flat `key = value` configuration merged with command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{HarnessError, Result};

/// Every key a config file may set. Flags use the same names with `--`.
pub const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "bitrate",
    "block",
    "budget",
    "c",
    "cap",
    "check-fraction",
    "const",
    "corrupt",
    "estimator",
    "fresh",
    "gates",
    "key-file",
    "keys",
    "lags",
    "library-size",
    "messages",
    "n-acc",
    "n-grid",
    "out",
    "quadrature",
    "qubits",
    "repeats",
    "samples",
    "seed",
    "seeds",
    "source",
    "strategy",
    "tau",
    "tolerance",
    "transcript",
    "window",
];

/// Resolved string settings: config file first, flags on top.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().to_string();
            check_key(&key)?;
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Sets `key` unless `value` is `None`. Flags go through here, so they win.
    pub fn set(&mut self, key: &str, value: Option<impl Display>) -> Result<()> {
        check_key(key)?;
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.to_string());
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| HarnessError::Usage(format!("bad value `{v}` for {key}: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        let item = item.trim();
                        // Accept `1e5` style integers in grids.
                        item.parse::<T>().or_else(|e| {
                            item.parse::<f64>()
                                .ok()
                                .filter(|f| f.fract() == 0.0)
                                .and_then(|f| format!("{f:.0}").parse::<T>().ok())
                                .ok_or_else(|| HarnessError::Usage(format!("bad item `{item}` in {key}: {e}")))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(other) => Err(HarnessError::Usage(format!("bad boolean `{other}` for {key}"))),
        }
    }
}

fn check_key(key: &str) -> Result<()> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(HarnessError::Usage(format!("unknown setting `{key}`")))
    }
}

/// Positive-value check shared by the commands.
pub fn require_positive<T: PartialOrd + Default + Display>(key: &str, v: T) -> Result<T> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(HarnessError::Usage(format!("{key} must be positive, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_whitespace() {
        let s = Settings::parse("# header\nqubits = 3  # inline\n\n alpha=0.5\n").unwrap();
        assert_eq!(s.get::<usize>("qubits").unwrap(), Some(3));
        assert_eq!(s.get::<f64>("alpha").unwrap(), Some(0.5));
        assert_eq!(s.get::<u64>("seed").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_lines() {
        assert!(matches!(Settings::parse("colour = red"), Err(HarnessError::Usage(_))));
        assert!(matches!(Settings::parse("qubits"), Err(HarnessError::Usage(_))));
    }

    #[test]
    fn flags_override_file() {
        let mut s = Settings::parse("qubits = 3\nseed = 1").unwrap();
        s.set("qubits", Some(5)).unwrap();
        s.set("seed", None::<u64>).unwrap();
        assert_eq!(s.get_or("qubits", 0usize).unwrap(), 5);
        assert_eq!(s.get_or("seed", 0u64).unwrap(), 1);
    }

    #[test]
    fn lists_accept_scientific_integers() {
        let s = Settings::parse("n-grid = 1e2, 1000,1e4").unwrap();
        assert_eq!(s.list::<usize>("n-grid").unwrap(), Some(vec![100, 1000, 10_000]));
        let bad = Settings::parse("n-grid = 1.5").unwrap();
        assert!(bad.list::<usize>("n-grid").is_err());
    }

    #[test]
    fn bad_number_is_usage_error() {
        let s = Settings::parse("qubits = two").unwrap();
        assert!(matches!(s.get::<usize>("qubits"), Err(HarnessError::Usage(_))));
    }
}
