//! `key = value` run configuration, overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

use crate::UsageError;

#[derive(Debug, Default)]
pub struct Resolver {
    file: BTreeMap<String, String>,
    effective: BTreeMap<String, String>,
}

impl Resolver {
    pub fn from_file(path: Option<&Path>) -> Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    bail!(UsageError(format!(
                        "{}:{}: expected `key = value`",
                        path.display(),
                        n + 1
                    )));
                };
                file.insert(k.trim().replace('_', "-"), v.trim().to_string());
            }
        }
        Ok(Resolver {
            file,
            effective: BTreeMap::new(),
        })
    }

    /// Flag value, else config-file value, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|e| UsageError(format!("config key `{key}`: {e}")))?,
                None => default,
            },
        };
        self.effective.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Like [`Resolver::get`] without a default.
    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(raw) => Some(
                    raw.parse()
                        .map_err(|e| UsageError(format!("config key `{key}`: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.effective.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn record(&mut self, key: &str, value: impl Display) {
        self.effective.insert(key.to_string(), value.to_string());
    }

    /// Rejects config-file keys that no parameter consumed.
    pub fn check_unused(&self) -> Result<()> {
        let unused: Vec<&String> = self
            .file
            .keys()
            .filter(|k| !self.effective.contains_key(*k))
            .collect();
        if !unused.is_empty() {
            bail!(UsageError(format!("unknown config keys: {unused:?}")));
        }
        Ok(())
    }

    pub fn echo(&self) -> Vec<(String, String)> {
        self.effective
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.conf");
        std::fs::write(&p, "# comment\nw = 40\nheight = 2.5\n").unwrap();
        let mut r = Resolver::from_file(Some(&p)).unwrap();
        assert_eq!(r.get("w", None, 30usize).unwrap(), 40);
        assert_eq!(r.get("height", Some(1.0), 1.5).unwrap(), 1.0);
        assert_eq!(r.get("lambda", None, 0.3).unwrap(), 0.3);
        assert!(r.check_unused().is_ok());
        assert_eq!(r.echo()[0], ("height".to_string(), "1".to_string()));
    }

    #[test]
    fn bad_lines_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.conf");
        std::fs::write(&p, "w 30\n").unwrap();
        assert!(Resolver::from_file(Some(&p)).is_err());
        std::fs::write(&p, "bogus = 1\n").unwrap();
        let r = Resolver::from_file(Some(&p)).unwrap();
        assert!(r.check_unused().is_err());
    }
}
