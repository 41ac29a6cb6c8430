//! Key=value config files with CLI override.
//!
//! A config file supplies defaults for a subcommand's flags by long
//! name; values given on the command line win. Unknown keys are
//! rejected so typos cannot silently change a run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

/// Parsed config file; keys are consumed as flags resolve.
#[derive(Debug, Default)]
pub struct FileConfig {
    map: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config line {}: expected key = value, got {raw:?}",
                    lineno + 1
                ));
            };
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(format!("config line {}: duplicate key {key}", lineno + 1));
            }
        }
        Ok(Self { map })
    }

    /// Typed lookup, consuming the key.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("config key {key}: bad value {raw:?} ({e})")),
        }
    }

    /// Raw lookup, consuming the key (for values with custom parsers).
    pub fn take_raw(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    /// Errors if any keys were never consumed by the subcommand.
    pub fn ensure_empty(&self) -> Result<(), String> {
        if self.map.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.map.keys().map(String::as_str).collect();
            Err(format!("unknown config keys: {}", keys.join(", ")))
        }
    }
}

/// CLI value if present, else config value, else the default.
pub fn pick<T: FromStr>(
    cli: Option<T>,
    cfg: &mut FileConfig,
    key: &str,
    default: T,
) -> Result<T, String>
where
    T::Err: Display,
{
    match cli {
        Some(v) => {
            cfg.take_raw(key); // CLI overrides; drop the config entry
            Ok(v)
        }
        None => Ok(cfg.take::<T>(key)?.unwrap_or(default)),
    }
}

/// As [`pick`] but without a default: the flag must come from somewhere.
pub fn pick_required<T: FromStr>(
    cli: Option<T>,
    cfg: &mut FileConfig,
    key: &str,
) -> Result<T, String>
where
    T::Err: Display,
{
    match cli {
        Some(v) => {
            cfg.take_raw(key);
            Ok(v)
        }
        None => cfg
            .take::<T>(key)?
            .ok_or_else(|| format!("missing required flag --{key}")),
    }
}

/// As [`pick`] for string-typed flags with custom downstream parsing.
pub fn pick_string(
    cli: Option<String>,
    cfg: &mut FileConfig,
    key: &str,
    default: &str,
) -> String {
    match cli {
        Some(v) => {
            cfg.take_raw(key);
            v
        }
        None => cfg.take_raw(key).unwrap_or_else(|| default.to_string()),
    }
}

/// Optional string flag (no default).
pub fn pick_string_opt(
    cli: Option<String>,
    cfg: &mut FileConfig,
    key: &str,
) -> Option<String> {
    match cli {
        Some(v) => {
            cfg.take_raw(key);
            Some(v)
        }
        None => cfg.take_raw(key),
    }
}
