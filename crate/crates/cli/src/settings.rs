//! Option resolution: command-line flags, then a `key = value` config
//! file, then built-in defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys accepted in a config file, matching the long flag names.
pub const KEYS: &[&str] = &[
    "function",
    "method",
    "methods",
    "points",
    "precision",
    "tol",
    "max-iter",
    "root-hint",
    "output",
    "s",
    "n-max",
];

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
    }

    /// Blank lines and lines starting with `#` are ignored; keys may be
    /// written with `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key {key:?}", n + 1));
            }
            let value = value.trim().trim_matches('"').to_string();
            values.insert(key, value);
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// `flag`, else the config value for `key` parsed as `T`, else `None`.
pub fn pick<T>(flag: Option<T>, config: &ConfigFile, key: &str) -> Result<Option<T>, CliError>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    config
        .get(key)
        .map(|raw| {
            raw.parse::<T>()
                .map_err(|e| CliError::Input(format!("config key {key}: {e}")))
        })
        .transpose()
}

/// Splits a comma-separated list, dropping empty entries.
pub fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg =
            ConfigFile::parse("# comment\nfunction = x^2 - 2\n\nmax_iter=7\npoints=\"1,2\"\n")
                .unwrap();
        assert_eq!(cfg.get("function"), Some("x^2 - 2"));
        assert_eq!(cfg.get("max-iter"), Some("7"));
        assert_eq!(cfg.get("points"), Some("1,2"));
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("just words").is_err());
    }

    #[test]
    fn flags_win_over_config() {
        let cfg = ConfigFile::parse("precision = 50").unwrap();
        assert_eq!(pick(Some(80u32), &cfg, "precision").unwrap(), Some(80));
        assert_eq!(pick(None::<u32>, &cfg, "precision").unwrap(), Some(50));
        assert_eq!(pick(None::<u32>, &cfg, "tol").unwrap(), None);
        let bad = ConfigFile::parse("precision = lots").unwrap();
        assert!(pick(None::<u32>, &bad, "precision").is_err());
    }

    #[test]
    fn list_splitting() {
        assert_eq!(split_list("1.7, 1.6,,1.5 "), ["1.7", "1.6", "1.5"]);
    }
}
