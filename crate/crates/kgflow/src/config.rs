use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

const KNOWN_KEYS: &[&str] = &[
    "hamiltonian",
    "hamiltonian_file",
    "order",
    "grid",
    "threads",
    "mode",
    "epsilon_blowup",
    "log_base",
    "output",
    "t",
    "csv",
    "samples_s",
    "samples_t",
    "t_min",
    "t_max",
    "direction",
    "coarse_step",
    "tol",
    "x0",
    "y0",
    "steps",
];

/// Flat `key = value` settings, `#` starts a comment line.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{}`", no + 1, k.trim()));
            }
            let v = v.trim();
            let v = v
                .strip_prefix('"')
                .and_then(|s| s.strip_suffix('"'))
                .unwrap_or(v);
            values.insert(key, v.to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag if given, else the parsed config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_merges() {
        let cfg = ConfigFile::parse("# run\norder = 8\ngrid=20\nhamiltonian = \"cos(2*pi*x)\"\nt-min = -0.5\n").unwrap();
        assert_eq!(cfg.pick::<usize>(None, "order").unwrap(), Some(8));
        assert_eq!(cfg.pick(Some(4usize), "order").unwrap(), Some(4));
        assert_eq!(cfg.raw("hamiltonian"), Some("cos(2*pi*x)"));
        assert_eq!(cfg.pick::<f64>(None, "t_min").unwrap(), Some(-0.5));
        assert_eq!(cfg.pick::<f64>(None, "t").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(ConfigFile::parse("order 8").is_err());
        assert!(ConfigFile::parse("colour = red").is_err());
        let cfg = ConfigFile::parse("order = many").unwrap();
        assert!(cfg.pick::<usize>(None, "order").is_err());
    }
}
