//! `key=value` configuration files and value resolution.
//!
//! A value is taken from the command line if given, otherwise from the
//! config file, otherwise from the built-in default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Keys accepted in a config file; each mirrors a long flag.
pub const KNOWN_KEYS: &[&str] = &[
    "N", "theta", "m", "llogl", "gamma", "amp", "coef", "mode", "rmin", "inner", "M", "grading", "method",
    "max-iter", "tol", "damping", "schedule", "ids", "k-list", "strict", "seed", "samples", "rho", "window",
    "q-range", "refinements", "grid", "m-min", "m-max", "format", "report", "out",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("config line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().trim_start_matches("--");
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Input(format!("config line {}: unknown key `{key}`", lineno + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag, then file, then default.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.resolve_opt(flag, key)?.unwrap_or(default))
    }

    pub fn resolve_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| Error::Input(format!("config key `{key}`: {e}"))),
        }
    }

    /// Boolean switches: set by the flag or by `key=true` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.resolve_opt::<bool>(None, key).map(|v| v.unwrap_or(false))
    }
}

/// Comma separated list, e.g. `1,2,4`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.trim().is_empty() {
            return Ok(List(Vec::new()));
        }
        s.split(',')
            .map(|item| item.trim().parse::<T>().map_err(|e| format!("`{}`: {e}", item.trim())))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(List)
    }
}

/// Exactly two comma separated values.
pub fn pair(list: &List<f64>, what: &str) -> Result<(f64, f64)> {
    match list.0.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(Error::Input(format!("{what} needs two comma separated values"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_parsing() {
        let cfg = ConfigFile::parse("# sweep\ntheta = 0.5\nk-list=1,2\nstrict=true\n\n").unwrap();
        assert_eq!(cfg.resolve(Some(0.25), "theta", 0.75).unwrap(), 0.25);
        assert_eq!(cfg.resolve(None, "theta", 0.75).unwrap(), 0.5);
        assert_eq!(cfg.resolve(None, "gamma", 2.4).unwrap(), 2.4);
        let k: List<f64> = cfg.resolve(None, "k-list", List(vec![])).unwrap();
        assert_eq!(k.0, vec![1.0, 2.0]);
        assert!(cfg.switch(false, "strict").unwrap());
        assert!(!cfg.switch(false, "llogl").unwrap());
    }

    #[test]
    fn rejects_garbage() {
        assert!(ConfigFile::parse("colour=blue").is_err());
        assert!(ConfigFile::parse("theta").is_err());
        let cfg = ConfigFile::parse("theta=abc").unwrap();
        assert!(cfg.resolve::<f64>(None, "theta", 0.0).is_err());
        assert!("1,x".parse::<List<f64>>().is_err());
        assert!(pair(&List(vec![1.0]), "window").is_err());
    }
}
