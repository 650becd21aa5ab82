//! Flat `key = value` configuration files.
//!
//! One entry per line, `#` starts a comment, keys are lowercase words joined
//! by underscores. Every key must be consumed by the command that reads the
//! file; leftovers are reported as errors so typos do not pass silently.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::arith::{Backend, EscalationPolicy, ExactRational};
use crate::error::{Error, Result};
use crate::spiral::{Corner, SpiralPoint};

/// Parsed key-value pairs, consumed as they are read.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    entries: BTreeMap<String, String>,
}

fn valid_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

impl Params {
    /// Parse configuration text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let key = k.trim().replace('-', "_");
            if !valid_key(&key) {
                return Err(Error::Config(format!("line {}: invalid key `{}`", no + 1, k.trim())));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(Params { entries })
    }

    /// Set or replace a value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.replace('-', "_"), value.into());
    }

    /// Whether a key is present and not yet consumed.
    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Remove and return a raw value.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn take_parsed<T>(&mut self, key: &str, parse: impl FnOnce(&str) -> Result<T>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => parse(&v).map(Some).map_err(|e| Error::Config(format!("{key}: {e}"))),
        }
    }

    /// A string, or the default.
    pub fn string(&mut self, key: &str, default: &str) -> String {
        self.take(key).unwrap_or_else(|| default.to_string())
    }

    /// An unsigned integer, or the default. Accepts `_` separators and `1e4`.
    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self.take_parsed(key, parse_u64)?.unwrap_or(default))
    }

    /// An optional unsigned integer.
    pub fn opt_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take_parsed(key, parse_u64)
    }

    /// A boolean, or the default.
    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        Ok(self
            .take_parsed(key, |v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(Error::Parse(format!("expected true or false, found `{v}`"))),
            })?
            .unwrap_or(default))
    }

    /// A rational such as `1/5` or `0.2`, or the default.
    pub fn rational(&mut self, key: &str, default: &str) -> Result<ExactRational> {
        let v = self.take(key).unwrap_or_else(|| default.to_string());
        ExactRational::parse(&v).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    /// An optional rational.
    pub fn opt_rational(&mut self, key: &str) -> Result<Option<ExactRational>> {
        self.take_parsed(key, ExactRational::parse)
    }

    /// A comma-separated list of rationals, or the default.
    pub fn rationals(&mut self, key: &str, default: &str) -> Result<Vec<ExactRational>> {
        let v = self.take(key).unwrap_or_else(|| default.to_string());
        v.split(',')
            .map(|s| ExactRational::parse(s).map_err(|e| Error::Config(format!("{key}: {e}"))))
            .collect()
    }

    /// A point written as three comma-separated rationals, or the default.
    pub fn point(&mut self, key: &str, default: &str) -> Result<SpiralPoint<ExactRational>> {
        let v = self.take(key).unwrap_or_else(|| default.to_string());
        let parts: Vec<&str> = v.split(',').collect();
        SpiralPoint::parse(&parts).map_err(|e| Error::Config(format!("{key}: {e}")))
    }

    /// A corner name, or the default.
    pub fn corner(&mut self, key: &str, default: Corner) -> Result<Corner> {
        Ok(self.take_parsed(key, Corner::from_str)?.unwrap_or(default))
    }

    /// Fail on keys that were never read.
    pub fn finish(self) -> Result<()> {
        if self.entries.is_empty() {
            return Ok(());
        }
        let keys: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        Err(Error::Config(format!("unknown keys: {}", keys.join(", "))))
    }
}

/// `123`, `10_000` or `1e4`.
pub fn parse_u64(v: &str) -> Result<u64> {
    let t = v.trim().replace('_', "");
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| Error::Parse(format!("invalid integer `{v}`")))?;
        let e: u32 = e.parse().map_err(|_| Error::Parse(format!("invalid integer `{v}`")))?;
        return 10u64
            .checked_pow(e)
            .and_then(|p| p.checked_mul(m))
            .ok_or_else(|| Error::Parse(format!("integer `{v}` out of range")));
    }
    t.parse().map_err(|_| Error::Parse(format!("invalid integer `{v}`")))
}

/// Settings shared by every command.
#[derive(Clone, Debug, PartialEq)]
pub struct Common {
    /// Random seed.
    pub seed: u64,
    /// Arithmetic backend for commands that offer a choice.
    pub backend: Backend,
    /// Precision schedule.
    pub policy: EscalationPolicy,
}

impl Common {
    /// Read `seed`, `backend`, `precision_start` and `precision_cap`.
    pub fn read(p: &mut Params, default_backend: Backend) -> Result<Self> {
        let seed = p.u64("seed", 0)?;
        let backend = match p.take("backend") {
            Some(b) => b.parse().map_err(|e| Error::Config(format!("backend: {e}")))?,
            None => default_backend,
        };
        let d = EscalationPolicy::default();
        let start = p.u64("precision_start", u64::from(d.start_bits))?;
        let cap = p.u64("precision_cap", u64::from(d.cap_bits))?;
        let bits = |v: u64, k: &str| u32::try_from(v).map_err(|_| Error::Config(format!("{k}: too large")));
        let (start, cap) = (bits(start, "precision_start")?, bits(cap, "precision_cap")?);
        if cap < start {
            return Err(Error::Config("precision_cap is below precision_start".into()));
        }
        Ok(Common { seed, backend, policy: EscalationPolicy::new(start, cap) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let mut p = Params::parse("# header\neps = 1/5   # radius\n\nwindow=100\nstart = 0.4, 0.35, 0.25\n").unwrap();
        assert_eq!(p.rational("eps", "1").unwrap(), ExactRational::parse("1/5").unwrap());
        assert_eq!(p.u64("window", 0).unwrap(), 100);
        assert_eq!(p.u64("samples", 7).unwrap(), 7);
        assert_eq!(p.point("start", "1,0,0").unwrap(), SpiralPoint::parse(&["2/5", "7/20", "1/4"]).unwrap());
        p.finish().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Params::parse("eps 1/5").is_err());
        assert!(Params::parse("a = 1\na = 2").is_err());
        assert!(Params::parse("Bad Key = 1").is_err());
        let p = Params::parse("typo = 3").unwrap();
        assert!(matches!(p.finish(), Err(Error::Config(_))));
        let mut p = Params::parse("window = ten").unwrap();
        assert!(p.u64("window", 0).is_err());
    }

    #[test]
    fn integers_accept_exponents() {
        assert_eq!(parse_u64("1e4").unwrap(), 10_000);
        assert_eq!(parse_u64("100_000").unwrap(), 100_000);
        assert!(parse_u64("1e30").is_err());
    }
}
