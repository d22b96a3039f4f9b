//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # Gaussian Gram ensemble, |S| = 2
//! ensemble = gram
//! dist = gaussian
//! n = 4096
//! p = 40
//! m = 2
//! reps = 200
//! master_seed = 1
//! slack = 0.25
//! ```
//!
//! Recognised keys: `ensemble, dist, eta, n, p, m, le_m, reps, master_seed,
//! workers, scan_mode, slack`. Anything else is rejected.

use std::fmt;
use std::str::FromStr;

use crate::distributions::EntryDistribution;
use crate::error::{Error, Result};
use crate::minor_scan::ScanMode;

pub const CONFIG_KEYS: [&str; 12] = [
    "ensemble",
    "dist",
    "eta",
    "n",
    "p",
    "m",
    "le_m",
    "reps",
    "master_seed",
    "workers",
    "scan_mode",
    "slack",
];

pub const DEFAULT_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    Gram,
    Wigner,
}

impl Ensemble {
    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Gram => "gram",
            Ensemble::Wigner => "wigner",
        }
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gram" | "wishart" => Ok(Ensemble::Gram),
            "wigner" => Ok(Ensemble::Wigner),
            other => Err(Error::param(format!(
                "unknown ensemble {other:?} (expected gram or wigner)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: Ensemble,
    /// Entry law of `X` (Gram only).
    pub dist: EntryDistribution,
    /// Diagonal variance of the Wigner matrix (Wigner only).
    pub eta: f64,
    /// Rows of `X` (Gram only).
    pub n: usize,
    pub p: usize,
    pub m: usize,
    /// Scan all `|S| ≤ m` instead of `|S| = m`.
    pub le_m: bool,
    pub reps: u64,
    pub master_seed: u64,
    pub workers: usize,
    pub scan_mode: ScanMode,
    /// Coverage tolerance δ: covered means `zT ≤ 1 + δ` and `zV ≥ −1 − δ`.
    pub slack: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ensemble: Ensemble::Gram,
            dist: EntryDistribution::Gaussian,
            eta: 2.0,
            n: 0,
            p: 0,
            m: 0,
            le_m: false,
            reps: 100,
            master_seed: 0,
            workers: 1,
            scan_mode: ScanMode::Exhaustive,
            slack: DEFAULT_SLACK,
        }
    }
}

impl ExperimentConfig {
    pub fn gram(dist: EntryDistribution, n: usize, p: usize, m: usize, reps: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            ensemble: Ensemble::Gram,
            dist,
            n,
            p,
            m,
            reps,
            master_seed,
            ..Default::default()
        }
    }

    pub fn wigner(eta: f64, p: usize, m: usize, reps: u64, master_seed: u64) -> Self {
        ExperimentConfig {
            ensemble: Ensemble::Wigner,
            eta,
            p,
            m,
            reps,
            master_seed,
            ..Default::default()
        }
    }

    /// `η` the envelope is computed with.
    pub fn effective_eta(&self) -> f64 {
        match self.ensemble {
            Ensemble::Gram => self.dist.eta(),
            Ensemble::Wigner => self.eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::param("p must be at least 1"));
        }
        if self.m == 0 || self.m > self.p {
            return Err(Error::param(format!("m = {} must lie in 1..={}", self.m, self.p)));
        }
        if self.ensemble == Ensemble::Gram && self.n == 0 {
            return Err(Error::param("n must be at least 1 for the gram ensemble"));
        }
        if self.ensemble == Ensemble::Wigner && !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::param(format!("eta must be positive, got {}", self.eta)));
        }
        if self.workers == 0 {
            return Err(Error::param("workers must be at least 1"));
        }
        if !(self.slack >= 0.0 && self.slack.is_finite()) {
            return Err(Error::param(format!("slack must be non-negative, got {}", self.slack)));
        }
        Ok(())
    }

    /// `m log p / n > 0.5`: far from the `m = o(n / log p)` regime. Such runs
    /// still execute; the flag is reported alongside the results.
    pub fn outside_asymptotic_regime(&self) -> bool {
        self.ensemble == Ensemble::Gram && self.p >= 2 && self.m as f64 * (self.p as f64).ln() / self.n as f64 > 0.5
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_defaults(text, ExperimentConfig::default())
    }

    /// Parses `text`, taking keys it does not mention from `defaults`.
    pub fn parse_with_defaults(text: &str, defaults: ExperimentConfig) -> Result<Self> {
        let mut cfg = defaults;
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1)));
            }
            if seen.contains(&key) {
                return Err(Error::Parse(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            seen.push(key);
            let bad = |e: &dyn fmt::Display| Error::Parse(format!("line {}: {key}: {e}", lineno + 1));
            match key {
                "ensemble" => cfg.ensemble = value.parse().map_err(|e: Error| bad(&e))?,
                "dist" => cfg.dist = value.parse().map_err(|e: Error| bad(&e))?,
                "eta" => cfg.eta = value.parse().map_err(|e| bad(&e))?,
                "n" => cfg.n = value.parse().map_err(|e| bad(&e))?,
                "p" => cfg.p = value.parse().map_err(|e| bad(&e))?,
                "m" => cfg.m = value.parse().map_err(|e| bad(&e))?,
                "le_m" => cfg.le_m = parse_bool(value).map_err(|e| bad(&e))?,
                "reps" => cfg.reps = value.parse().map_err(|e| bad(&e))?,
                "master_seed" => cfg.master_seed = value.parse().map_err(|e| bad(&e))?,
                "workers" => cfg.workers = value.parse().map_err(|e| bad(&e))?,
                "scan_mode" => cfg.scan_mode = value.parse().map_err(|e: Error| bad(&e))?,
                "slack" => cfg.slack = value.parse().map_err(|e| bad(&e))?,
                _ => unreachable!(),
            }
        }
        for required in ["p", "m"] {
            if !seen.contains(&required) {
                return Err(Error::Parse(format!("missing required key {required:?}")));
            }
        }
        if cfg.ensemble == Ensemble::Gram && !seen.contains(&"n") {
            return Err(Error::Parse("missing required key \"n\" for the gram ensemble".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("expected a boolean, got {other:?}")),
    }
}

impl fmt::Display for ExperimentConfig {
    /// The resolved configuration in the same `key = value` format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ensemble = {}", self.ensemble.name())?;
        writeln!(f, "dist = {}", self.dist)?;
        writeln!(f, "eta = {}", self.eta)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "le_m = {}", self.le_m)?;
        writeln!(f, "reps = {}", self.reps)?;
        writeln!(f, "master_seed = {}", self.master_seed)?;
        writeln!(f, "workers = {}", self.workers)?;
        writeln!(f, "scan_mode = {}", self.scan_mode)?;
        write!(f, "slack = {}", self.slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(
            "ensemble = gram\ndist = laplace # η = 5\neta = 2\nn = 100\np = 10\nm = 2\nle_m = true\n\
             reps = 7\nmaster_seed = 99\nworkers = 3\nscan_mode = pruned\nslack = 0.1\n",
        )
        .unwrap();
        assert_eq!(cfg.dist, EntryDistribution::LaplaceUnit);
        assert!(cfg.le_m);
        assert_eq!(
            (cfg.n, cfg.p, cfg.m, cfg.reps, cfg.master_seed, cfg.workers),
            (100, 10, 2, 7, 99, 3)
        );
        assert_eq!(cfg.scan_mode, ScanMode::Pruned);
        assert_eq!(cfg.slack, 0.1);
    }

    #[test]
    fn display_round_trips() {
        let cfg = ExperimentConfig::wigner(4.0, 30, 2, 11, 5);
        assert_eq!(ExperimentConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_duplicate_and_missing() {
        assert!(ExperimentConfig::parse("p = 3\nm = 1\nn = 4\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::parse("p = 3\np = 4\nm = 1\nn = 4\n").is_err());
        assert!(ExperimentConfig::parse("p = 3\nn = 4\n").is_err());
        assert!(ExperimentConfig::parse("p = 3\nm = 1\n").is_err());
        assert!(ExperimentConfig::parse("p = 3\nm = 4\nn = 4\n").is_err());
        assert!(ExperimentConfig::parse("p = 3\nm = 1\nn = 4\ndist = rademacher\n").is_err());
        assert!(ExperimentConfig::parse("ensemble = wigner\np = 3\nm = 1\neta = 0\n").is_err());
    }

    #[test]
    fn regime_flag() {
        let mut cfg = ExperimentConfig::gram(EntryDistribution::Gaussian, 4096, 40, 2, 1, 0);
        assert!(!cfg.outside_asymptotic_regime());
        cfg.n = 10;
        assert!(cfg.outside_asymptotic_regime());
    }
}
