//! Scenario configuration: defaults, key-value config file, `RINGVEIL_*`
//! environment overrides, and command-line flags, in ascending precedence.

use ringveil::SuiteId;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    BadValue { key: &'static str, reason: String },
}

/// Full parameter set of one scenario run.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScenarioConfig {
    pub suite: SuiteIdSer,
    pub tree_height: u32,
    pub vehicles: usize,
    pub rsus: usize,
    pub ring_sizes: Vec<usize>,
    pub batch_sizes: Vec<usize>,
    pub loss: f64,
    pub freshness_window: u64,
    pub seed: u64,
    pub messages_per_vehicle: usize,
    pub revoke_count: usize,
    pub ring_list_size: usize,
}

/// Serialization-friendly wrapper around the suite tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteIdSer(pub SuiteId);

impl Serialize for SuiteIdSer {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.0.name())
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            suite: SuiteIdSer(SuiteId::Bn254),
            tree_height: 8,
            vehicles: 40,
            rsus: 2,
            ring_sizes: vec![5, 10, 20],
            batch_sizes: vec![10, 20],
            loss: 0.0,
            freshness_window: 300,
            seed: 7,
            messages_per_vehicle: 2,
            revoke_count: 4,
            ring_list_size: 100,
        }
    }
}

/// Overrides collected from one source (file, environment, or flags).
#[derive(Debug, Default, Clone)]
pub struct ConfigOverlay {
    pub entries: BTreeMap<String, String>,
}

impl ConfigOverlay {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut entries = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax(idx + 1))?;
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigOverlay { entries })
    }

    /// `RINGVEIL_<KEY>` variables for every config key.
    pub fn from_env() -> Self {
        let mut entries = BTreeMap::new();
        for key in KEYS {
            let var = format!("RINGVEIL_{}", key.to_uppercase());
            if let Ok(value) = std::env::var(&var) {
                entries.insert(key.to_string(), value);
            }
        }
        ConfigOverlay { entries }
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }
}

const KEYS: &[&str] = &[
    "suite",
    "tree_height",
    "vehicles",
    "rsus",
    "ring_sizes",
    "batch_sizes",
    "loss",
    "freshness_window",
    "seed",
    "messages_per_vehicle",
    "revoke_count",
    "ring_list_size",
];

/// Comma list (`2,5,9`) or inclusive range (`2..9`).
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| "bad range start".to_string())?;
        let hi: usize = hi.trim().parse().map_err(|_| "bad range end".to_string())?;
        if lo > hi {
            return Err("range start exceeds end".into());
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad entry `{p}`")))
        .collect()
}

impl ScenarioConfig {
    /// Applies overlays in order of ascending precedence, then validates.
    pub fn resolve(overlays: &[ConfigOverlay]) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        for overlay in overlays {
            for (key, value) in &overlay.entries {
                cfg.apply(key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn bad(key: &'static str, reason: impl Into<String>) -> ConfigError {
            ConfigError::BadValue {
                key,
                reason: reason.into(),
            }
        }
        match key {
            "suite" => {
                self.suite = SuiteIdSer(
                    SuiteId::parse(value).ok_or_else(|| bad("suite", "unknown suite"))?,
                )
            }
            "tree_height" => {
                self.tree_height = value.parse().map_err(|e| bad("tree_height", format!("{e}")))?
            }
            "vehicles" => self.vehicles = value.parse().map_err(|e| bad("vehicles", format!("{e}")))?,
            "rsus" => self.rsus = value.parse().map_err(|e| bad("rsus", format!("{e}")))?,
            "ring_sizes" => self.ring_sizes = parse_sizes(value).map_err(|e| bad("ring_sizes", e))?,
            "batch_sizes" => {
                self.batch_sizes = parse_sizes(value).map_err(|e| bad("batch_sizes", e))?
            }
            "loss" => self.loss = value.parse().map_err(|e| bad("loss", format!("{e}")))?,
            "freshness_window" => {
                self.freshness_window =
                    value.parse().map_err(|e| bad("freshness_window", format!("{e}")))?
            }
            "seed" => self.seed = value.parse().map_err(|e| bad("seed", format!("{e}")))?,
            "messages_per_vehicle" => {
                self.messages_per_vehicle =
                    value.parse().map_err(|e| bad("messages_per_vehicle", format!("{e}")))?
            }
            "revoke_count" => {
                self.revoke_count = value.parse().map_err(|e| bad("revoke_count", format!("{e}")))?
            }
            "ring_list_size" => {
                self.ring_list_size =
                    value.parse().map_err(|e| bad("ring_list_size", format!("{e}")))?
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        fn bad(key: &'static str, reason: &str) -> ConfigError {
            ConfigError::BadValue {
                key,
                reason: reason.into(),
            }
        }
        if self.tree_height == 0 {
            return Err(bad("tree_height", "must be at least 1"));
        }
        if self.vehicles == 0 {
            return Err(bad("vehicles", "must be positive"));
        }
        if self.vehicles > (1usize << self.tree_height.min(62)) {
            return Err(bad("vehicles", "exceeds tree capacity"));
        }
        if self.rsus == 0 {
            return Err(bad("rsus", "must be positive"));
        }
        if self.ring_sizes.is_empty() || self.ring_sizes.iter().any(|&n| n == 0) {
            return Err(bad("ring_sizes", "must be positive and nonempty"));
        }
        if self.batch_sizes.is_empty() || self.batch_sizes.iter().any(|&n| n == 0) {
            return Err(bad("batch_sizes", "must be positive and nonempty"));
        }
        if !(0.0..1.0).contains(&self.loss) {
            return Err(bad("loss", "must lie in [0, 1)"));
        }
        if self.revoke_count >= self.vehicles {
            return Err(bad("revoke_count", "must be below the vehicle count"));
        }
        if self.messages_per_vehicle > 100 {
            return Err(bad(
                "messages_per_vehicle",
                "capped at 100 so a run stays within one key-update epoch",
            ));
        }
        if self.ring_list_size == 0 {
            return Err(bad("ring_list_size", "must be positive"));
        }
        if self.ring_sizes.iter().any(|&n| n > self.ring_list_size) {
            return Err(bad("ring_sizes", "exceeds ring_list_size"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_parsing() {
        let mut file = ConfigOverlay::default();
        file.set("vehicles", "12".into());
        file.set("seed", "100".into());
        let mut flags = ConfigOverlay::default();
        flags.set("seed", "200".into());
        let cfg = ScenarioConfig::resolve(&[file, flags]).unwrap();
        assert_eq!(cfg.vehicles, 12);
        assert_eq!(cfg.seed, 200, "later overlays win");
    }

    #[test]
    fn size_specs() {
        assert_eq!(parse_sizes("2,5,9").unwrap(), vec![2, 5, 9]);
        assert_eq!(parse_sizes("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert!(parse_sizes("6..3").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn validation_rejects_nonsense() {
        let mut o = ConfigOverlay::default();
        o.set("loss", "1.0".into());
        assert!(ScenarioConfig::resolve(&[o]).is_err());

        let mut o = ConfigOverlay::default();
        o.set("vehicles", "0".into());
        assert!(ScenarioConfig::resolve(&[o]).is_err());

        let mut o = ConfigOverlay::default();
        o.set("nonsense_key", "1".into());
        assert!(matches!(
            ScenarioConfig::resolve(&[o]),
            Err(ConfigError::UnknownKey(_))
        ));

        // more vehicles than tree leaves
        let mut o = ConfigOverlay::default();
        o.set("tree_height", "3".into());
        o.set("vehicles", "9".into());
        o.set("revoke_count", "0".into());
        assert!(ScenarioConfig::resolve(&[o]).is_err());
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scenario.cfg");
        std::fs::write(
            &path,
            "# comment\nsuite = bls12-381\nvehicles = 9\nring_sizes = 2..4\n",
        )
        .unwrap();
        let overlay = ConfigOverlay::from_file(&path).unwrap();
        let cfg = ScenarioConfig::resolve(&[overlay]).unwrap();
        assert_eq!(cfg.suite.0, SuiteId::Bls12_381);
        assert_eq!(cfg.vehicles, 9);
        assert_eq!(cfg.ring_sizes, vec![2, 3, 4]);
    }
}
