//! Run configuration: loading, overrides, validation, and hashing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::advisor::AdvisorConfig;
use crate::radio::RadioParams;
use crate::rewards::RewardConfig;
use crate::trainer::TrainConfig;
use crate::world::ScenarioConfig;

/// The full run configuration file. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub radio: RadioParams,
    #[serde(default)]
    pub rewards: RewardConfig,
    pub training: TrainConfig,
    #[serde(default)]
    pub advisor: AdvisorConfig,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid override '{entry}': {reason}")]
    BadOverride { entry: String, reason: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Load from a TOML file and apply `key=value` overrides in order.
    pub fn load(path: &std::path::Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text, overrides)
    }

    /// Parse from TOML text and apply `key=value` overrides in order.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
        let mut value: toml::Value = text.parse()?;
        for entry in overrides {
            apply_override(&mut value, entry)?;
        }
        let cfg: RunConfig = value.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.radio.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.rewards
            .validate(self.scenario.n_uav, self.scenario.n_bs)
            .map_err(ConfigError::Invalid)?;
        self.training
            .validate(&self.rewards.group_sizes_for(self.scenario.n_uav, self.scenario.n_bs))
            .map_err(ConfigError::Invalid)?;
        self.advisor.validate().map_err(ConfigError::Invalid)?;
        Ok(())
    }

    /// Canonical TOML serialization (used for hashing and manifests).
    pub fn to_canonical_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 hash of the canonical serialization, hex-encoded.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_canonical_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Apply one `dotted.path=value` override to a parsed TOML tree. The value
/// is parsed as TOML (so `7`, `1.5`, `true`, `"text"`, `[1, 2]` all work);
/// bare words fall back to strings.
fn apply_override(root: &mut toml::Value, entry: &str) -> Result<(), ConfigError> {
    let bad = |reason: &str| ConfigError::BadOverride {
        entry: entry.to_string(),
        reason: reason.to_string(),
    };
    let (path, raw) = entry.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let path = path.trim();
    if path.is_empty() {
        return Err(bad("empty key"));
    }
    let parsed: toml::Value = match format!("v = {}", raw.trim()).parse::<toml::Table>() {
        Ok(mut table) => table.remove("v").expect("just inserted"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    };
    let mut node = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| bad("path crosses a non-table value"))?;
        if i + 1 == segments.len() {
            table.insert(seg.to_string(), parsed);
            return Ok(());
        }
        node = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    unreachable!("loop returns on the last segment")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[scenario]
side_length = 1500.0
n_uav = 6
n_ue = 40
n_bs = 1
ue_speed = 5.0
uav_step = 30.0
horizon = 200

[training]
n_episodes = 10
"#;

    #[test]
    fn minimal_config_round_trips() {
        let cfg = RunConfig::from_toml_str(MINIMAL, &[]).unwrap();
        let text = cfg.to_canonical_toml();
        let again = RunConfig::from_toml_str(&text, &[]).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.hash(), again.hash());
    }

    #[test]
    fn overrides_apply_in_order() {
        let cfg = RunConfig::from_toml_str(
            MINIMAL,
            &["training.seed=7".into(), "scenario.n_ue=12".into(), "training.seed=9".into()],
        )
        .unwrap();
        assert_eq!(cfg.training.seed, 9);
        assert_eq!(cfg.scenario.n_ue, 12);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{MINIMAL}\n[scenario.extra]\nx = 1\n");
        assert!(RunConfig::from_toml_str(&text, &[]).is_err());
        let err = RunConfig::from_toml_str(MINIMAL, &["radio.nonsense=1".into()]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "got {err:?}");
    }

    #[test]
    fn invalid_field_is_named() {
        let err =
            RunConfig::from_toml_str(MINIMAL, &["scenario.side_length=0.0".into()]).unwrap_err();
        assert!(err.to_string().contains("side_length"), "{err}");
    }
}
