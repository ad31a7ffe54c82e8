//! Application configuration: one TOML file covering thresholds, reward and
//! advantage hyperparameters, surrogate coefficients, split caps, prompt
//! style, and service binding. Every field has a default, so a missing file
//! is a valid (default) configuration.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pepforge_core::grpo::GrpoConfig;
use pepforge_core::properties::{BucketThresholds, SplitCaps, SurrogateCoefficients};
use pepforge_core::reward::RewardConfig;

pub const CONFIG_ENV_VAR: &str = "PEPFORGE_CONFIG";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct AppConfig {
    /// Monomer vocabulary TSV.
    pub vocabulary: PathBuf,
    pub rng_seed: u64,
    pub bind: String,
    pub thresholds: BucketThresholds,
    pub reward: RewardConfig,
    pub grpo: GrpoConfig,
    pub surrogate: SurrogateCoefficients,
    pub splits: SplitCaps,
    pub prompts: PromptConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct PromptConfig {
    pub style: PromptStyleName,
    pub objective: ObjectiveMode,
}

impl Default for PromptConfig {
    fn default() -> Self {
        PromptConfig {
            style: PromptStyleName::Cot,
            objective: ObjectiveMode::All,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyleName {
    Cot,
    NonCot,
    CotOneShot,
}

/// Whether the goal sentence always lists all three properties or only the
/// pair's improved set (falling back to all three when the set is empty).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveMode {
    All,
    Improved,
}

impl Default for AppConfig {
    fn default() -> Self {
        AppConfig {
            vocabulary: PathBuf::from("data/monomers.tsv"),
            rng_seed: 42,
            bind: "127.0.0.1:8080".to_string(),
            thresholds: BucketThresholds::default(),
            reward: RewardConfig::default(),
            grpo: GrpoConfig::default(),
            surrogate: SurrogateCoefficients::default(),
            splits: SplitCaps::default(),
            prompts: PromptConfig::default(),
        }
    }
}

impl AppConfig {
    /// Loads the file when given, falling back to `PEPFORGE_CONFIG`, then to
    /// defaults.
    pub fn load(path: Option<&Path>) -> Result<AppConfig> {
        let chosen: Option<PathBuf> = match path {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from),
        };
        let config = match chosen {
            Some(p) => {
                let text = fs::read_to_string(&p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => AppConfig::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds
            .validate()
            .map_err(anyhow::Error::msg)
            .context("thresholds")?;
        self.reward
            .validate()
            .map_err(anyhow::Error::msg)
            .context("reward")?;
        self.grpo
            .validate()
            .map_err(anyhow::Error::msg)
            .context("grpo")?;
        Ok(())
    }

    /// Hash over the full serialized configuration; any field change changes
    /// the hash.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let config = AppConfig::default();
        assert!(config.validate().is_ok());
    }

    #[test]
    fn hash_changes_with_any_field() {
        let base = AppConfig::default();
        let mut changed = base.clone();
        changed.rng_seed = 43;
        assert_ne!(base.hash(), changed.hash());
        let mut changed = base.clone();
        changed.reward.alpha = 9.0;
        assert_ne!(base.hash(), changed.hash());
        assert_eq!(base.hash(), AppConfig::default().hash());
    }

    #[test]
    fn toml_round_trip() {
        let config = AppConfig::default();
        let text = toml::to_string(&config).unwrap();
        let back: AppConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, back);
    }

    #[test]
    fn partial_toml_fills_defaults() {
        let config: AppConfig = toml::from_str("rng_seed = 7\n[reward]\nalpha = 5.0\n").unwrap();
        assert_eq!(config.rng_seed, 7);
        assert_eq!(config.reward.alpha, 5.0);
        assert_eq!(config.reward.s0, 0.6);
        assert_eq!(config.splits.sft_group_cap, 4000);
    }

    #[test]
    fn reference_config_matches_defaults() {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../config/pepforge.toml");
        let text = std::fs::read_to_string(path).unwrap();
        let config: AppConfig = toml::from_str(&text).unwrap();
        assert_eq!(config, AppConfig::default());
    }
}
