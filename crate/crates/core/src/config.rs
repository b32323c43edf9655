//! JSON run configuration with calibrated defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::experiment::{Apparatus, MeasurementSetting};
use crate::montecarlo::RateModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DelayScanConfig {
    pub delays_fs: Vec<f64>,
    pub time_per_point_s: f64,
}

impl Default for DelayScanConfig {
    fn default() -> Self {
        DelayScanConfig { delays_fs: (-11..=11).map(|i| i as f64 * 150.0).collect(), time_per_point_s: 24_000.0 }
    }
}

/// Four-fold events to collect for a CHSH test on photons 1 and 4.
///
/// 10⁶ events is the planning figure used for the default estimate; at the
/// default signal rate it takes about a year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellTestConfig {
    pub target_events: u64,
}

impl Default for BellTestConfig {
    fn default() -> Self {
        BellTestConfig { target_events: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "Apparatus::four_photon_ghz")]
    pub apparatus: Apparatus<f64>,
    #[serde(default)]
    pub rates: RateModel,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_time")]
    pub integration_time_s: f64,
    /// Replaces the scenario's analyzer setting when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<MeasurementSetting<f64>>,
    #[serde(default)]
    pub delay_scan: DelayScanConfig,
    #[serde(default)]
    pub bell_test: BellTestConfig,
}

fn default_seed() -> u64 {
    2001
}

fn default_time() -> f64 {
    6000.0
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            apparatus: Apparatus::four_photon_ghz(),
            rates: RateModel::default(),
            seed: default_seed(),
            integration_time_s: default_time(),
            setting: None,
            delay_scan: DelayScanConfig::default(),
            bell_test: BellTestConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    #[error("{key}: {message}")]
    Invalid { key: &'static str, message: String },
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key, e: crate::Error| ConfigError::Invalid { key, message: e.to_string() };
        self.apparatus.validate().map_err(|e| invalid("apparatus", e))?;
        self.rates.validate().map_err(|e| invalid("rates", e))?;
        if let Some(s) = &self.setting {
            s.angles_for(&self.apparatus).map_err(|e| invalid("setting", e))?;
        }
        if !(self.integration_time_s.is_finite() && self.integration_time_s >= 0.0) {
            return Err(ConfigError::Invalid {
                key: "integration_time_s",
                message: "must be a non-negative number".into(),
            });
        }
        let scan = &self.delay_scan;
        if scan.delays_fs.iter().any(|d| !d.is_finite()) {
            return Err(ConfigError::Invalid { key: "delay_scan.delays_fs", message: "delays must be finite".into() });
        }
        if !(scan.time_per_point_s.is_finite() && scan.time_per_point_s >= 0.0) {
            return Err(ConfigError::Invalid {
                key: "delay_scan.time_per_point_s",
                message: "must be a non-negative number".into(),
            });
        }
        Ok(())
    }
}
