use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::MAX_DIM;
use crate::metrics::OptimizerOptions;

/// Environment variable that overrides the configured master seed.
pub const SEED_ENV: &str = "QMETRIC_SEED";

pub const DEFAULT_SEED: u64 = 0x5EED;

/// Settings for a `verify` run.
///
/// `dims` and `samples_per_property` are optional overrides. When absent,
/// every property uses its own budget and dimension set. A sample override
/// applies to every property; a dimension override skips the properties tied
/// to fixed dimensions (the qubit identities, the Bloch positivity check and
/// the worked examples).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub dims: Option<Vec<usize>>,
    pub samples_per_property: Option<usize>,
    pub optimizer: OptimizerOptions,
    pub output_path: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            dims: None,
            samples_per_property: None,
            optimizer: OptimizerOptions::default(),
            output_path: PathBuf::from("report.json"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_property == Some(0) {
            return Err(Error::BadConfig("samples_per_property must be at least 1".into()));
        }
        if let Some(dims) = &self.dims {
            if dims.is_empty() {
                return Err(Error::BadConfig("dims must not be empty".into()));
            }
            if let Some(&d) = dims.iter().find(|&&d| !(2..=MAX_DIM).contains(&d)) {
                return Err(Error::BadConfig(format!(
                    "dimension {d} outside 2..={MAX_DIM}"
                )));
            }
        }
        let opt = &self.optimizer;
        if !(opt.tolerance.is_finite() && opt.tolerance > 0.0) {
            return Err(Error::BadConfig("optimizer tolerance must be positive".into()));
        }
        if opt.max_iterations == 0 {
            return Err(Error::BadConfig("optimizer max_iterations must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies `QMETRIC_SEED` when it is set.
    pub fn with_env_seed(mut self) -> Result<Self> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            self.seed = parse_seed(&raw)?;
        }
        Ok(self)
    }
}

/// Accepts decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(raw: &str) -> Result<u64> {
    let raw = raw.trim();
    let parsed = match raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => raw.parse(),
    };
    parsed.map_err(|_| Error::BadConfig(format!("invalid seed {raw:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.seed, 0x5EED);
        assert_eq!(c.optimizer.restarts, 16);
    }

    #[test]
    fn rejects_bad_budgets() {
        for text in [
            r#"{"samples_per_property": 0}"#,
            r#"{"dims": [1, 2]}"#,
            r#"{"dims": []}"#,
            r#"{"optimizer": {"tolerance": 0.0}}"#,
            r#"{"unknown": 1}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(Error::BadConfig(_))), "{text}");
        }
    }

    #[test]
    fn seeds() {
        assert_eq!(parse_seed("0x5EED").unwrap(), 24301);
        assert_eq!(parse_seed(" 42 ").unwrap(), 42);
        assert!(parse_seed("seed").is_err());
    }
}
