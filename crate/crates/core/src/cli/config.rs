use crate::error::{AdqError, Result};
use crate::quantizer::{GridSpec, WeightSpec};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Settings shared by every subcommand. Loaded from a JSON document, then
/// overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub eta: f64,
    /// truncation N
    pub dim: usize,
    pub weight: String,
    pub weight2: Option<String>,
    pub radial_order: usize,
    pub angular_points: usize,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eta: 2.0,
            dim: 40,
            weight: "perelomov".into(),
            weight2: None,
            radial_order: 64,
            angular_points: 256,
            out: None,
            format: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<RunConfig> {
        serde_json::from_str(s).map_err(|e| AdqError::Invalid(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AdqError::Invalid(format!("config {}: {e}", path.display())))?;
        RunConfig::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.5) {
            return Err(AdqError::Invalid(format!(
                "eta must exceed 1/2, got {}",
                self.eta
            )));
        }
        if !(2..=2000).contains(&self.dim) {
            return Err(AdqError::Invalid(format!(
                "dim must lie in [2, 2000], got {}",
                self.dim
            )));
        }
        if !(4..=4096).contains(&self.radial_order) {
            return Err(AdqError::Invalid(format!(
                "radial order must lie in [4, 4096], got {}",
                self.radial_order
            )));
        }
        if !(8..=65536).contains(&self.angular_points) {
            return Err(AdqError::Invalid(format!(
                "angular points must lie in [8, 65536], got {}",
                self.angular_points
            )));
        }
        self.weight_spec()?;
        self.weight2_spec()?;
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec::new(self.radial_order, self.angular_points)
    }

    pub fn weight_spec(&self) -> Result<WeightSpec> {
        WeightSpec::parse(&self.weight, self.eta)
    }

    /// Reconstruction weight; the analysis weight when unset.
    pub fn weight2_spec(&self) -> Result<WeightSpec> {
        WeightSpec::parse(self.weight2.as_deref().unwrap_or(&self.weight), self.eta)
    }
}
