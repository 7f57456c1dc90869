use std::path::Path;

use serde::{Deserialize, Serialize};

use super::nonlinearity::NonlinearitySpec;
use super::params::ModelParams;
use crate::error::Result;
use crate::scalar::Real;

/// Model block of a JSON configuration:
///
/// ```json
/// { "model": { "mass": 1.0, "xi": {"1": 0.001}, "grid_n": 256,
///              "truncation": {"j_max": 32, "k_max": 8, "d_max": 3} },
///   "nonlinearity": { "leading": true, "hot": [] } }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ModelConfig<T: Real> {
    pub model: ModelParams<T>,
    #[serde(default)]
    pub nonlinearity: NonlinearitySpec<T>,
}

impl<T: Real> ModelConfig<T> {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(p: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(p)?)
    }
}
