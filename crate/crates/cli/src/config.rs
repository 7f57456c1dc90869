//! JSON experiment configuration. Every block is optional and falls back to
//! its defaults; unknown keys are rejected.

use std::path::Path;

use anyhow::Result;
use dnlw_kam::dynamics::IntegratorConfig;
use dnlw_kam::model::{FieldState, ModelParams, NonlinearitySpec};
use dnlw_kam::qp::{LyapunovConfig, NewtonConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Invalid;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Option<ModelParams<f64>>,
    /// Defaults to `y·y_x²`, or to a command-specific choice for `nonexistence`.
    pub nonlinearity: Option<NonlinearitySpec<f64>>,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub lyapunov: LyapunovConfig,
    #[serde(default)]
    pub continuation: ContinuationBlock,
    #[serde(default)]
    pub melnikov: MelnikovBlock,
    #[serde(default)]
    pub algebra: AlgebraBlock,
    #[serde(default)]
    pub homological: HomologicalBlock,
    #[serde(default)]
    pub asymptotics: AsymptoticsBlock,
    #[serde(default)]
    pub simulate: SimulateBlock,
    #[serde(default)]
    pub nonexistence: NonexistenceBlock,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationBlock {
    /// Ray direction in amplitude space; all ones when absent.
    pub direction: Option<Vec<f64>>,
    /// Increasing ray parameters.
    pub targets: Vec<f64>,
    pub max_halvings: u32,
}

impl Default for ContinuationBlock {
    fn default() -> Self {
        Self { direction: None, targets: vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2], max_halvings: 6 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MelnikovBlock {
    pub scales: Vec<f64>,
    pub samples: usize,
    pub gamma: f64,
    /// `2(2|I⁺| + 1)` when absent.
    pub tau: Option<f64>,
    pub k_max: u32,
    /// Largest normal index checked; the model cutoff when absent.
    pub j_max: Option<u32>,
}

impl Default for MelnikovBlock {
    fn default() -> Self {
        Self { scales: vec![1e-2, 1e-3, 1e-4], samples: 1000, gamma: 1e-2, tau: None, k_max: 4, j_max: None }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraBlock {
    pub sites: Vec<i32>,
    pub j_max: u32,
    pub k_max: u32,
    pub d_max: u32,
    pub cases: usize,
    pub penalization_cases: usize,
}

impl Default for AlgebraBlock {
    fn default() -> Self {
        Self { sites: vec![1, 3], j_max: 16, k_max: 8, d_max: 3, cases: 500, penalization_cases: 100 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalFormChoice {
    Unperturbed,
    Birkhoff,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HomologicalBlock {
    /// Perturbation in the text format of the algebra; random reversible
    /// fields are drawn when absent.
    pub field: Option<String>,
    pub cases: usize,
    pub terms: usize,
    pub floor: f64,
    pub normal_form: NormalFormChoice,
}

impl Default for HomologicalBlock {
    fn default() -> Self {
        Self { field: None, cases: 50, terms: 15, floor: 1e-8, normal_form: NormalFormChoice::Unperturbed }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticsBlock {
    pub j_min: i32,
    pub j_max: i32,
    pub normal_form: NormalFormChoice,
}

impl Default for AsymptoticsBlock {
    fn default() -> Self {
        Self { j_min: 8, j_max: 32, normal_form: NormalFormChoice::Birkhoff }
    }
}

/// `amp_cos·cos(jx) + amp_sin·sin(jx)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub j: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateBlock {
    pub mass: f64,
    pub grid_n: usize,
    pub y: Vec<Mode>,
    pub v: Vec<Mode>,
    /// Start from the Newton solution of the model block instead of `y`, `v`.
    pub from_qp: bool,
}

impl Default for SimulateBlock {
    fn default() -> Self {
        Self {
            mass: 1.0,
            grid_n: 64,
            y: vec![Mode { j: 1, cos: 0.1, sin: 0.0 }],
            v: Vec::new(),
            from_qp: false,
        }
    }
}

impl SimulateBlock {
    pub fn initial_state(&self) -> FieldState<f64> {
        let eval = |modes: &[Mode], x: f64| {
            modes.iter().map(|m| m.cos * (m.j as f64 * x).cos() + m.sin * (m.j as f64 * x).sin()).sum()
        };
        FieldState::from_fn(self.grid_n, |x| eval(&self.y, x), |x| eval(&self.v, x))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonexistenceBlock {
    /// Power in the fluxes `∫y_x^{p+1}`, `∫v^{p+1}` and in the average of `y_x^p`.
    pub p: u32,
    /// Power in the average of `y_t^q`.
    pub q: u32,
}

impl Default for NonexistenceBlock {
    fn default() -> Self {
        Self { p: 3, q: 2 }
    }
}

/// Raw bytes, their SHA-256 and the parsed configuration.
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub sha256: String,
}

pub fn load(path: Option<&Path>) -> Result<LoadedConfig> {
    let bytes = match path {
        Some(p) => std::fs::read(p).map_err(|e| Invalid(format!("cannot read config {}: {e}", p.display())))?,
        None => b"{}".to_vec(),
    };
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    let config: ExperimentConfig =
        serde_json::from_slice(&bytes).map_err(|e| Invalid(format!("malformed config: {e}")))?;
    Ok(LoadedConfig { config, sha256 })
}

impl ExperimentConfig {
    pub fn model(&self) -> Result<&ModelParams<f64>> {
        Ok(self.model.as_ref().ok_or_else(|| Invalid("this command needs a `model` block".into()))?)
    }

    pub fn g_or(&self, default: NonlinearitySpec<f64>) -> NonlinearitySpec<f64> {
        self.nonlinearity.clone().unwrap_or(default)
    }
}
