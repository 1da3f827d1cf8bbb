//! Versioned JSON experiment configuration.
//!
//! Every object rejects unknown fields. The experiment-specific `sweep` block
//! is parsed into the matching sweep type, which is equally strict. The
//! published JSON Schema lives in `schema/experiment-config.schema.json`.

use crate::error::{CliError, CliResult};
use elastic_scatter::programs::ShapeSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SweepSmall,
    NonradiatingAudit,
    CgoVerify,
    IdentityCheck,
    KpointDecay,
    MediumDemo,
    Distinguish,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SweepSmall => "sweep-small",
            Experiment::NonradiatingAudit => "nonradiating-audit",
            Experiment::CgoVerify => "cgo-verify",
            Experiment::IdentityCheck => "identity-check",
            Experiment::KpointDecay => "kpoint-decay",
            Experiment::MediumDemo => "medium-demo",
            Experiment::Distinguish => "distinguish",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSpec {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    /// Constant force density `phi`.
    pub intensity: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSpec {
    /// Far-field observation directions on the unit circle.
    pub directions: usize,
    /// Largest accepted `||u_h - u_{h/2}|| / ||u_{h/2}||` in refinement self-checks.
    pub refinement_tolerance: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec {
            directions: 64,
            refinement_tolerance: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub medium: MediumSpec,
    #[serde(default)]
    pub geometry: Option<ShapeSpec>,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub sweep: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default)]
    pub seed: u64,
    pub output: String,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks that go beyond the field types.
    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let m = &self.medium;
        if !(m.mu > 0.0 && 2.0 * m.lambda + 2.0 * m.mu > 0.0 && m.omega > 0.0) {
            return Err(invalid("medium needs mu > 0, lambda + mu > 0 and omega > 0"));
        }
        if !(self.mesh.directions >= 8 && self.mesh.refinement_tolerance > 0.0) {
            return Err(invalid("mesh needs directions >= 8 and refinement_tolerance > 0"));
        }
        if self.output.trim().is_empty() {
            return Err(invalid("output prefix is empty"));
        }
        Ok(())
    }

    /// Parse the sweep block into the experiment's sweep type.
    pub fn sweep<T: DeserializeOwned>(&self) -> CliResult<T> {
        serde_json::from_value(serde_json::Value::Object(self.sweep.clone()))
            .map_err(|e| invalid(format!("sweep ({}): {e}", self.experiment.name())))
    }
}

/// Reject empty lists and non-positive entries.
pub fn positive_list(name: &str, v: &[f64]) -> CliResult<()> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(invalid(format!("{name} must be a nonempty list of positive numbers")));
    }
    Ok(())
}

pub fn require(cond: bool, msg: &str) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}
