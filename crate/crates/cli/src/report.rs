use crate::config::ExperimentConfig;
use crate::output::Table;
use elastic_scatter::bounds::CalibrationResult;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A named numerical check with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < threshold`.
    pub fn below(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when `value > threshold`.
    pub fn above(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedCalibration {
    pub name: String,
    #[serde(flatten)]
    pub result: CalibrationResult,
    /// Violations of the fitted constant on configurations not used in the fit.
    pub holdout_violations: Option<usize>,
    pub holdout_size: Option<usize>,
}

/// What an experiment hands back to the runner.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<(String, Table)>,
    pub results: serde_json::Value,
    pub calibrations: Vec<NamedCalibration>,
    pub checks: Vec<Check>,
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport<'a> {
    pub artifact_version: &'static str,
    pub experiment: &'static str,
    pub config: &'a ExperimentConfig,
    pub workers: usize,
    pub results: &'a serde_json::Value,
    pub calibrations: &'a [NamedCalibration],
    pub checks: &'a [Check],
    pub tables: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Deterministic per-point seed from the master seed and the point index.
pub fn point_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

/// Serialize to a JSON value; the types involved always serialize.
pub fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialize")
}
