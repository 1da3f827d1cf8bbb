//! Identity terms against their structural bounds across `(K, tau)`, with
//! constants fitted on one grid and checked on a disjoint one, plus a
//! log-log recovery of the K-point decay exponents.
//!
//! Table `terms`: set, dim, k, tau, i2_abs, bound2, i3_abs, bound3, i4_abs, bound4.
//! Table `decay`: dim, alpha, varsigma, fitted_power, expected_power,
//! fitted_log_power, expected_log_power.

use super::{medium, par_points};
use crate::config::{positive_list, require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::Table;
use crate::report::{point_seed, to_json, Check, NamedCalibration, Outcome};
use elastic_scatter::bounds::{calibrate_constant, count_violations, kpoint_decay_fit, kpoint_exponent, kpoint_rhs};
use elastic_scatter::cgo::{select_tau, zeta_choice};
use elastic_scatter::programs::{measure_iterms, CapSpec, ItermMeasurement};
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub dims: Vec<usize>,
    pub calibration_ks: Vec<f64>,
    pub holdout_ks: Vec<f64>,
    /// `tau = factor * select_tau(K)`.
    pub tau_factors: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub panels: usize,
    pub cap: CapSpec,
    /// Largest K in the decay fit; the fit starts just above `e`.
    pub decay_k_max: f64,
    pub decay_points: usize,
    pub decay_tolerance: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            dims: vec![2, 3],
            calibration_ks: vec![5.0, 15.0, 50.0],
            holdout_ks: vec![10.0, 30.0, 100.0],
            tau_factors: vec![0.5, 1.0, 2.0],
            alpha: 0.5,
            beta: 0.5,
            panels: 8,
            cap: CapSpec::default(),
            decay_k_max: 1e4,
            decay_points: 40,
            decay_tolerance: 0.05,
        }
    }
}

const TERMS: [&str; 3] = ["I2 shell", "I3 Hoelder", "I4 boundary"];

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    require(!sw.dims.is_empty() && sw.dims.iter().all(|d| *d == 2 || *d == 3), "sweep.dims must be a nonempty subset of {2, 3}")?;
    positive_list("sweep.calibration_ks", &sw.calibration_ks)?;
    positive_list("sweep.holdout_ks", &sw.holdout_ks)?;
    positive_list("sweep.tau_factors", &sw.tau_factors)?;
    require(sw.calibration_ks.iter().chain(&sw.holdout_ks).all(|k| *k > E), "every K must exceed e")?;
    require(sw.alpha > 0.0 && sw.alpha <= 1.0 && sw.beta > 0.0 && sw.beta <= 1.0, "sweep.alpha and sweep.beta must lie in (0, 1]")?;
    require(sw.panels >= 2 && sw.decay_points >= 3 && sw.decay_k_max > E, "need panels >= 2, decay_points >= 3, decay_k_max > e")?;

    let mut points = Vec::new();
    for &dim in &sw.dims {
        for (set, ks) in [("calibration", &sw.calibration_ks), ("holdout", &sw.holdout_ks)] {
            for &k in ks {
                for &f in &sw.tau_factors {
                    points.push((set, dim, k, f));
                }
            }
        }
    }
    let measured: Vec<ItermMeasurement> = par_points(points.len(), |i| {
        let (_, dim, k, f) = points[i];
        let med = medium(cfg, dim)?;
        let tau = (f * select_tau(k, zeta_choice(sw.alpha, sw.cap.varsigma, dim)?)?).max(1.01 * med.kappa_s);
        Ok(measure_iterms(&sw.cap, &med, k, tau, sw.alpha, sw.beta, sw.panels, point_seed(cfg.seed, i))?)
    })?;
    let mut t = Table::new(&["set", "dim", "k", "tau", "i2_abs", "bound2", "i3_abs", "bound3", "i4_abs", "bound4"]);
    for ((set, ..), m) in points.iter().zip(&measured) {
        let b = &m.breakdown;
        t.push(vec![
            (*set).into(),
            m.dim.into(),
            m.k.into(),
            m.tau.into(),
            b.i2.norm().into(),
            m.bound2.into(),
            b.i3.norm().into(),
            m.bound3.into(),
            b.i4.norm().into(),
            m.bound4.into(),
        ]);
    }
    let mut calibrations = Vec::new();
    let mut checks = Vec::new();
    for &dim in &sw.dims {
        for (j, term) in TERMS.iter().enumerate() {
            let pairs = |set: &str| -> Vec<(f64, f64)> {
                points
                    .iter()
                    .zip(&measured)
                    .filter(|(p, _)| p.0 == set && p.1 == dim)
                    .map(|(_, m)| {
                        let b = &m.breakdown;
                        match j {
                            0 => (b.i2.norm(), m.bound2),
                            1 => (b.i3.norm(), m.bound3),
                            _ => (b.i4.norm(), m.bound4),
                        }
                    })
                    .collect()
            };
            let (cal, hold) = (pairs("calibration"), pairs("holdout"));
            let fit = calibrate_constant(&cal)?;
            let v = count_violations(fit.constant_fit, &hold);
            checks.push(Check::below(&format!("{term} holdout violations in {dim}D"), v as f64, 0.5));
            calibrations.push(NamedCalibration {
                name: format!("{term} constant, {dim}D"),
                result: fit,
                holdout_violations: Some(v),
                holdout_size: Some(hold.len()),
            });
        }
    }

    // Exponent recovery from sampled right-hand sides.
    let mut dt = Table::new(&["dim", "alpha", "varsigma", "fitted_power", "expected_power", "fitted_log_power", "expected_log_power"]);
    for &dim in &sw.dims {
        let lo = E * 1.01;
        let ks: Vec<f64> = (0..sw.decay_points)
            .map(|i| lo * (sw.decay_k_max / lo).powf(i as f64 / (sw.decay_points - 1) as f64))
            .collect();
        let vals = ks.iter().map(|k| kpoint_rhs(*k, sw.alpha, sw.cap.varsigma, dim)).collect::<Result<Vec<_>, _>>()?;
        let (p, q) = kpoint_decay_fit(&ks, &vals)?;
        let (ep, eq) = (kpoint_exponent(sw.alpha, sw.cap.varsigma, dim)?, (dim as f64 + 1.0) / 2.0);
        dt.push(vec![dim.into(), sw.alpha.into(), sw.cap.varsigma.into(), p.into(), ep.into(), q.into(), eq.into()]);
        checks.push(Check::below(&format!("relative power-exponent error in {dim}D"), ((p - ep) / ep).abs(), sw.decay_tolerance));
    }
    Ok(Outcome {
        tables: vec![("terms".into(), t), ("decay".into(), dt)],
        results: to_json(&measured),
        calibrations,
        checks,
    })
}
