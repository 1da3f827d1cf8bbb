//! Manufactured non-radiating family: far-field nullity, fitted constants for
//! the small-support ratio and the diameter bound, and a random holdout.
//!
//! Tables `calibration` and `holdout`: shape, aspect, epsilon, tilt,
//! polarization, diameter, sup_boundary, holder, linf, lhs, rhs_structural,
//! ratio, farfield_relative, regime.

use super::{draw_rng, medium, par_points};
use crate::config::{positive_list, require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::report::{point_seed, to_json, Check, NamedCalibration, Outcome};
use elastic_scatter::bounds::{calibrate_constant, check_small_exponent, classify, diameter_lower_bound, CalibrationResult, Regime};
use elastic_scatter::programs::{measure_nonradiating, NonRadiatingConfig, NonRadiatingMeasurement, ShapeSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    /// Shapes; empty means the config `geometry`, or three built-in shapes.
    pub shapes: Vec<ShapeSpec>,
    pub epsilons: Vec<f64>,
    pub tilts: Vec<f64>,
    pub polarizations: Vec<f64>,
    pub delta: f64,
    /// Random configurations drawn inside the calibrated ranges.
    pub holdout: usize,
    /// Required `||u^inf|| / ||phi||`.
    pub farfield_tolerance: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            shapes: Vec::new(),
            epsilons: vec![0.05, 0.1, 0.3, 1.0],
            tilts: vec![0.0, 0.5],
            polarizations: vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0],
            delta: 0.5,
            holdout: 20,
            farfield_tolerance: 1e-6,
        }
    }
}

fn table(rows: &[NonRadiatingMeasurement], c: f64) -> Table {
    let mut t = Table::new(&[
        "shape", "aspect", "epsilon", "tilt", "polarization", "diameter", "sup_boundary", "holder", "linf", "lhs", "rhs_structural", "ratio",
        "farfield_relative", "regime",
    ]);
    for m in rows {
        let (shape, aspect) = match m.config.shape {
            ShapeSpec::Disk => ("disk", 1.0),
            ShapeSpec::Ellipse { aspect, .. } => ("ellipse", aspect),
        };
        t.push(vec![
            shape.into(),
            aspect.into(),
            m.config.epsilon.into(),
            m.config.tilt.into(),
            m.config.polarization.into(),
            m.diameter.into(),
            m.stats.sup_boundary.into(),
            m.stats.holder.into(),
            m.stats.linf.into(),
            m.stats.ratio.into(),
            m.rhs_structural.into(),
            m.ratio.into(),
            m.farfield_relative.into(),
            Cell::Text(to_json(&classify(m.ratio, c)).as_str().unwrap_or_default().into()),
        ]);
    }
    t
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let mut sw: Sweep = cfg.sweep()?;
    if sw.shapes.is_empty() {
        sw.shapes = match cfg.geometry {
            Some(g) => vec![g],
            None => vec![
                ShapeSpec::Disk,
                ShapeSpec::Ellipse { aspect: 1.5, angle: 0.4 },
                ShapeSpec::Ellipse { aspect: 2.5, angle: 1.1 },
            ],
        };
    }
    positive_list("sweep.epsilons", &sw.epsilons)?;
    require(!sw.tilts.is_empty() && !sw.polarizations.is_empty(), "sweep.tilts and sweep.polarizations must be nonempty")?;
    require(sw.tilts.iter().all(|t| (0.0..1.0).contains(t)), "sweep.tilts must lie in [0, 1) so the bump keeps its sign")?;
    require(check_small_exponent(sw.delta, 2).is_ok(), "sweep.delta must lie in (0, 1]")?;
    require(sw.farfield_tolerance > 0.0, "sweep.farfield_tolerance must be positive")?;
    let med = medium(cfg, 2)?;
    let omega = med.omega;
    let mut grid = Vec::new();
    for s in &sw.shapes {
        for &epsilon in &sw.epsilons {
            for &tilt in &sw.tilts {
                for &polarization in &sw.polarizations {
                    grid.push(NonRadiatingConfig {
                        shape: *s,
                        epsilon,
                        omega,
                        tilt,
                        polarization,
                        delta: sw.delta,
                    });
                }
            }
        }
    }
    // Holdout drawn log-uniformly in epsilon and uniformly in tilt and polarization.
    let mut rng = draw_rng(cfg.seed);
    let (emin, emax) = sw.epsilons.iter().fold((f64::INFINITY, 0.0f64), |(a, b), e| (a.min(*e), b.max(*e)));
    let tmax = sw.tilts.iter().cloned().fold(0.0, f64::max);
    let holdout: Vec<NonRadiatingConfig> = (0..sw.holdout)
        .map(|_| NonRadiatingConfig {
            shape: sw.shapes[rng.gen_range(0..sw.shapes.len())],
            epsilon: (emin.ln() + rng.gen::<f64>() * (emax / emin).ln()).exp(),
            omega,
            tilt: rng.gen::<f64>() * tmax,
            polarization: rng.gen::<f64>() * PI,
            delta: sw.delta,
        })
        .collect();
    let n_cal = grid.len();
    let all: Vec<NonRadiatingConfig> = grid.into_iter().chain(holdout).collect();
    let dirs = cfg.mesh.directions;
    let measured = par_points(all.len(), |i| Ok(measure_nonradiating(&all[i], med.lambda, med.mu, Some(dirs), point_seed(cfg.seed, i))?))?;
    let (cal, hold) = measured.split_at(n_cal);

    let cal_pairs: Vec<(f64, f64)> = cal.iter().map(|m| (m.stats.ratio, m.rhs_structural)).collect();
    let fit = calibrate_constant(&cal_pairs)?;
    let c = fit.constant_fit;
    let hold_violations = hold.iter().filter(|m| classify(m.ratio, c) == Regime::RadiatingAsserted).count();

    // Diameter constant: largest c with d >= (c lhs)^{1/delta}/omega on every calibration member below unit size.
    let small: Vec<&NonRadiatingMeasurement> = cal.iter().filter(|m| m.config.epsilon < 1.0).collect();
    let mut calibrations = vec![NamedCalibration {
        name: "small-support constant".into(),
        result: fit.clone(),
        holdout_violations: Some(hold_violations),
        holdout_size: Some(hold.len()),
    }];
    let mut checks = Vec::new();
    if !small.is_empty() {
        let c_diam = small
            .iter()
            .map(|m| m.config.epsilon.powf(sw.delta) / m.stats.ratio)
            .fold(f64::INFINITY, f64::min);
        let below = |m: &NonRadiatingMeasurement| m.diameter < diameter_lower_bound(m.stats.ratio, sw.delta, omega, c_diam) * (1.0 - 1e-12);
        let hold_small: Vec<&NonRadiatingMeasurement> = hold.iter().filter(|m| m.config.epsilon < 1.0).collect();
        let dv = hold_small.iter().filter(|m| below(m)).count();
        calibrations.push(NamedCalibration {
            name: "diameter constant".into(),
            result: CalibrationResult {
                constant_fit: c_diam,
                violations: small.iter().filter(|m| below(m)).count(),
                sweep_size: small.len(),
                fit_method: "min over members with epsilon < 1 of epsilon^delta / lhs".into(),
            },
            holdout_violations: Some(dv),
            holdout_size: Some(hold_small.len()),
        });
        checks.push(Check::below("diameter-bound holdout violations", dv as f64, 0.5));
    }
    let worst_ff = measured.iter().filter_map(|m| m.farfield_relative).fold(0.0, f64::max);
    checks.push(Check::below("largest relative far-field norm", worst_ff, sw.farfield_tolerance));
    checks.push(Check::below("small-support holdout violations", hold_violations as f64, 0.5));
    Ok(Outcome {
        tables: vec![("calibration".into(), table(cal, c)), ("holdout".into(), table(hold, c))],
        results: serde_json::json!({ "calibration": to_json(&cal), "holdout": to_json(&hold) }),
        calibrations,
        checks,
    })
}
