//! Medium scattering: contraction constant fitted on one set of scatterers and
//! checked on a random holdout, Neumann-series agreement inside the
//! contraction regime, and the medium small-support criterion.
//!
//! Tables `calibration` and `holdout`: shape, aspect, epsilon, contrast, wave,
//! angle, product, ratio_u, ratio_ut, largest_s, contraction_estimate,
//! neumann_agreement, farfield_norm, criterion_lhs, criterion_rhs, regime.

use super::{draw_rng, par_points};
use crate::config::{require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::report::{to_json, Check, NamedCalibration, Outcome};
use elastic_scatter::bounds::{calibrate_contraction, check_small_exponent, medium_small_criterion, CriterionReport};
use elastic_scatter::programs::{measure_contraction, ContractionConfig, ContractionMeasurement, PlaneWave, ShapeSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    /// Calibration scatterers; empty means the built-in corner set.
    pub calibration: Vec<ContractionConfig>,
    pub holdout: usize,
    pub holdout_epsilon: [f64; 2],
    pub holdout_contrast: [f64; 2],
    /// Neumann series is compared when the contraction estimate is below this.
    pub neumann_below: f64,
    pub neumann_tolerance: f64,
    pub delta: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            calibration: Vec::new(),
            holdout: 10,
            holdout_epsilon: [0.2, 1.5],
            holdout_contrast: [0.2, 1.0],
            neumann_below: 0.9,
            neumann_tolerance: 1e-8,
            delta: 0.5,
        }
    }
}

const SHAPES: [ShapeSpec; 2] = [ShapeSpec::Disk, ShapeSpec::Ellipse { aspect: 1.5, angle: 0.5 }];
const WAVES: [PlaneWave; 2] = [PlaneWave::Pressure, PlaneWave::Shear];

/// Corners of the holdout box at the largest diameter plus two small ones.
fn corner_set(omega: f64, eps: [f64; 2], v: [f64; 2]) -> Vec<ContractionConfig> {
    let mut out = Vec::new();
    for shape in SHAPES {
        for wave in WAVES {
            for contrast in v {
                out.push(ContractionConfig {
                    shape,
                    epsilon: eps[1],
                    omega,
                    contrast,
                    wave,
                    angle: 0.9273,
                });
            }
        }
    }
    for shape in SHAPES {
        out.push(ContractionConfig {
            shape,
            epsilon: eps[0],
            omega,
            contrast: v[0],
            wave: PlaneWave::Pressure,
            angle: 0.3,
        });
    }
    out
}

#[derive(Debug, Serialize)]
struct Row {
    measurement: ContractionMeasurement,
    criterion: Option<CriterionReport>,
}

fn table(rows: &[Row]) -> Table {
    let mut t = Table::new(&[
        "shape", "aspect", "epsilon", "contrast", "wave", "angle", "product", "ratio_u", "ratio_ut", "largest_s", "contraction_estimate",
        "neumann_agreement", "farfield_norm", "criterion_lhs", "criterion_rhs", "regime",
    ]);
    for r in rows {
        let m = &r.measurement;
        let c = &m.config;
        let (shape, aspect) = match c.shape {
            ShapeSpec::Disk => ("disk", 1.0),
            ShapeSpec::Ellipse { aspect, .. } => ("ellipse", aspect),
        };
        let crit = r.criterion.as_ref();
        t.push(vec![
            shape.into(),
            aspect.into(),
            c.epsilon.into(),
            c.contrast.into(),
            to_json(&c.wave).as_str().unwrap_or_default().into(),
            c.angle.into(),
            m.sample.product.into(),
            m.sample.ratio_u.into(),
            m.sample.ratio_ut.into(),
            m.sample.largest_s().into(),
            m.contraction_estimate.into(),
            m.neumann_agreement.into(),
            m.farfield_norm.into(),
            crit.map(|c| c.lhs).into(),
            crit.map(|c| c.rhs_structural).into(),
            Cell::Text(crit.map_or(String::new(), |c| to_json(&c.regime).as_str().unwrap_or_default().into())),
        ]);
    }
    t
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    let [e0, e1] = sw.holdout_epsilon;
    let [v0, v1] = sw.holdout_contrast;
    require(0.0 < e0 && e0 <= e1 && 0.0 < v0 && v0 <= v1, "holdout ranges must be positive and ordered")?;
    require(sw.neumann_below > 0.0 && sw.neumann_below < 1.0 && sw.neumann_tolerance > 0.0, "need 0 < neumann_below < 1 and a positive tolerance")?;
    require(check_small_exponent(sw.delta, 2).is_ok(), "sweep.delta must lie in (0, 1]")?;
    let (lambda, mu, omega) = (cfg.medium.lambda, cfg.medium.mu, cfg.medium.omega);
    let mut cal = sw.calibration.clone();
    if cal.is_empty() {
        cal = corner_set(omega, sw.holdout_epsilon, sw.holdout_contrast);
    }
    require(cal.iter().all(|c| c.epsilon > 0.0 && c.contrast > 0.0 && c.omega > 0.0), "calibration entries need positive epsilon, contrast and omega")?;
    let mut rng = draw_rng(cfg.seed);
    let hold: Vec<ContractionConfig> = (0..sw.holdout)
        .map(|_| ContractionConfig {
            shape: SHAPES[rng.gen_range(0..SHAPES.len())],
            epsilon: rng.gen_range(e0..=e1),
            omega,
            contrast: rng.gen_range(v0..=v1),
            wave: WAVES[rng.gen_range(0..WAVES.len())],
            angle: rng.gen::<f64>() * 2.0 * PI,
        })
        .collect();
    let n_cal = cal.len();
    let all: Vec<ContractionConfig> = cal.into_iter().chain(hold).collect();
    let measured = par_points(all.len(), |i| {
        let first = measure_contraction(&all[i], lambda, mu, false)?;
        if first.contraction_estimate < sw.neumann_below {
            Ok(measure_contraction(&all[i], lambda, mu, true)?)
        } else {
            Ok(first)
        }
    })?;
    let samples: Vec<_> = measured[..n_cal].iter().map(|m| m.sample).collect();
    let fit = calibrate_contraction(&samples)?;
    let s = fit.constant_fit;
    let hold_violations = measured[n_cal..].iter().filter(|m| !m.sample.holds(s * (1.0 - 1e-12))).count();

    // Medium small-support criterion with unit constant; for constant V and a
    // unit plane wave, |V u^i| on the boundary equals V.
    let eps_max = all.iter().map(|c| c.epsilon).fold(0.0, f64::max);
    let v_max = all.iter().map(|c| c.contrast).fold(0.0, f64::max);
    let rows: Vec<Row> = measured
        .into_iter()
        .map(|m| {
            let c = m.config;
            let criterion = if s > eps_max * v_max {
                Some(medium_small_criterion(c.contrast, c.contrast, 1.0, sw.delta, c.epsilon, eps_max, v_max, s, 2, 1.0)?)
            } else {
                None
            };
            Ok(Row { measurement: m, criterion })
        })
        .collect::<CliResult<_>>()?;
    let worst_neumann = rows.iter().filter_map(|r| r.measurement.neumann_agreement).fold(0.0, f64::max);
    let compared = rows.iter().filter(|r| r.measurement.neumann_agreement.is_some()).count();
    let checks = vec![
        Check::below("contraction holdout violations", hold_violations as f64, 0.5),
        Check::below("largest Neumann/direct disagreement", worst_neumann, sw.neumann_tolerance),
        Check::above("configurations compared with the Neumann series", compared as f64, 0.5),
    ];
    let (cal_rows, hold_rows) = rows.split_at(n_cal);
    Ok(Outcome {
        tables: vec![("calibration".into(), table(cal_rows)), ("holdout".into(), table(hold_rows))],
        results: serde_json::json!({ "calibration": to_json(&cal_rows), "holdout": to_json(&hold_rows), "s_fit": s }),
        calibrations: vec![NamedCalibration {
            name: "contraction constant s".into(),
            result: fit,
            holdout_violations: Some(hold_violations),
            holdout_size: Some(sw.holdout),
        }],
        checks,
    })
}
