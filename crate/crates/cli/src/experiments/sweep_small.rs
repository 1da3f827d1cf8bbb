//! Far fields of constant-intensity disk sources over a diameter sweep.
//!
//! Table `points`: epsilon, intensity_x, intensity_y, diameter, farfield_norm,
//! noise, margin, lhs, rhs_structural, ratio, regime.

use super::{medium, par_points, validation};
use crate::config::{positive_list, require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::Table;
use crate::report::{to_json, Check, Outcome};
use elastic_scatter::bounds::{check_small_exponent, small_support_criterion, CriterionReport};
use elastic_scatter::programs::{constant_disk_farfield, ResolvedFarField, TEST_CENTER};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub epsilons: Vec<f64>,
    /// Constant intensities; empty means the config `source` only.
    pub intensities: Vec<[f64; 2]>,
    pub delta: f64,
    pub c_fit: f64,
    /// Required `farfield_norm / noise` for nonzero sources.
    pub min_margin: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            epsilons: vec![0.05, 0.1, 0.2],
            intensities: Vec::new(),
            delta: 0.5,
            c_fit: 1.0,
            min_margin: 10.0,
        }
    }
}

#[derive(Debug, Serialize)]
struct Point {
    epsilon: f64,
    intensity: [f64; 2],
    farfield: ResolvedFarField,
    criterion: Option<CriterionReport>,
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    positive_list("sweep.epsilons", &sw.epsilons)?;
    require(check_small_exponent(sw.delta, 2).is_ok(), "sweep.delta must lie in (0, 1]")?;
    require(sw.c_fit > 0.0 && sw.min_margin > 0.0, "sweep.c_fit and sweep.min_margin must be positive")?;
    let mut intensities = sw.intensities.clone();
    if intensities.is_empty() {
        intensities.push(cfg.source.map_or([1.0, 0.0], |s| s.intensity));
    }
    let med = medium(cfg, 2)?;
    let grid: Vec<(f64, [f64; 2])> = sw.epsilons.iter().flat_map(|e| intensities.iter().map(move |i| (*e, *i))).collect();
    let points = par_points(grid.len(), |i| {
        let (eps, inten) = grid[i];
        let farfield = constant_disk_farfield(eps, inten, med.lambda, med.mu, med.omega, TEST_CENTER, cfg.mesh.directions)?;
        let size = inten[0].hypot(inten[1]);
        let criterion = if size > 0.0 {
            Some(small_support_criterion(size, 0.0, size, sw.delta, eps, med.omega, 2, sw.c_fit)?)
        } else {
            None
        };
        Ok(Point {
            epsilon: eps,
            intensity: inten,
            farfield,
            criterion,
        })
    })?;
    // Refinement self-check, in point order.
    for p in &points {
        let f = &p.farfield;
        if f.norm > 0.0 && f.noise / f.norm > cfg.mesh.refinement_tolerance {
            return Err(validation(format!(
                "refinement self-check failed at epsilon = {}: relative change {:e} exceeds {:e}",
                p.epsilon,
                f.noise / f.norm,
                cfg.mesh.refinement_tolerance
            )));
        }
    }
    let mut table = Table::new(&[
        "epsilon", "intensity_x", "intensity_y", "diameter", "farfield_norm", "noise", "margin", "lhs", "rhs_structural", "ratio", "regime",
    ]);
    let mut checks = Vec::new();
    for p in &points {
        let f = &p.farfield;
        let margin = (f.norm > 0.0).then(|| f.norm / f.noise);
        let c = p.criterion.as_ref();
        table.push(vec![
            p.epsilon.into(),
            p.intensity[0].into(),
            p.intensity[1].into(),
            (p.epsilon / med.omega).into(),
            f.norm.into(),
            f.noise.into(),
            margin.into(),
            c.map(|c| c.lhs).into(),
            c.map(|c| c.rhs_structural).into(),
            c.map(|c| c.ratio).into(),
            c.map_or(String::new(), |c| to_json(&c.regime).as_str().unwrap_or_default().to_string()).into(),
        ]);
        if let Some(m) = margin {
            checks.push(Check::above(&format!("radiation margin at epsilon {}", p.epsilon), m, sw.min_margin));
        } else {
            checks.push(Check::below(&format!("zero-source far field at epsilon {}", p.epsilon), f.norm, f64::MIN_POSITIVE));
        }
    }
    Ok(Outcome {
        tables: vec![("points".into(), table)],
        results: to_json(&points),
        calibrations: Vec::new(),
        checks,
    })
}
