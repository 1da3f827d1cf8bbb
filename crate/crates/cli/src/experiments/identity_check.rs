//! Integral identity on paraboloid caps across `K`, dimension and mesh size.
//!
//! Table `identity`: dim, k, tau, panels, volume_nodes, lid_nodes, lhs_abs,
//! i1_abs, i2_abs, i3_abs, i4_abs, residual_abs, relative_residual.

use super::{medium, par_points};
use crate::config::{positive_list, require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::Table;
use crate::report::{to_json, Check, Outcome};
use elastic_scatter::cgo::{apex_probe, graph_bump, identity_meshes, integral_identity_check, select_tau, zeta_choice, IdentityBreakdown};
use elastic_scatter::programs::CapSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub dims: Vec<usize>,
    pub ks: Vec<f64>,
    /// Increasing panel counts; the last one is held to the tolerance.
    pub panels: Vec<usize>,
    pub alpha: f64,
    pub cap: CapSpec,
    pub tolerance: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            dims: vec![2, 3],
            ks: vec![10.0, 30.0, 100.0],
            panels: vec![4, 8],
            alpha: 0.5,
            cap: CapSpec::default(),
            tolerance: 1e-3,
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    require(!sw.dims.is_empty() && sw.dims.iter().all(|d| *d == 2 || *d == 3), "sweep.dims must be a nonempty subset of {2, 3}")?;
    positive_list("sweep.ks", &sw.ks)?;
    require(!sw.panels.is_empty() && sw.panels.windows(2).all(|w| w[0] < w[1]) && sw.panels[0] >= 2, "sweep.panels must increase from at least 2")?;
    require(sw.alpha > 0.0 && sw.alpha <= 1.0 && sw.tolerance > 0.0, "sweep.alpha must lie in (0, 1] and tolerance be positive")?;
    let mut points: Vec<(usize, f64, usize)> = Vec::new();
    for &d in &sw.dims {
        for &k in &sw.ks {
            for &p in &sw.panels {
                points.push((d, k, p));
            }
        }
    }
    let out: Vec<(f64, IdentityBreakdown)> = par_points(points.len(), |i| {
        let (dim, k, panels) = points[i];
        let med = medium(cfg, dim)?;
        let zeta = zeta_choice(sw.alpha, sw.cap.varsigma, dim)?;
        let tau = select_tau(k, zeta)?;
        let domain = sw.cap.domain(k, dim)?;
        let bump = graph_bump(&domain, [1.0, 0.0, 0.0])?;
        let meshes = identity_meshes(&domain, panels)?;
        let probe = apex_probe(tau, 0.3, &med)?;
        Ok((tau, integral_identity_check(&domain, &bump, &probe, &med, &meshes)?))
    })?;
    let mut t = Table::new(&[
        "dim", "k", "tau", "panels", "volume_nodes", "lid_nodes", "lhs_abs", "i1_abs", "i2_abs", "i3_abs", "i4_abs", "residual_abs", "relative_residual",
    ]);
    for ((dim, k, panels), (tau, b)) in points.iter().zip(&out) {
        t.push(vec![
            (*dim).into(),
            (*k).into(),
            (*tau).into(),
            (*panels).into(),
            b.volume_nodes.into(),
            b.lid_nodes.into(),
            b.lhs.norm().into(),
            b.i1.norm().into(),
            b.i2.norm().into(),
            b.i3.norm().into(),
            b.i4.norm().into(),
            b.residual.into(),
            b.relative_residual.into(),
        ]);
    }
    let mut checks = Vec::new();
    let per = sw.panels.len();
    for (pts, res) in points.chunks(per).zip(out.chunks(per)) {
        let (dim, k) = (pts[0].0, pts[0].1);
        let rel: Vec<f64> = res.iter().map(|r| r.1.relative_residual).collect();
        checks.push(Check::below(&format!("relative residual {dim}D K {k}"), *rel.last().expect("panels nonempty"), sw.tolerance));
        if per > 1 {
            let worst_growth = rel.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
            checks.push(Check::below(&format!("residual ratio under refinement {dim}D K {k}"), worst_growth, 1.0));
        }
    }
    Ok(Outcome {
        tables: vec![("identity".into(), t)],
        results: to_json(&out.iter().map(|(_, b)| b).collect::<Vec<_>>()),
        calibrations: Vec::new(),
        checks,
    })
}
