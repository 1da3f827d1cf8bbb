//! Two disjoint small disk sources and the norm of their far-field difference.
//!
//! Table `pair`: source, center_x, center_y, radius, intensity_x, intensity_y,
//! farfield_norm, noise. Table `difference`: difference_norm, noise_sum, margin.

use super::medium;
use crate::config::{require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::report::{to_json, Check, Outcome};
use elastic_scatter::geometry::{DomainComponent, DomainGeometry};
use elastic_scatter::linalg::CVec;
use elastic_scatter::programs::{resolved_farfield, NODES_PER_DIAMETER};
use elastic_scatter::source::{farfield_norm, VectorFn};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    /// Disk radius in units of `1/omega`.
    pub radius: f64,
    /// Center distance in units of `1/omega`.
    pub separation: f64,
    /// Intensity of the second source; the first uses the config `source`.
    pub second_intensity: Option<[f64; 2]>,
    pub min_margin: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            radius: 0.05,
            separation: 3.0,
            second_intensity: None,
            min_margin: 10.0,
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    require(sw.radius > 0.0 && sw.min_margin > 0.0, "sweep.radius and sweep.min_margin must be positive")?;
    require(sw.separation > 2.0 * sw.radius, "sweep.separation must exceed the diameter so the disks are disjoint")?;
    let med = medium(cfg, 2)?;
    let w = med.omega;
    let first = cfg.source.map_or([1.0, 0.0], |s| s.intensity);
    let second = sw.second_intensity.unwrap_or(first);
    let r = sw.radius / w;
    let half = sw.separation / (2.0 * w);
    let sources = [([-half, 0.0, 0.0], first), ([half, 0.0, 0.0], second)];
    let h = 2.0 * r / NODES_PER_DIAMETER;
    let fields = super::par_points(2, |i| {
        let (center, inten) = sources[i];
        let domain = DomainGeometry::single(DomainComponent::disk(center, r)?);
        let v: CVec = [inten[0].into(), inten[1].into(), 0.0.into()];
        let phi: VectorFn = Arc::new(move |_| v);
        Ok(resolved_farfield(&domain, phi, &med, h, cfg.mesh.directions)?)
    })?;
    let (a, b) = (&fields[0], &fields[1]);
    let pa = a.pattern.as_ref().expect("fine pattern is kept");
    let pb = b.pattern.as_ref().expect("fine pattern is kept");
    let diff = farfield_norm(&pa.difference(pb)?);
    let noise = a.noise + b.noise;
    let margin = diff / noise;
    let mut pair = Table::new(&["source", "center_x", "center_y", "radius", "intensity_x", "intensity_y", "farfield_norm", "noise"]);
    for (i, ((c, inten), f)) in sources.iter().zip(&fields).enumerate() {
        pair.push(vec![
            Cell::from(i + 1),
            c[0].into(),
            c[1].into(),
            r.into(),
            inten[0].into(),
            inten[1].into(),
            f.norm.into(),
            f.noise.into(),
        ]);
    }
    let mut dt = Table::new(&["difference_norm", "noise_sum", "margin"]);
    dt.push(vec![diff.into(), noise.into(), margin.into()]);
    Ok(Outcome {
        tables: vec![("pair".into(), pair), ("difference".into(), dt)],
        results: serde_json::json!({
            "sources": to_json(&fields),
            "difference_norm": diff,
            "noise_sum": noise,
            "margin": margin,
        }),
        calibrations: Vec::new(),
        checks: vec![Check::above("difference margin over quadrature noise", margin, sw.min_margin)],
    })
}
