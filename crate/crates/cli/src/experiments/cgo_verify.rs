//! Probe algebra on random probes, finite-difference residual ladders, and
//! closed-form paraboloid integrals against the Monte-Carlo oracle.
//!
//! Tables:
//! `identities`: dim, probes, max_xi_xi_error, max_xi_eta_error, max_relative_error_wide.
//! `residuals`: dim, tau_ratio, ppw, residual.
//! `slopes`: dim, tau_ratio, slope, residual_at_min_ppw, first_ppw_below_target.
//! `integrals`: dim, k, tau, closed_re, closed_im, mc_re, mc_im, stderr, relative_error, sigmas.

use super::{draw_rng, medium, par_points};
use crate::config::{positive_list, require, ExperimentConfig};
use crate::error::CliResult;
use crate::output::{Cell, Table};
use crate::report::{point_seed, Check, Outcome};
use elastic_scatter::bounds::loglog_slope;
use elastic_scatter::cgo::{apex_probe, paraboloid_integral_closed, CGO_MIN_PPW};
use elastic_scatter::fd::FdOrder;
use elastic_scatter::montecarlo::paraboloid_mc;
use elastic_scatter::programs::{random_probe, residual_at_ppw};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub dims: Vec<usize>,
    /// Random probes per dimension.
    pub probes: usize,
    pub identity_tolerance: f64,
    /// `tau / kappa_s` values for residual ladders.
    pub tau_ratios: Vec<f64>,
    /// Ladder doublings starting at the minimum resolution.
    pub ladder_steps: usize,
    pub residual_target: f64,
    pub slope_tolerance: f64,
    pub ks: Vec<f64>,
    /// `tau = factor K` for the integral comparisons.
    pub tau_factors: Vec<f64>,
    pub mc_per_batch: usize,
    pub mc_batches: usize,
    pub mc_relative: f64,
    pub mc_sigmas: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Sweep {
            dims: vec![2, 3],
            probes: 1000,
            identity_tolerance: 1e-12,
            tau_ratios: vec![2.0, 10.0, 100.0],
            ladder_steps: 9,
            residual_target: 1e-6,
            slope_tolerance: 0.1,
            ks: vec![2.0, 4.0, 8.0],
            tau_factors: vec![1.0, 2.0, 4.0],
            mc_per_batch: 62_500,
            mc_batches: 32,
            mc_relative: 0.02,
            mc_sigmas: 3.0,
        }
    }
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let sw: Sweep = cfg.sweep()?;
    require(!sw.dims.is_empty() && sw.dims.iter().all(|d| *d == 2 || *d == 3), "sweep.dims must be a nonempty subset of {2, 3}")?;
    require(sw.probes > 0 && sw.identity_tolerance > 0.0, "sweep.probes and sweep.identity_tolerance must be positive")?;
    positive_list("sweep.tau_ratios", &sw.tau_ratios)?;
    require(sw.tau_ratios.iter().all(|r| *r > 1.0), "sweep.tau_ratios must exceed 1")?;
    require(sw.ladder_steps >= 1, "sweep.ladder_steps must be at least 1")?;
    positive_list("sweep.ks", &sw.ks)?;
    positive_list("sweep.tau_factors", &sw.tau_factors)?;
    require(sw.mc_batches >= 2 && sw.mc_per_batch > 0, "Monte-Carlo needs at least 2 batches")?;
    let mut checks = Vec::new();

    // Algebra on random probes.
    let mut ident = Table::new(&["dim", "probes", "max_xi_xi_error", "max_xi_eta_error", "max_relative_error_wide"]);
    let mut rng = draw_rng(cfg.seed);
    for &dim in &sw.dims {
        let med = medium(cfg, dim)?;
        let ks = med.kappa_s;
        // Absolute errors for tau in (ks, 10 ks]; relative to |xi|^2 for tau up to 1e3 ks.
        let (mut e1, mut e2, mut rel) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..sw.probes {
            let tau = ks * (1.0 + 9.0 * (1.0 - rng.gen::<f64>()));
            let p = random_probe(&mut rng, tau, &med)?;
            e1 = e1.max((p.xi_dot_xi() + ks * ks).norm());
            e2 = e2.max(p.xi_dot_eta().norm());
            let tau = ks * 1e3f64.powf(rng.gen_range(1e-9..1.0));
            let p = random_probe(&mut rng, tau, &med)?;
            let scale = 2.0 * tau * tau + ks * ks;
            rel = rel.max((p.xi_dot_xi() + ks * ks).norm() / scale).max(p.xi_dot_eta().norm() / scale.sqrt());
        }
        ident.push(vec![dim.into(), sw.probes.into(), e1.into(), e2.into(), rel.into()]);
        checks.push(Check::below(&format!("xi.xi + ks^2 in {dim}D"), e1, sw.identity_tolerance));
        checks.push(Check::below(&format!("xi.eta in {dim}D"), e2, sw.identity_tolerance));
        checks.push(Check::below(&format!("relative identity error up to 1e3 ks in {dim}D"), rel, 64.0 * f64::EPSILON));
        // A corrupted amplitude must be detected.
        let mut bad = apex_probe(2.0 * ks, 0.3, &med)?;
        bad.eta[0] += 1e-3;
        checks.push(Check::above(&format!("corrupted eta detected in {dim}D"), bad.xi_dot_eta().norm(), sw.identity_tolerance));
    }

    // Residual ladders: ppw = 12 * 2^k.
    let mut ladder: Vec<(usize, f64, f64)> = Vec::new();
    for &d in &sw.dims {
        for &r in &sw.tau_ratios {
            for k in 0..=sw.ladder_steps {
                ladder.push((d, r, CGO_MIN_PPW * 2f64.powi(k as i32)));
            }
        }
    }
    let res = par_points(ladder.len(), |i| {
        let (dim, ratio, ppw) = ladder[i];
        let med = medium(cfg, dim)?;
        let probe = apex_probe(ratio * med.kappa_s, 0.3, &med)?;
        Ok(residual_at_ppw(&probe, &med, ppw, FdOrder::Second)?)
    })?;
    let mut rt = Table::new(&["dim", "tau_ratio", "ppw", "residual"]);
    for ((d, r, p), v) in ladder.iter().zip(&res) {
        rt.push(vec![(*d).into(), (*r).into(), (*p).into(), (*v).into()]);
    }
    let mut st = Table::new(&["dim", "tau_ratio", "slope", "residual_at_min_ppw", "first_ppw_below_target"]);
    let per = sw.ladder_steps + 1;
    for (chunk, vals) in ladder.chunks(per).zip(res.chunks(per)) {
        let (dim, ratio) = (chunk[0].0, chunk[0].1);
        // Slope over the first three rungs, where the leading term dominates.
        let m = per.min(3);
        let slope = -loglog_slope(&chunk[..m].iter().map(|c| c.2).collect::<Vec<_>>(), &vals[..m])?;
        let first = chunk.iter().zip(vals).find(|(_, v)| **v < sw.residual_target).map(|(c, _)| c.2);
        st.push(vec![dim.into(), ratio.into(), slope.into(), vals[0].into(), first.into()]);
        checks.push(Check::below(&format!("|slope - 2| in {dim}D at tau/ks {ratio}"), (slope - 2.0).abs(), sw.slope_tolerance));
        checks.push(Check::below(
            &format!("finest residual in {dim}D at tau/ks {ratio}"),
            *vals.last().expect("ladder is nonempty"),
            sw.residual_target,
        ));
    }

    // Paraboloid integrals.
    let mut ints: Vec<(usize, f64, f64)> = Vec::new();
    for &d in &sw.dims {
        for &k in &sw.ks {
            for &f in &sw.tau_factors {
                ints.push((d, k, f * k));
            }
        }
    }
    let mut it = Table::new(&["dim", "k", "tau", "closed_re", "closed_im", "mc_re", "mc_im", "stderr", "relative_error", "sigmas"]);
    for (i, &(dim, k, tau)) in ints.iter().enumerate() {
        let med = medium(cfg, dim)?;
        let tau = tau.max(1.01 * med.kappa_s);
        let probe = apex_probe(tau, 0.3, &med)?;
        let closed = paraboloid_integral_closed(&probe.xi, k, dim)?;
        let mc = paraboloid_mc(&probe.xi, k, dim, sw.mc_per_batch, sw.mc_batches, point_seed(cfg.seed, i))?;
        let (rel, z) = mc.compare(closed);
        it.push(vec![
            dim.into(),
            k.into(),
            tau.into(),
            closed.re.into(),
            closed.im.into(),
            mc.mean.re.into(),
            mc.mean.im.into(),
            mc.stderr.into(),
            rel.into(),
            Cell::Num(z),
        ]);
        let label = format!("{dim}D K {k} tau {tau}");
        checks.push(Check::below(&format!("integral relative error, {label}"), rel, sw.mc_relative));
        checks.push(Check::below(&format!("integral gap in stderr, {label}"), z, sw.mc_sigmas));
    }
    Ok(Outcome {
        tables: vec![("identities".into(), ident), ("residuals".into(), rt), ("slopes".into(), st), ("integrals".into(), it)],
        results: serde_json::json!({ "ladder_rungs": per, "integral_points": ints.len() }),
        calibrations: Vec::new(),
        checks,
    })
}
