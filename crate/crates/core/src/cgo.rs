//! Complex geometric optics (CGO) probes, paraboloid integrals, the four-term
//! integral identity at a K-curvature point, and traction algebra at the apex.
//!
//! Coordinates are local to the cap: the apex sits at the component center
//! and the cap opens along `+e_n`.

use crate::elastic::{traction, FieldJet, LameMedium, RegularGrid};
use crate::error::{Error, Result};
use crate::fd::FdOrder;
use crate::geometry::{
    boundary_mesh, volume_mesh_with, BoundaryMesh, BoundaryTag, ComponentKind, DomainGeometry, KCurvatureChart, MeshResolution,
    QuadratureMesh,
};
use crate::linalg::{cnorm, dot, norm, sub, CVec, CompensatedSum, Point, CZERO_VEC};
use crate::quadrature::adaptive_gk_array;
use crate::source::Bump;
use crate::special::{lower_incomplete_gamma, sphere_measure};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};


/// `u0 = eta e^{xi . x}`, a decaying/oscillating solution of `L u + omega^2 u = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CgoProbe {
    pub d: Point,
    pub d_perp: Point,
    pub tau: f64,
    pub kappa_s: f64,
    pub xi: CVec,
    pub eta: CVec,
    pub dim: usize,
}

/// Build the probe `xi = tau d + i sqrt(ks^2 + tau^2) d_perp`,
/// `eta = -i sqrt(1 + ks^2/tau^2) d + d_perp`.
pub fn make_cgo(d: &Point, d_perp: &Point, tau: f64, medium: &LameMedium) -> Result<CgoProbe> {
    let n = medium.dim;
    let tail = |v: &Point| v[n..].iter().any(|c| *c != 0.0);
    if (norm(d) - 1.0).abs() > 1e-12 || (norm(d_perp) - 1.0).abs() > 1e-12 || dot(d, d_perp).abs() > 1e-12 || tail(d) || tail(d_perp) {
        return Err(Error::NonOrthonormalPair);
    }
    let ks = medium.kappa_s;
    if !(tau > ks) {
        return Err(Error::TauTooSmall { tau, kappa_s: ks });
    }
    let s = (ks * ks + tau * tau).sqrt();
    let t = (1.0 + ks * ks / (tau * tau)).sqrt();
    let mut xi = CZERO_VEC;
    let mut eta = CZERO_VEC;
    for i in 0..n {
        xi[i] = Complex64::new(tau * d[i], s * d_perp[i]);
        eta[i] = Complex64::new(d_perp[i], -t * d[i]);
    }
    Ok(CgoProbe {
        d: *d,
        d_perp: *d_perp,
        tau,
        kappa_s: ks,
        xi,
        eta,
        dim: n,
    })
}

/// Probe with `d = -e_n` and `d_perp = e_1` (2D) or `(sin phi, cos phi, 0)` (3D).
pub fn apex_probe(tau: f64, phi: f64, medium: &LameMedium) -> Result<CgoProbe> {
    match medium.dim {
        2 => make_cgo(&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], tau, medium),
        _ => make_cgo(&[0.0, 0.0, -1.0], &[phi.sin(), phi.cos(), 0.0], tau, medium),
    }
}

fn bilinear(a: &CVec, b: &CVec, n: usize) -> Complex64 {
    (0..n).map(|i| a[i] * b[i]).sum()
}

impl CgoProbe {
    /// `xi . x`.
    pub fn phase(&self, x: &Point) -> Complex64 {
        (0..self.dim).map(|i| self.xi[i] * x[i]).sum()
    }

    pub fn value(&self, x: &Point) -> CVec {
        let e = self.phase(x).exp();
        let mut v = CZERO_VEC;
        for i in 0..self.dim {
            v[i] = self.eta[i] * e;
        }
        v
    }

    /// Value and gradient `d_j u_i = eta_i xi_j e^{xi . x}`.
    pub fn jet(&self, x: &Point) -> FieldJet {
        let e = self.phase(x).exp();
        let mut gradient = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                gradient[i][j] = self.eta[i] * self.xi[j] * e;
            }
        }
        FieldJet {
            dim: self.dim,
            point: *x,
            value: self.value(x),
            gradient,
        }
    }

    /// `xi . xi`, equal to `-kappa_s^2`.
    pub fn xi_dot_xi(&self) -> Complex64 {
        bilinear(&self.xi, &self.xi, self.dim)
    }

    /// `xi . eta`, equal to zero.
    pub fn xi_dot_eta(&self) -> Complex64 {
        bilinear(&self.xi, &self.eta, self.dim)
    }
}

/// Points per oscillation period required by [`cgo_residual`].
pub const CGO_MIN_PPW: f64 = 12.0;

/// Largest `|L u0 + omega^2 u0| / (tau^2 |u0|)` over interior grid nodes, by
/// second-order centered differences.
pub fn cgo_residual(probe: &CgoProbe, medium: &LameMedium, grid: &RegularGrid) -> Result<f64> {
    cgo_residual_with(probe, medium, grid, FdOrder::Second)
}

/// [`cgo_residual`] with a chosen stencil order.
pub fn cgo_residual_with(probe: &CgoProbe, medium: &LameMedium, grid: &RegularGrid, order: FdOrder) -> Result<f64> {
    if grid.dim != probe.dim || medium.dim != probe.dim {
        return Err(Error::DimensionMismatch {
            expected: probe.dim,
            got: grid.dim,
        });
    }
    let period = 2.0 * PI / (probe.kappa_s.powi(2) + probe.tau.powi(2)).sqrt();
    let ppw = period / grid.spacing;
    if ppw < CGO_MIN_PPW {
        return Err(Error::GridTooCoarse {
            ppw,
            required: CGO_MIN_PPW,
        });
    }
    let u = |x: &Point| probe.value(x);
    let mut worst = 0.0f64;
    for idx in grid.interior(order.half_width()) {
        let x = grid.point(idx);
        let r = medium.residual_fd(&u, &x, grid.spacing, order);
        let scale = probe.tau * probe.tau * cnorm(&u(&x));
        worst = worst.max(cnorm(&r) / scale);
    }
    Ok(worst)
}

/// `int_{x_n > K |x'|^2} e^{xi . x} dx` in closed form.
pub fn paraboloid_integral_closed(xi: &CVec, k: f64, dim: usize) -> Result<Complex64> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let xn = xi[dim - 1];
    if xn.re >= 0.0 {
        return Err(Error::NonDecaying(xn.re));
    }
    if !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
    }
    let xp2: Complex64 = (0..dim - 1).map(|i| xi[i] * xi[i]).sum();
    let base = Complex64::from(PI) / (-xn * k);
    let power = base.powf((dim as f64 - 1.0) / 2.0);
    Ok(-power / xn * (-xp2 / (4.0 * xn * k)).exp())
}

/// `int_{K_- |x'|^2 < x_n < b, x_n < K_+ |x'|^2} e^{-tau x_n} dx` in closed form.
pub fn shell_integral(k_minus: f64, k_plus: f64, tau: f64, b: f64, dim: usize) -> Result<f64> {
    if !(k_minus > 0.0 && k_minus <= k_plus) {
        return Err(Error::InvalidCurvatures { k_minus, k_plus });
    }
    if !(tau > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter("tau and b must be positive".into()));
    }
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let m = (dim as f64 - 1.0) / 2.0;
    let c = (dim as f64 + 1.0) / 2.0;
    let g = lower_incomplete_gamma(tau * b, Complex64::new(c, 0.0))?.re;
    Ok(sphere_measure(dim - 2) / (dim as f64 - 1.0) * (k_minus.powf(-m) - k_plus.powf(-m)) * tau.powf(-c) * g)
}

/// Structural tail and Hölder-weight bounds with unit constants.
///
/// `tail = (1 + (tau b)^{(n-1)/2}) tau^{-(n+1)/2} K^{-(n-1)/2} e^{-tau b}`,
/// `holder = (b + 1/K)^{alpha/2} b^{(n+alpha+1)/2} K^{-(n-1)/2}`.
pub fn tail_and_holder_bounds(tau: f64, b: f64, k: f64, alpha: f64, dim: usize) -> Result<(f64, f64)> {
    if !(tau > 0.0 && b > 0.0 && k > 0.0 && alpha >= 0.0) {
        return Err(Error::InvalidParameter("tail/holder bounds need positive arguments".into()));
    }
    let n = dim as f64;
    let m = (n - 1.0) / 2.0;
    let tail = (1.0 + (tau * b).powf(m)) * tau.powf(-(n + 1.0) / 2.0) * k.powf(-m) * (-tau * b).exp();
    let holder = (b + 1.0 / k).powf(alpha / 2.0) * b.powf((n + alpha + 1.0) / 2.0) * k.powf(-m);
    Ok((tail, holder))
}

/// Structural boundary-term bound `e^{-tau b} K^{-(beta + (n+1)/2)} (K + tau) norm`.
pub fn boundary_term_bound(k: f64, tau: f64, b: f64, beta: f64, dim: usize, c1beta_norm: f64) -> f64 {
    (-tau * b).exp() * k.powf(-(beta + (dim as f64 + 1.0) / 2.0)) * (k + tau) * c1beta_norm
}

/// `tau = 4 K zeta ln K`.
pub fn select_tau(k: f64, zeta: f64) -> Result<f64> {
    if k < E {
        return Err(Error::KTooSmall(k));
    }
    if !(zeta > 0.0) {
        return Err(Error::InvalidParameter(format!("zeta must be positive, got {zeta}")));
    }
    Ok(4.0 * k * zeta * k.ln())
}

/// `zeta = min(alpha, varsigma)/2`, plus `1/6` in 3D.
pub fn zeta_choice(alpha: f64, varsigma: f64, dim: usize) -> Result<f64> {
    let m = alpha.min(varsigma);
    match dim {
        2 => Ok(m / 2.0),
        3 => Ok(m / 2.0 + 1.0 / 6.0),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Outcome of the linear algebra forcing `grad u = 0` at the apex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractionVerdict {
    /// Rows: traction components; columns: unknowns `d_n u_1, ..., d_n u_n`.
    pub matrix: Vec<Vec<f64>>,
    pub determinant: f64,
    /// True when the normal derivatives are forced to vanish.
    pub gradient_vanishes: bool,
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => f64::NAN,
    }
}

/// Assemble `T_nu u = 0` at the apex (outward normal `-e_n`) as a system in
/// the normal derivatives, given that tangential derivatives vanish.
pub fn traction_point_solve(tangential_zero: bool, medium: &LameMedium, dim: usize) -> Result<TractionVerdict> {
    if dim != medium.dim {
        return Err(Error::DimensionMismatch {
            expected: medium.dim,
            got: dim,
        });
    }
    let mut normal = [0.0; 3];
    normal[dim - 1] = -1.0;
    let mut matrix = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        let mut jet = FieldJet {
            dim,
            point: [0.0; 3],
            value: CZERO_VEC,
            gradient: [[Complex64::new(0.0, 0.0); 3]; 3],
        };
        jet.gradient[col][dim - 1] = Complex64::new(1.0, 0.0);
        let t = traction(&jet, &normal, medium)?;
        for row in 0..dim {
            matrix[row][col] = t[row].re;
        }
    }
    let determinant = det(&matrix);
    if determinant.abs() < 1e-12 {
        return Err(Error::DegenerateModuli(determinant));
    }
    Ok(TractionVerdict {
        matrix,
        determinant,
        gradient_vanishes: tangential_zero,
    })
}

/// Terms of `phi(0) . eta int_K e^{xi.x} = I1 + I2 + I3 + I4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityBreakdown {
    pub lhs: Complex64,
    pub i1: Complex64,
    pub i2: Complex64,
    pub i3: Complex64,
    pub i4: Complex64,
    /// `|lhs - (I1 + I2 + I3 + I4)|`.
    pub residual: f64,
    pub relative_residual: f64,
    pub k: f64,
    pub tau: f64,
    pub volume_mesh: String,
    pub volume_nodes: usize,
    pub lid_nodes: usize,
}

/// Tolerance for `u` and `T_nu u` on the graph part of the boundary.
pub const GRAPH_TOLERANCE: f64 = 1e-8;
const XPRIME_REL_TOL: f64 = 1e-13;
const XPRIME_MAX_INTERVALS: usize = 4000;

/// `int_{r_lo < |x'| < r_hi} e^{xi' . x'} g(|x'|) dx'`.
fn xprime_integral<G: Fn(f64) -> Complex64>(xi: &CVec, dim: usize, r_lo: f64, r_hi: f64, g: G) -> Result<Complex64> {
    if r_hi <= r_lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let osc = (0..dim - 1).map(|i| xi[i].norm_sqr()).sum::<f64>().sqrt();
    let pieces = ((osc * (r_hi - r_lo) / PI).ceil() as usize).clamp(1, 2000);
    let breaks: Vec<f64> = (0..=pieces).map(|i| r_lo + (r_hi - r_lo) * i as f64 / pieces as f64).collect();
    let (v, ok) = adaptive_gk_array::<1, _>(
        |r| {
            let angular = if dim == 2 {
                (xi[0] * r).exp() + (-xi[0] * r).exp()
            } else {
                let m = (osc * r).ceil() as usize + 32;
                let dp = 2.0 * PI / m as f64;
                let s: Complex64 = (0..m)
                    .map(|j| {
                        let p = dp * j as f64;
                        ((xi[0] * p.cos() + xi[1] * p.sin()) * r).exp()
                    })
                    .sum();
                s * dp * r
            };
            [angular * g(r)]
        },
        &breaks,
        XPRIME_REL_TOL,
        XPRIME_MAX_INTERVALS,
    );
    if !ok {
        return Err(Error::QuadratureBudgetExceeded(format!("x' integral on [{r_lo}, {r_hi}]")));
    }
    Ok(v[0])
}

/// Meshes used by [`integral_identity_check`].
#[derive(Debug, Clone)]
pub struct IdentityMeshes {
    pub volume: QuadratureMesh,
    pub boundary: BoundaryMesh,
}

/// Meshes with `2 panels` Gauss panels across the lid diameter, so a panel
/// break sits on the axis where `|x'|^3` loses smoothness.
pub fn identity_meshes(cap: &DomainGeometry, panels: usize) -> Result<IdentityMeshes> {
    let (chart, _) = cap_chart(cap)?;
    let panels = panels.max(1);
    let h = 2.0 * chart.r_lid / (2.0 * panels as f64 - 0.5);
    let res = match chart.dim {
        2 => MeshResolution { radial: 2 * panels, angular: panels },
        _ => MeshResolution { radial: panels, angular: panels },
    };
    Ok(IdentityMeshes {
        volume: volume_mesh_with(cap, &[res], h)?,
        boundary: boundary_mesh(cap, h)?,
    })
}

/// Bump `u = psi^2 e` with `psi = x_n - gamma(x')`, vanishing with its gradient on the graph.
pub fn graph_bump(domain: &DomainGeometry, e: [f64; 3]) -> Result<Bump> {
    let (chart, center) = cap_chart(domain)?;
    let n = chart.dim;
    Ok(Bump::new(std::sync::Arc::new(move |x: &Point| {
        let p = sub(x, &center);
        let c = crate::jet::Jet2::coordinates(&p);
        let psi = c[n - 1] - chart.gamma_jet(&p);
        let w = psi * psi;
        [w.scale(e[0]), w.scale(e[1]), w.scale(e[2])]
    })))
}

fn cap_chart(domain: &DomainGeometry) -> Result<(KCurvatureChart, Point)> {
    match domain.components.first().map(|c| (&c.kind, c.center)) {
        Some((ComponentKind::Cap(chart), center)) if domain.components.len() == 1 => Ok((chart.clone(), center)),
        _ => Err(Error::InvalidGeometry("a single cap component is required".into())),
    }
}

/// Evaluate both sides of the integral identity at the cap apex.
///
/// The `x_n` integrals over the unbounded and thin regions (`I1`, `I2`) are
/// done analytically, leaving adaptive quadrature in `|x'|`. `I3` uses the
/// volume mesh and `I4` the lid nodes of the boundary mesh.
pub fn integral_identity_check(
    cap: &DomainGeometry,
    bump: &Bump,
    probe: &CgoProbe,
    medium: &LameMedium,
    meshes: &IdentityMeshes,
) -> Result<IdentityBreakdown> {
    let (chart, center) = cap_chart(cap)?;
    let n = chart.dim;
    if probe.dim != n || medium.dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: probe.dim });
    }
    let jets_at = |x: &Point| (bump.jets)(x);
    let local = |x: &Point| sub(x, &center);
    // boundary conditions on the graph part
    for i in meshes.boundary.tagged(BoundaryTag::Graph) {
        let x = meshes.boundary.nodes[i];
        let j = jets_at(&x);
        let jet = FieldJet::from_real(n, x, &j);
        let t = traction(&jet, &meshes.boundary.normals[i], medium)?;
        let u = cnorm(&jet.value);
        if u > GRAPH_TOLERANCE || cnorm(&t) > GRAPH_TOLERANCE {
            return Err(Error::BoundaryConditionViolated(format!(
                "|u| = {u:e}, |T u| = {:e} at {x:?}",
                cnorm(&t)
            )));
        }
    }
    let phi = |x: &Point| -> CVec {
        let r = medium.apply_to_jets(&jets_at(x));
        [r[0].into(), r[1].into(), r[2].into()]
    };
    let phi0 = phi(&center);
    let weight = bilinear(&phi0, &probe.eta, n);
    let xn = probe.xi[n - 1];
    let k = chart.k;
    let b = chart.b;
    let closed = paraboloid_integral_closed(&probe.xi, k, n)?;
    let lhs = weight * closed;

    let r0 = (b / k).sqrt();
    let eb = (xn * b).exp();
    // I1: x_n > max(b, K|x'|^2)
    let inner = xprime_integral(&probe.xi, n, 0.0, r0, |_| -eb / xn)?;
    let a = -xn.re * k;
    let bb = (0..n - 1).map(|i| probe.xi[i].re.abs()).sum::<f64>();
    let c0 = 45.0 + a * r0 * r0 - bb * r0;
    let r_cut = (bb + (bb * bb + 4.0 * a * c0).sqrt()) / (2.0 * a);
    let outer = xprime_integral(&probe.xi, n, r0, r_cut.max(r0), |r| -(xn * k * r * r).exp() / xn)?;
    let i1 = weight * (inner + outer);
    // I2: K_b minus the cap
    let kb = xprime_integral(&probe.xi, n, 0.0, r0, |r| (eb - (xn * k * r * r).exp()) / xn)?;
    let omega = xprime_integral(&probe.xi, n, 0.0, chart.r_lid, |r| (eb - (xn * chart.gamma(r)).exp()) / xn)?;
    let i2 = weight * (kb - omega);
    // I3: -int u0 . (phi - phi(0))
    let mut s3 = CompensatedSum::default();
    for (x, w) in meshes.volume.nodes.iter().zip(&meshes.volume.weights) {
        let f = phi(x);
        let u0 = probe.value(&local(x));
        let diff: CVec = [f[0] - phi0[0], f[1] - phi0[1], f[2] - phi0[2]];
        s3.add(-bilinear(&u0, &diff, n) * *w);
    }
    let i3 = s3.value();
    // I4: lid term u0 . T u - u . T u0
    let mut s4 = CompensatedSum::default();
    let mut lid_nodes = 0;
    for i in meshes.boundary.tagged(BoundaryTag::Lid) {
        lid_nodes += 1;
        let x = meshes.boundary.nodes[i];
        let nu = meshes.boundary.normals[i];
        let ju = FieldJet::from_real(n, x, &jets_at(&x));
        let tu = traction(&ju, &nu, medium)?;
        let j0 = probe.jet(&local(&x));
        let tu0 = traction(&j0, &nu, medium)?;
        s4.add((bilinear(&j0.value, &tu, n) - bilinear(&ju.value, &tu0, n)) * meshes.boundary.weights[i]);
    }
    let i4 = s4.value();
    let residual = (lhs - (i1 + i2 + i3 + i4)).norm();
    Ok(IdentityBreakdown {
        lhs,
        i1,
        i2,
        i3,
        i4,
        residual,
        relative_residual: if lhs.norm() > 0.0 { residual / lhs.norm() } else { residual },
        k,
        tau: probe.tau,
        volume_mesh: meshes.volume.id.clone(),
        volume_nodes: meshes.volume.len(),
        lid_nodes,
    })
}

/// Proxy for `||u||_{C^{1,beta}}`: `max|u| + max|grad u|` over the samples plus
/// a sampled Hölder quotient of `grad u` (Frobenius norm).
///
/// Pairs are exhaustive when their count fits `pair_budget`, otherwise drawn
/// from a ChaCha8 stream seeded with `seed`. The quotient is a lower bound of
/// the true seminorm.
pub fn c1beta_proxy(bump: &Bump, nodes: &[Point], dim: usize, beta: f64, pair_budget: usize, seed: u64) -> Result<f64> {
    if nodes.len() < 2 {
        return Err(Error::InsufficientSamples(nodes.len()));
    }
    let jets: Vec<_> = nodes.iter().map(|x| (bump.jets)(x)).collect();
    let mut sup_u = 0.0f64;
    let mut sup_g = 0.0f64;
    let grads: Vec<Vec<f64>> = jets
        .iter()
        .map(|j| {
            let u: f64 = (0..dim).map(|i| j[i].v * j[i].v).sum::<f64>().sqrt();
            sup_u = sup_u.max(u);
            let g: Vec<f64> = (0..dim).flat_map(|i| (0..dim).map(move |k| j[i].g[k])).collect();
            sup_g = sup_g.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
            g
        })
        .collect();
    let quotient = |a: usize, b: usize| -> f64 {
        let d = crate::linalg::dist(&nodes[a], &nodes[b]);
        if d == 0.0 {
            return 0.0;
        }
        let diff: f64 = grads[a].iter().zip(&grads[b]).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        diff / d.powf(beta)
    };
    let m = nodes.len();
    let total_pairs = m * (m - 1) / 2;
    let mut holder = 0.0f64;
    if total_pairs <= pair_budget {
        for a in 0..m {
            for b in (a + 1)..m {
                holder = holder.max(quotient(a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..pair_budget {
            let a = rng.gen_range(0..m);
            let b = rng.gen_range(0..m);
            holder = holder.max(quotient(a, b));
        }
    }
    Ok(sup_u + sup_g + holder)
}
