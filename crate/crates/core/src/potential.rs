//! The volume potential `(P f)(x) = -int_Omega G(x, y) f(y) dy` in 2D.
//!
//! `P f` is the outgoing solution of `L u + omega^2 u = f`. On mesh nodes it
//! is discretised by a Nyström rule with singularity subtraction:
//!
//! `int G(x_k, y) f(y) dy ~ sum_{j != k} w_j G(x_k, y_j) (f_j - f_k) + S(x_k) f_k`
//!
//! where `S(x) = int_{Omega_c} G(x, y) dy` over the component holding `x_k`.
//! `S` is closed-form on disks and computed by local polar quadrature on the
//! other shapes. Off-mesh interior points use local polar quadrature directly.

use crate::elastic::LameMedium;
use crate::error::{Error, Result};
use crate::geometry::{ComponentKind, DomainComponent, DomainGeometry, PolarLayout, QuadratureMesh};
use crate::greens::tensor_from_offset;
use crate::linalg::{matvec, norm, sub, CMat, CVec, Point, CZERO_MAT, CZERO_VEC};
use crate::quadrature::{adaptive_gk_array, graded_toward_zero, GaussLegendre};
use crate::special::cylinder;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `J1(z)/z`, smooth at the origin.
fn j1_over_z(z: f64) -> f64 {
    if z < 1e-4 {
        0.5 - z * z / 16.0
    } else {
        cylinder(z).j1 / z
    }
}

/// `int_{|y - c| < a} G(x, y) dy` for `x` inside the disk, in closed form.
///
/// Uses `int_disk Phi_k(x, y) dy = -1/k^2 + (i pi a / 2k) H1(k a) J0(k |x - c|)`.
pub fn disk_tensor_integral(x: &Point, center: &Point, radius: f64, medium: &LameMedium) -> CMat {
    let p = sub(x, center);
    let rho = norm(&p);
    let phat = if rho > 0.0 { [p[0] / rho, p[1] / rho, 0.0] } else { [1.0, 0.0, 0.0] };
    let w2 = medium.omega * medium.omega;
    let part = |k: f64| -> (Complex64, Complex64, Complex64) {
        let amp = I * PI * radius / (2.0 * k) * cylinder(k * radius).h1(k * radius);
        let j0 = cylinder(k * rho.max(1e-300)).j0;
        let j0 = if rho == 0.0 { 1.0 } else { j0 };
        let w = -1.0 / (k * k) + amp * j0;
        // Hess J0(k|p|) = k^2 [ -J0 phat phat^T + (J1(z)/z)(2 phat phat^T - I) ]
        let j1z = j1_over_z(k * rho);
        (w, amp * k * k * (-j0 + 2.0 * j1z), -amp * k * k * j1z)
    };
    let (ws, ps, is) = part(medium.kappa_s);
    let (_, pp, ip) = part(medium.kappa_p);
    let identity = ws / medium.mu + (is - ip) / w2;
    let projector = (ps - pp) / w2;
    let mut m = CZERO_MAT;
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = projector * (phat[i] * phat[j]);
            if i == j {
                m[i][j] += identity;
            }
        }
    }
    m
}

/// Distance from interior point `x` to the boundary of a 2D component along unit `e`.
fn ray_exit(c: &DomainComponent, x: &Point, e: &Point) -> f64 {
    let p = sub(x, &c.center);
    match &c.kind {
        ComponentKind::Ball { radius } => {
            let pe = p[0] * e[0] + p[1] * e[1];
            let pp = p[0] * p[0] + p[1] * p[1];
            -pe + (pe * pe + radius * radius - pp).max(0.0).sqrt()
        }
        ComponentKind::Ellipse { a, b, angle } => {
            let (s, co) = angle.sin_cos();
            let (u, v) = (co * p[0] + s * p[1], -s * p[0] + co * p[1]);
            let (du, dv) = (co * e[0] + s * e[1], -s * e[0] + co * e[1]);
            let qa = du * du / (a * a) + dv * dv / (b * b);
            let qb = 2.0 * (u * du / (a * a) + v * dv / (b * b));
            let qc = u * u / (a * a) + v * v / (b * b) - 1.0;
            (-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa)
        }
        ComponentKind::Cap(_) => {
            // Convex region: bisection on the inside predicate.
            let mut lo = 0.0;
            let mut hi = 2.0 * c.diameter() + 1e-12;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let y = [x[0] + mid * e[0], x[1] + mid * e[1], 0.0];
                if c.signed_distance(&y) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    }
}

/// Angles at which the ray-exit distance has a kink (cap corners).
fn corner_angles(c: &DomainComponent, x: &Point) -> Vec<f64> {
    match &c.kind {
        ComponentKind::Cap(chart) => [-chart.r_lid, chart.r_lid]
            .iter()
            .map(|s| {
                let dx = c.center[0] + s - x[0];
                let dy = c.center[1] + chart.b - x[1];
                dy.atan2(dx).rem_euclid(2.0 * PI)
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Local polar quadrature centred at a point of a 2D component.
#[derive(Debug, Clone)]
pub struct PolarRule {
    radial: GaussLegendre,
    levels: usize,
    rel_tol: f64,
    max_intervals: usize,
}

impl Default for PolarRule {
    fn default() -> Self {
        PolarRule {
            radial: GaussLegendre::new(8),
            levels: 10,
            rel_tol: 1e-11,
            max_intervals: 400,
        }
    }
}

impl PolarRule {
    /// `int_{Omega_c} G(x, y) f(y) dy` for `x` inside component `c`.
    pub fn integrate<F: Fn(&Point) -> CVec>(&self, c: &DomainComponent, x: &Point, medium: &LameMedium, f: &F) -> CVec {
        let mut breaks = vec![0.0];
        let mut corners = corner_angles(c, x);
        corners.sort_by(f64::total_cmp);
        breaks.extend(corners);
        breaks.push(2.0 * PI);
        adaptive_gk_array::<3, _>(
            |t| {
                let e = [t.cos(), t.sin(), 0.0];
                let r_max = ray_exit(c, x, &e);
                let mut acc = CZERO_VEC;
                for (r, w) in graded_toward_zero(&self.radial, r_max, self.levels) {
                    let d = [-r * e[0], -r * e[1], 0.0];
                    let y = [x[0] + r * e[0], x[1] + r * e[1], 0.0];
                    let g = tensor_from_offset(&d, r, medium);
                    let v = matvec(&g, &f(&y));
                    for i in 0..3 {
                        acc[i] += v[i] * (w * r);
                    }
                }
                acc
            },
            &breaks,
            self.rel_tol,
            self.max_intervals,
        )
        .0
    }

    /// `S(x) = int_{Omega_c} G(x, y) dy` for `x` inside component `c`.
    pub fn tensor_integral(&self, c: &DomainComponent, x: &Point, medium: &LameMedium) -> CMat {
        if let ComponentKind::Ball { radius } = c.kind {
            return disk_tensor_integral(x, &c.center, radius, medium);
        }
        let mut breaks = vec![0.0];
        let mut corners = corner_angles(c, x);
        corners.sort_by(f64::total_cmp);
        breaks.extend(corners);
        breaks.push(2.0 * PI);
        let flat = adaptive_gk_array::<4, _>(
            |t| {
                let e = [t.cos(), t.sin(), 0.0];
                let r_max = ray_exit(c, x, &e);
                let mut acc = [Complex64::new(0.0, 0.0); 4];
                for (r, w) in graded_toward_zero(&self.radial, r_max, self.levels) {
                    let d = [-r * e[0], -r * e[1], 0.0];
                    let g = tensor_from_offset(&d, r, medium);
                    acc[0] += g[0][0] * (w * r);
                    acc[1] += g[0][1] * (w * r);
                    acc[2] += g[1][0] * (w * r);
                    acc[3] += g[1][1] * (w * r);
                }
                acc
            },
            &breaks,
            self.rel_tol,
            self.max_intervals,
        )
        .0;
        let mut m = CZERO_MAT;
        m[0][0] = flat[0];
        m[0][1] = flat[1];
        m[1][0] = flat[2];
        m[1][1] = flat[3];
        m
    }
}

/// Discrete volume potential on a 2D mesh.
#[derive(Debug, Clone)]
pub struct VolumePotential {
    pub medium: LameMedium,
    pub domain: DomainGeometry,
    pub mesh: QuadratureMesh,
    /// `S(x_k)` for each node.
    pub self_integrals: Vec<CMat>,
}

impl VolumePotential {
    pub fn new(domain: &DomainGeometry, mesh: &QuadratureMesh, medium: &LameMedium) -> Result<Self> {
        if medium.dim != 2 || domain.dim != 2 {
            return Err(Error::UnsupportedDimension(medium.dim.max(domain.dim)));
        }
        let rule = PolarRule::default();
        let self_integrals = mesh
            .nodes
            .par_iter()
            .zip(mesh.component.par_iter())
            .map(|(x, &c)| rule.tensor_integral(&domain.components[c], x, medium))
            .collect();
        Ok(VolumePotential {
            medium: *medium,
            domain: domain.clone(),
            mesh: mesh.clone(),
            self_integrals,
        })
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    /// `int_Omega G(x_k, y) f(y) dy` at every node (without the outgoing sign).
    pub fn integrate_nodes(&self, f: &[CVec]) -> Vec<CVec> {
        let m = &self.mesh;
        (0..m.len())
            .into_par_iter()
            .map(|k| {
                let xk = m.nodes[k];
                let mut acc = matvec(&self.self_integrals[k], &f[k]);
                for j in 0..m.len() {
                    if j == k {
                        continue;
                    }
                    let d = sub(&xk, &m.nodes[j]);
                    let g = tensor_from_offset(&d, norm(&d), &self.medium);
                    let mut fj = f[j];
                    if m.component[j] == m.component[k] {
                        for i in 0..2 {
                            fj[i] -= f[k][i];
                        }
                    }
                    let v = matvec(&g, &fj);
                    for i in 0..2 {
                        acc[i] += v[i] * m.weights[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// `(P f)(x_k) = -int G(x_k, y) f(y) dy` at every node.
    pub fn apply(&self, f: &[CVec]) -> Vec<CVec> {
        self.integrate_nodes(f)
            .into_iter()
            .map(|v| [-v[0], -v[1], -v[2]])
            .collect()
    }

    /// Dense matrix of `P` acting on interleaved unknowns `(f_k)_1, (f_k)_2`.
    pub fn assemble(&self) -> DMatrix<Complex64> {
        let m = &self.mesh;
        let n = m.len();
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut row = vec![Complex64::new(0.0, 0.0); 4 * n];
                let xk = m.nodes[k];
                let mut diag = self.self_integrals[k];
                for j in 0..n {
                    if j == k {
                        continue;
                    }
                    let d = sub(&xk, &m.nodes[j]);
                    let g = tensor_from_offset(&d, norm(&d), &self.medium);
                    for a in 0..2 {
                        for b in 0..2 {
                            let v = g[a][b] * m.weights[j];
                            row[a * 2 * n + 2 * j + b] = -v;
                            if m.component[j] == m.component[k] {
                                diag[a][b] -= v;
                            }
                        }
                    }
                }
                for a in 0..2 {
                    for b in 0..2 {
                        row[a * 2 * n + 2 * k + b] = -diag[a][b];
                    }
                }
                row
            })
            .collect();
        let mut mat = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for (k, row) in rows.iter().enumerate() {
            for a in 0..2 {
                for c in 0..2 * n {
                    mat[(2 * k + a, c)] = row[a * 2 * n + c];
                }
            }
        }
        mat
    }

    /// `int_Omega G(x, y) f(y) dy` at an arbitrary point, `f` callable.
    pub fn integrate_at<F: Fn(&Point) -> CVec>(&self, x: &Point, f: &F) -> CVec {
        integrate_at(&self.domain, &self.mesh, &self.medium, x, f)
    }
}

/// `int_Omega G(x, y) f(y) dy` at an arbitrary point, `f` callable.
///
/// Points inside a component use local polar quadrature on that component;
/// all other contributions use the mesh rule, which is accurate once `x` is
/// a few mesh spacings away from the remaining components.
pub fn integrate_at<F: Fn(&Point) -> CVec>(
    domain: &DomainGeometry,
    mesh: &QuadratureMesh,
    medium: &LameMedium,
    x: &Point,
    f: &F,
) -> CVec {
    let inside = domain.component_of(x);
    let mut acc = CZERO_VEC;
    if let Some(c) = inside {
        acc = PolarRule::default().integrate(&domain.components[c], x, medium, f);
    }
    for j in 0..mesh.len() {
        if Some(mesh.component[j]) == inside {
            continue;
        }
        let d = sub(x, &mesh.nodes[j]);
        let r = norm(&d);
        if r == 0.0 {
            continue;
        }
        let g = tensor_from_offset(&d, r, medium);
        let v = matvec(&g, &f(&mesh.nodes[j]));
        for i in 0..2 {
            acc[i] += v[i] * mesh.weights[j];
        }
    }
    acc
}

/// Barycentric weights of the nodes `x`.
fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = (0..x.len())
        .map(|i| {
            let p: f64 = (0..x.len()).filter(|&k| k != i).map(|k| x[i] - x[k]).product();
            1.0 / p
        })
        .collect();
    let m = w.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    for v in &mut w {
        *v /= m;
    }
    w
}

/// Periodic cardinal function of `n` equispaced nodes.
fn periodic_sinc(theta: f64, n: usize) -> f64 {
    let half = 0.5 * theta;
    if half.sin().abs() < 1e-14 {
        return if n % 2 == 1 || half.cos() > 0.0 { 1.0 } else { -1.0 };
    }
    let nf = n as f64;
    if n % 2 == 1 {
        (nf * half).sin() / (nf * half.sin())
    } else {
        (nf * half).sin() / (nf * half.tan())
    }
}

/// Spectral interpolant of nodal values on a disk or ellipse tensor layout.
///
/// Polynomial in the unit radius through the Gauss nodes, trigonometric in
/// the angle. Exact-to-rounding for fields that are smooth on the component.
#[derive(Debug, Clone)]
pub struct PolarInterpolant {
    component: DomainComponent,
    layout: PolarLayout,
    bary: Vec<f64>,
    values: Vec<CVec>,
}

impl PolarInterpolant {
    pub fn new(component: &DomainComponent, layout: &PolarLayout, values: &[CVec]) -> Result<Self> {
        let n = layout.radii.len() * layout.angular;
        if values.len() < layout.start + n {
            return Err(Error::MeshMismatch {
                field: values.len(),
                mesh: layout.start + n,
            });
        }
        if matches!(component.kind, ComponentKind::Cap(_)) || component.dim != 2 {
            return Err(Error::InvalidGeometry("polar layouts exist for 2D disks and ellipses only".into()));
        }
        Ok(PolarInterpolant {
            component: component.clone(),
            layout: layout.clone(),
            bary: barycentric_weights(&layout.radii),
            values: values[layout.start..layout.start + n].to_vec(),
        })
    }

    /// Unit radius and angle of `x` in the reference frame.
    fn reference(&self, x: &Point) -> (f64, f64) {
        let p = sub(x, &self.component.center);
        match self.component.kind {
            ComponentKind::Ball { radius } => ((p[0] * p[0] + p[1] * p[1]).sqrt() / radius, p[1].atan2(p[0])),
            ComponentKind::Ellipse { a, b, angle } => {
                let (s, c) = angle.sin_cos();
                let u = (c * p[0] + s * p[1]) / a;
                let v = (-s * p[0] + c * p[1]) / b;
                ((u * u + v * v).sqrt(), v.atan2(u))
            }
            ComponentKind::Cap(_) => unreachable!("rejected in new"),
        }
    }

    pub fn eval(&self, x: &Point) -> CVec {
        let (s, t) = self.reference(x);
        let radii = &self.layout.radii;
        let na = self.layout.angular;
        let mut lr: Vec<f64> = Vec::with_capacity(radii.len());
        if let Some(i) = radii.iter().position(|r| (s - r).abs() < 1e-15) {
            lr.extend((0..radii.len()).map(|k| if k == i { 1.0 } else { 0.0 }));
        } else {
            let terms: Vec<f64> = radii.iter().zip(&self.bary).map(|(r, w)| w / (s - r)).collect();
            let sum: f64 = terms.iter().sum();
            lr.extend(terms.iter().map(|v| v / sum));
        }
        let dt = 2.0 * PI / na as f64;
        let la: Vec<f64> = (0..na).map(|j| periodic_sinc(t - dt * (j as f64 + 0.5), na)).collect();
        let mut out = CZERO_VEC;
        for (i, wr) in lr.iter().enumerate() {
            if *wr == 0.0 {
                continue;
            }
            let row = &self.values[i * na..(i + 1) * na];
            for (v, wa) in row.iter().zip(&la) {
                let w = wr * wa;
                for k in 0..2 {
                    out[k] += v[k] * w;
                }
            }
        }
        out
    }
}
