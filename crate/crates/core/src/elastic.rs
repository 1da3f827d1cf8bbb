//! Lamé medium, traction operator, pressure/shear splitting and field norms.

use crate::error::{Error, Result};
use crate::fd::{self, FdOrder};
use crate::geometry::QuadratureMesh;
use crate::jet::Jet2;
use crate::linalg::{cnorm, CMat, CVec, Point, CZERO_VEC, ZERO_C};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Homogeneous isotropic elastic background at a fixed frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LameMedium {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
    pub dim: usize,
}

/// Build a medium, checking strong convexity `mu > 0`, `n lambda + 2 mu > 0`.
pub fn make_medium(lambda: f64, mu: f64, omega: f64, dim: usize) -> Result<LameMedium> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidFrequency(omega));
    }
    let cone = dim as f64 * lambda + 2.0 * mu;
    if !(mu > 0.0) || !(cone > 0.0) {
        return Err(Error::StrongConvexityViolated { mu, cone });
    }
    let kappa_p = omega / (lambda + 2.0 * mu).sqrt();
    let kappa_s = omega / mu.sqrt();
    if !(kappa_p < kappa_s) {
        return Err(Error::StrongConvexityViolated { mu, cone });
    }
    Ok(LameMedium {
        lambda,
        mu,
        omega,
        kappa_p,
        kappa_s,
        dim,
    })
}

impl LameMedium {
    /// Same moduli at another frequency.
    pub fn with_omega(&self, omega: f64) -> Result<LameMedium> {
        make_medium(self.lambda, self.mu, omega, self.dim)
    }

    /// Shear wavelength `2 pi / kappa_s`, the shortest wavelength in the medium.
    pub fn shear_wavelength(&self) -> f64 {
        2.0 * PI / self.kappa_s
    }

    /// Pressure wavelength `2 pi / kappa_p`.
    pub fn pressure_wavelength(&self) -> f64 {
        2.0 * PI / self.kappa_p
    }

    /// `(L u + omega^2 u)(x)` for a field given by component jets.
    pub fn apply_to_jets(&self, u: &[Jet2; 3]) -> [f64; 3] {
        let n = self.dim;
        let mut out = [0.0; 3];
        for i in 0..n {
            let lap = u[i].laplacian(n);
            let grad_div: f64 = (0..n).map(|j| u[j].h[i][j]).sum();
            out[i] = self.mu * lap + (self.lambda + self.mu) * grad_div + self.omega * self.omega * u[i].v;
        }
        out
    }

    /// `(L u + omega^2 u)(x)` by centered differences of a callable field.
    pub fn residual_fd<F: Fn(&Point) -> CVec>(&self, u: &F, x: &Point, h: f64, order: FdOrder) -> CVec {
        let n = self.dim;
        let hess = fd::hessian(u, x, h, n, order);
        let u0 = u(x);
        let mut out = CZERO_VEC;
        for i in 0..n {
            let mut lap = ZERO_C;
            let mut grad_div = ZERO_C;
            for j in 0..n {
                lap += hess[j][j][i];
                grad_div += hess[i][j][j];
            }
            out[i] = lap * self.mu + grad_div * (self.lambda + self.mu) + u0[i] * (self.omega * self.omega);
        }
        out
    }
}

/// Value and first derivatives of a displacement at a point.
///
/// `gradient[i][j]` is `d_j u_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldJet {
    pub dim: usize,
    pub point: Point,
    pub value: CVec,
    pub gradient: CMat,
}

impl FieldJet {
    /// Complex jet from real component jets.
    pub fn from_real(dim: usize, point: Point, u: &[Jet2; 3]) -> Self {
        let mut value = CZERO_VEC;
        let mut gradient = [[ZERO_C; 3]; 3];
        for i in 0..dim {
            value[i] = Complex64::new(u[i].v, 0.0);
            for j in 0..dim {
                gradient[i][j] = Complex64::new(u[i].g[j], 0.0);
            }
        }
        FieldJet {
            dim,
            point,
            value,
            gradient,
        }
    }

    pub fn divergence(&self) -> Complex64 {
        (0..self.dim).map(|i| self.gradient[i][i]).sum()
    }
}

/// Traction `T_nu u` at the jet's point for unit normal `nu`.
///
/// 2D: `2 mu d_nu u + lambda nu div u + mu nu_perp (d2 u1 - d1 u2)`;
/// 3D: `2 mu d_nu u + lambda nu div u + mu nu x curl u`.
pub fn traction(jet: &FieldJet, normal: &Point, medium: &LameMedium) -> Result<CVec> {
    let n = jet.dim;
    if n != medium.dim {
        return Err(Error::DimensionMismatch {
            expected: medium.dim,
            got: n,
        });
    }
    let len = normal[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
    if (len - 1.0).abs() > 1e-12 || normal[n..].iter().any(|v| *v != 0.0) {
        return Err(Error::NonUnitNormal(len));
    }
    let g = &jet.gradient;
    let div = jet.divergence();
    let mut out = CZERO_VEC;
    for i in 0..n {
        let dnu: Complex64 = (0..n).map(|j| g[i][j] * normal[j]).sum();
        out[i] = dnu * (2.0 * medium.mu) + div * (medium.lambda * normal[i]);
    }
    if n == 2 {
        let rot = g[0][1] - g[1][0];
        out[0] += rot * (medium.mu * -normal[1]);
        out[1] += rot * (medium.mu * normal[0]);
    } else {
        let curl = [g[2][1] - g[1][2], g[0][2] - g[2][0], g[1][0] - g[0][1]];
        let cross = [
            curl[2] * normal[1] - curl[1] * normal[2],
            curl[0] * normal[2] - curl[2] * normal[0],
            curl[1] * normal[0] - curl[0] * normal[1],
        ];
        for i in 0..3 {
            out[i] += cross[i] * medium.mu;
        }
    }
    Ok(out)
}

/// Complex vector samples at a list of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledVectorField {
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub values: Vec<CVec>,
    pub mesh_ref: Option<String>,
}

impl SampledVectorField {
    pub fn new(dim: usize, nodes: Vec<Point>, values: Vec<CVec>, mesh_ref: Option<String>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::MeshMismatch {
                field: values.len(),
                mesh: nodes.len(),
            });
        }
        if values
            .iter()
            .any(|v| v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()))
        {
            return Err(Error::NonFiniteField);
        }
        Ok(SampledVectorField {
            dim,
            nodes,
            values,
            mesh_ref,
        })
    }

    /// Sample a callable field on the nodes.
    pub fn sample<F: Fn(&Point) -> CVec>(dim: usize, nodes: Vec<Point>, f: F, mesh_ref: Option<String>) -> Result<Self> {
        let values = nodes.iter().map(&f).collect();
        Self::new(dim, nodes, values, mesh_ref)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest pointwise Euclidean magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(cnorm).fold(0.0, f64::max)
    }
}

/// Uniform Cartesian grid; node `(i, j, k)` sits at `origin + spacing (i, j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularGrid {
    pub dim: usize,
    pub origin: Point,
    pub spacing: f64,
    pub shape: [usize; 3],
}

impl RegularGrid {
    /// Grid with `count` nodes per axis centered at `center`.
    pub fn centered(dim: usize, center: Point, spacing: f64, count: usize) -> Self {
        let half = spacing * (count as f64 - 1.0) / 2.0;
        let mut origin = center;
        let mut shape = [1; 3];
        for a in 0..dim {
            origin[a] -= half;
            shape[a] = count;
        }
        RegularGrid {
            dim,
            origin,
            spacing,
            shape,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        i[0] + self.shape[0] * (i[1] + self.shape[1] * i[2])
    }

    pub fn point(&self, i: [usize; 3]) -> Point {
        let mut p = self.origin;
        for a in 0..self.dim {
            p[a] += self.spacing * i[a] as f64;
        }
        p
    }

    /// All node positions in storage order.
    pub fn nodes(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.len());
        for k in 0..self.shape[2] {
            for j in 0..self.shape[1] {
                for i in 0..self.shape[0] {
                    out.push(self.point([i, j, k]));
                }
            }
        }
        out
    }

    /// Multi-indices of nodes at least `margin` away from every face.
    pub fn interior(&self, margin: usize) -> Vec<[usize; 3]> {
        let lo = |a: usize| if a < self.dim { margin } else { 0 };
        let hi = |a: usize| {
            if a < self.dim {
                self.shape[a].saturating_sub(margin)
            } else {
                self.shape[a]
            }
        };
        let mut out = Vec::new();
        for k in lo(2)..hi(2) {
            for j in lo(1)..hi(1) {
                for i in lo(0)..hi(0) {
                    out.push([i, j, k]);
                }
            }
        }
        out
    }

    /// Sample a callable field on all nodes.
    pub fn sample<F: Fn(&Point) -> CVec>(&self, f: F) -> Result<SampledVectorField> {
        SampledVectorField::sample(self.dim, self.nodes(), f, Some("regular-grid".into()))
    }
}

/// Split a gridded field into pressure and shear parts.
///
/// `u_p = -kappa_p^{-2} grad div u` and `u_s = kappa_s^{-2} (grad div u - Laplacian u)`,
/// the latter being the curl-curl form in both dimensions. Derivatives use
/// centered stencils of the requested order; only interior nodes are returned.
pub fn helmholtz_split(
    grid: &RegularGrid,
    u: &SampledVectorField,
    medium: &LameMedium,
    order: FdOrder,
) -> Result<(SampledVectorField, SampledVectorField)> {
    if u.len() != grid.len() {
        return Err(Error::MeshMismatch {
            field: u.len(),
            mesh: grid.len(),
        });
    }
    if grid.dim != medium.dim {
        return Err(Error::DimensionMismatch {
            expected: medium.dim,
            got: grid.dim,
        });
    }
    let ppw = medium.shear_wavelength() / grid.spacing;
    if ppw < 10.0 {
        return Err(Error::GridTooCoarse { ppw, required: 10.0 });
    }
    let n = grid.dim;
    let r = order.half_width();
    let w1 = order.first();
    let w2 = order.second();
    let h = grid.spacing;
    let at = |idx: [usize; 3], axis: usize, off: i64, axis2: usize, off2: i64| -> &CVec {
        let mut m = idx;
        m[axis] = (m[axis] as i64 + off) as usize;
        m[axis2] = (m[axis2] as i64 + off2) as usize;
        &u.values[grid.index(m)]
    };
    let interior = grid.interior(r);
    let mut nodes = Vec::with_capacity(interior.len());
    let mut up = Vec::with_capacity(interior.len());
    let mut us = Vec::with_capacity(interior.len());
    for idx in interior {
        // second[j][c] = d_j^2 u_c ; mixed[j][k][c] = d_j d_k u_c
        let mut second = [CZERO_VEC; 3];
        let mut mixed = [[CZERO_VEC; 3]; 3];
        for j in 0..n {
            for (a, w) in w2.iter().enumerate() {
                let v = at(idx, j, a as i64 - r as i64, j, 0);
                for c in 0..n {
                    second[j][c] += v[c] * *w;
                }
            }
            for k in (j + 1)..n {
                for (a, wa) in w1.iter().enumerate() {
                    if *wa == 0.0 {
                        continue;
                    }
                    for (b, wb) in w1.iter().enumerate() {
                        if *wb == 0.0 {
                            continue;
                        }
                        let v = at(idx, j, a as i64 - r as i64, k, b as i64 - r as i64);
                        for c in 0..n {
                            mixed[j][k][c] += v[c] * (wa * wb);
                        }
                    }
                }
                mixed[k][j] = mixed[j][k];
            }
        }
        let inv_h2 = 1.0 / (h * h);
        let mut grad_div = CZERO_VEC;
        let mut curl_curl = CZERO_VEC;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    grad_div[i] += second[i][i] * inv_h2;
                } else {
                    grad_div[i] += mixed[i][j][j] * inv_h2;
                    curl_curl[i] += (mixed[i][j][j] - second[j][i]) * inv_h2;
                }
            }
        }
        let mut p = CZERO_VEC;
        let mut s = CZERO_VEC;
        for i in 0..n {
            p[i] = grad_div[i] * (-1.0 / (medium.kappa_p * medium.kappa_p));
            s[i] = curl_curl[i] * (1.0 / (medium.kappa_s * medium.kappa_s));
        }
        nodes.push(grid.point(idx));
        up.push(p);
        us.push(s);
    }
    Ok((
        SampledVectorField::new(n, nodes.clone(), up, Some("regular-grid-interior".into()))?,
        SampledVectorField::new(n, nodes, us, Some("regular-grid-interior".into()))?,
    ))
}

/// Sampled lower bound of the Hölder seminorm `[phi]_delta`.
///
/// Takes the maximum over components and node pairs of
/// `|phi_i(x) - phi_i(y)| / |x - y|^delta`. All pairs are used when their
/// number does not exceed `pair_budget`; otherwise the first `pair_budget`
/// pairs of a seeded stream are used, so a larger budget never lowers the value.
pub fn holder_seminorm(field: &SampledVectorField, delta: f64, pair_budget: usize, seed: u64) -> Result<f64> {
    let max_delta = if field.dim == 3 { 0.5 } else { 1.0 };
    if !(delta > 0.0 && delta <= max_delta) {
        return Err(Error::InvalidExponent(delta));
    }
    let n = field.len();
    if n < 2 {
        return Err(Error::InsufficientSamples(n));
    }
    let quotient = |a: usize, b: usize| -> f64 {
        let d = crate::linalg::dist(&field.nodes[a], &field.nodes[b]);
        if d == 0.0 {
            return 0.0;
        }
        let scale = d.powf(delta);
        (0..field.dim)
            .map(|c| (field.values[a][c] - field.values[b][c]).norm() / scale)
            .fold(0.0, f64::max)
    };
    let total_pairs = n * (n - 1) / 2;
    let mut best = 0.0f64;
    if total_pairs <= pair_budget {
        for a in 0..n {
            for b in (a + 1)..n {
                best = best.max(quotient(a, b));
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut drawn = 0;
        while drawn < pair_budget {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            best = best.max(quotient(a, b));
            drawn += 1;
        }
    }
    Ok(best)
}

/// Weighted L2 norm and maximum modulus of a field sampled on mesh nodes.
pub fn field_norms(field: &SampledVectorField, mesh: &QuadratureMesh) -> Result<(f64, f64)> {
    if field.len() != mesh.len() {
        return Err(Error::MeshMismatch {
            field: field.len(),
            mesh: mesh.len(),
        });
    }
    if let Some(r) = &field.mesh_ref {
        if r != &mesh.id {
            return Err(Error::MeshMismatch {
                field: field.len(),
                mesh: mesh.len(),
            });
        }
    }
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for (v, w) in field.values.iter().zip(&mesh.weights) {
        let m = cnorm(v);
        l2 += w * m * m;
        linf = linf.max(m);
    }
    Ok((l2.sqrt(), linf))
}

/// Random unit direction in the plane or space, for tests and sweeps.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Point {
    loop {
        let mut v = [0.0; 3];
        for c in v.iter_mut().take(dim) {
            *c = rng.gen_range(-1.0..1.0);
        }
        let n = crate::linalg::norm(&v);
        if n > 0.1 && n <= 1.0 {
            return crate::linalg::scale(&v, 1.0 / n);
        }
    }
}
