//! Source scattering: volume-potential solves, far-field patterns and
//! manufactured non-radiating sources.

use crate::elastic::{LameMedium, SampledVectorField};
use crate::error::{Error, Result};
use crate::geometry::{DomainGeometry, QuadratureMesh};
use crate::greens::farfield_constants;
use crate::jet::Jet2;
use crate::linalg::{dot, CVec, Point, CZERO_VEC};
use crate::potential::{integrate_at, VolumePotential};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

/// Shared callable vector field.
pub type VectorFn = Arc<dyn Fn(&Point) -> CVec + Send + Sync>;

/// Source problem `L u + omega^2 u = chi_Omega phi` with the radiation condition.
#[derive(Clone)]
pub struct SourceProblem {
    pub domain: DomainGeometry,
    pub phi: VectorFn,
    pub medium: LameMedium,
    /// Whether `phi` is known to be nonzero near the boundary; informational only.
    pub nonzero_near_boundary: Option<bool>,
}

impl std::fmt::Debug for SourceProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SourceProblem")
            .field("domain", &self.domain)
            .field("medium", &self.medium)
            .field("nonzero_near_boundary", &self.nonzero_near_boundary)
            .finish_non_exhaustive()
    }
}

impl SourceProblem {
    pub fn new(domain: DomainGeometry, phi: VectorFn, medium: LameMedium) -> Result<Self> {
        if domain.dim != medium.dim {
            return Err(Error::DimensionMismatch {
                expected: medium.dim,
                got: domain.dim,
            });
        }
        Ok(SourceProblem {
            domain,
            phi,
            medium,
            nonzero_near_boundary: None,
        })
    }

    /// Constant intensity `value` on the whole domain.
    pub fn constant(domain: DomainGeometry, value: CVec, medium: LameMedium) -> Result<Self> {
        let mut p = Self::new(domain, Arc::new(move |_| value), medium)?;
        p.nonzero_near_boundary = Some(value.iter().any(|c| c.norm() > 0.0));
        Ok(p)
    }

    /// Source values at the mesh nodes.
    pub fn sample(&self, mesh: &QuadratureMesh) -> Vec<CVec> {
        mesh.nodes.iter().map(|p| (self.phi)(p)).collect()
    }
}

fn check_forward(problem: &SourceProblem, mesh: &QuadratureMesh) -> Result<()> {
    if problem.medium.dim != 2 {
        return Err(Error::UnsupportedDimension(problem.medium.dim));
    }
    if mesh.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: mesh.dim });
    }
    let feature = problem
        .domain
        .components
        .iter()
        .map(|c| c.feature_size())
        .fold(f64::INFINITY, f64::min);
    if mesh.h >= feature {
        return Err(Error::MeshTooCoarse { h: mesh.h, feature });
    }
    Ok(())
}

/// Outgoing solution `u = -int G phi` at arbitrary points.
///
/// Interior points get local polar quadrature on their own component, so the
/// weakly singular kernel is integrated accurately; other contributions use
/// the mesh rule.
pub fn solve_source(problem: &SourceProblem, mesh: &QuadratureMesh, eval_points: &[Point]) -> Result<SampledVectorField> {
    check_forward(problem, mesh)?;
    let phi = &problem.phi;
    let values: Vec<CVec> = eval_points
        .par_iter()
        .map(|x| {
            let v = integrate_at(&problem.domain, mesh, &problem.medium, x, &|y: &Point| phi(y));
            [-v[0], -v[1], -v[2]]
        })
        .collect();
    SampledVectorField::new(2, eval_points.to_vec(), values, None)
}

/// Outgoing solution at the mesh nodes by the Nyström rule.
pub fn solve_source_on_mesh(problem: &SourceProblem, mesh: &QuadratureMesh) -> Result<SampledVectorField> {
    check_forward(problem, mesh)?;
    let pot = VolumePotential::new(&problem.domain, mesh, &problem.medium)?;
    let values = pot.apply(&problem.sample(mesh));
    SampledVectorField::new(2, mesh.nodes.clone(), values, Some(mesh.id.clone()))
}

/// Far-field pattern `u^inf = up_inf xhat + us_inf` sampled on the unit circle/sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    pub directions: Vec<Point>,
    /// Quadrature weights of the directions on the unit circle.
    pub weights: Vec<f64>,
    pub up_inf: Vec<Complex64>,
    pub us_inf: Vec<CVec>,
}

/// `n` equispaced directions on the unit circle with trapezoid weights.
pub fn circle_directions(n: usize) -> (Vec<Point>, Vec<f64>) {
    let dirs = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    (dirs, vec![2.0 * PI / n as f64; n])
}

impl FarFieldPattern {
    pub fn zeros(directions: Vec<Point>, weights: Vec<f64>) -> Self {
        let n = directions.len();
        FarFieldPattern {
            directions,
            weights,
            up_inf: vec![Complex64::new(0.0, 0.0); n],
            us_inf: vec![CZERO_VEC; n],
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Total pattern `up_inf xhat + us_inf` in direction `i`.
    pub fn total(&self, i: usize) -> CVec {
        let d = self.directions[i];
        let mut v = self.us_inf[i];
        for k in 0..3 {
            v[k] += self.up_inf[i] * d[k];
        }
        v
    }

    /// Pointwise difference of two patterns on the same directions.
    pub fn difference(&self, other: &FarFieldPattern) -> Result<FarFieldPattern> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut out = self.clone();
        for i in 0..self.len() {
            out.up_inf[i] -= other.up_inf[i];
            for k in 0..3 {
                out.us_inf[i][k] -= other.us_inf[i][k];
            }
        }
        Ok(out)
    }

    /// CSV rows `angle,re_up,im_up,re_us1,im_us1,re_us2,im_us2` at 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let e = |err: csv::Error| Error::Export(err.to_string());
        w.write_record(["angle", "re_up", "im_up", "re_us1", "im_us1", "re_us2", "im_us2"])
            .map_err(e)?;
        for i in 0..self.len() {
            let d = self.directions[i];
            let f = |x: f64| format!("{x:.16e}");
            w.write_record([
                f(d[1].atan2(d[0])),
                f(self.up_inf[i].re),
                f(self.up_inf[i].im),
                f(self.us_inf[i][0].re),
                f(self.us_inf[i][0].im),
                f(self.us_inf[i][1].re),
                f(self.us_inf[i][1].im),
            ])
            .map_err(e)?;
        }
        w.flush().map_err(|err| Error::Export(err.to_string()))
    }
}

/// Far field of `u = -int G rho` for a density sampled on the mesh.
pub fn farfield_of_density(
    mesh: &QuadratureMesh,
    medium: &LameMedium,
    rho: &[CVec],
    directions: &[Point],
    weights: &[f64],
) -> Result<FarFieldPattern> {
    if rho.len() != mesh.len() {
        return Err(Error::MeshMismatch {
            field: rho.len(),
            mesh: mesh.len(),
        });
    }
    if let Some(bad) = directions.iter().find(|d| (crate::linalg::norm(d) - 1.0).abs() > 1e-12) {
        return Err(Error::InvalidDirection(format!("{bad:?} is not a unit vector")));
    }
    let c = farfield_constants(medium);
    let n = medium.dim;
    let results: Vec<(Complex64, CVec)> = directions
        .par_iter()
        .map(|xh| {
            let mut up = Complex64::new(0.0, 0.0);
            let mut us = CZERO_VEC;
            for ((y, w), f) in mesh.nodes.iter().zip(&mesh.weights).zip(rho) {
                let t = dot(xh, y);
                let ep = Complex64::from_polar(*w, -medium.kappa_p * t);
                let es = Complex64::from_polar(*w, -medium.kappa_s * t);
                let xf: Complex64 = (0..n).map(|k| f[k] * xh[k]).sum();
                up += ep * xf;
                for k in 0..n {
                    us[k] += es * (f[k] - xf * xh[k]);
                }
            }
            up *= -c.c_p;
            for v in us.iter_mut() {
                *v *= -c.c_s;
            }
            (up, us)
        })
        .collect();
    let (up_inf, us_inf) = results.into_iter().unzip();
    Ok(FarFieldPattern {
        directions: directions.to_vec(),
        weights: weights.to_vec(),
        up_inf,
        us_inf,
    })
}

/// Far-field pattern of the source problem on the given directions (trapezoid weights).
pub fn farfield_of_source(problem: &SourceProblem, mesh: &QuadratureMesh, directions: &[Point]) -> Result<FarFieldPattern> {
    check_forward(problem, mesh)?;
    let weights = vec![2.0 * PI / directions.len().max(1) as f64; directions.len()];
    farfield_of_density(mesh, &problem.medium, &problem.sample(mesh), directions, &weights)
}

/// `L^2` norm of the pattern over the unit circle.
pub fn farfield_norm(pattern: &FarFieldPattern) -> f64 {
    (0..pattern.len())
        .map(|i| {
            let s: f64 = pattern.us_inf[i].iter().map(|z| z.norm_sqr()).sum();
            pattern.weights[i] * (pattern.up_inf[i].norm_sqr() + s)
        })
        .sum::<f64>()
        .sqrt()
}

/// Shared jet-valued profile `x -> (u_1, u_2, u_3)`.
pub type JetFn = Arc<dyn Fn(&Point) -> [Jet2; 3] + Send + Sync>;

/// A displacement that vanishes to second order on the boundary.
#[derive(Clone)]
pub struct Bump {
    pub jets: JetFn,
    /// True when the support is known to stay away from the boundary.
    pub compact: bool,
}

impl std::fmt::Debug for Bump {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bump").field("compact", &self.compact).finish_non_exhaustive()
    }
}

impl Bump {
    /// Arbitrary jet-valued profile; vanishing is checked by [`make_nonradiating`].
    pub fn new(jets: JetFn) -> Self {
        Bump { jets, compact: false }
    }

    /// `u = l(x)^2 g(x)` with `l` the level function of the component nearest `x`.
    pub fn level_squared<G>(domain: &DomainGeometry, g: G) -> Self
    where
        G: Fn(&[Jet2; 3]) -> [Jet2; 3] + Send + Sync + 'static,
    {
        let domain = domain.clone();
        Bump::new(Arc::new(move |x: &Point| {
            let c = domain
                .components
                .iter()
                .min_by(|a, b| a.signed_distance(x).total_cmp(&b.signed_distance(x)))
                .expect("domain has components");
            let l = c.level_jet(x);
            let l2 = l * l;
            let gv = g(&Jet2::coordinates(x));
            [l2 * gv[0], l2 * gv[1], l2 * gv[2]]
        }))
    }

    /// `u = (r^2 - |x - c|^2)_+^3 e`, supported strictly inside a ball.
    pub fn compact(center: Point, radius: f64, e: [f64; 3], dim: usize) -> Self {
        Bump {
            jets: Arc::new(move |x: &Point| {
                let c = Jet2::coordinates(x);
                let mut s = Jet2::constant(radius * radius);
                for k in 0..dim {
                    s = s - (c[k] - Jet2::constant(center[k])).powi(2);
                }
                if s.v <= 0.0 {
                    return [Jet2::constant(0.0); 3];
                }
                let w = s.powi(3);
                [w.scale(e[0]), w.scale(e[1]), w.scale(e[2])]
            }),
            compact: true,
        }
    }
}

/// A manufactured source whose radiated field is known in closed form.
#[derive(Clone)]
pub struct NonRadiatingPair {
    /// `phi = L u + omega^2 u` on the mesh nodes.
    pub phi: SampledVectorField,
    pub phi_fn: VectorFn,
    pub u_exact: VectorFn,
}

impl std::fmt::Debug for NonRadiatingPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonRadiatingPair").field("phi", &self.phi).finish_non_exhaustive()
    }
}

/// Tolerance on `|u|` and `|grad u|` at boundary samples.
pub const BUMP_TOLERANCE: f64 = 1e-8;

/// Build `phi = L u + omega^2 u` from a bump vanishing with its gradient on the boundary.
///
/// The pair radiates nothing: `u` itself is the outgoing solution, and it is
/// zero outside the domain.
pub fn make_nonradiating(domain: &DomainGeometry, bump: &Bump, medium: &LameMedium, mesh: &QuadratureMesh) -> Result<NonRadiatingPair> {
    let n = medium.dim;
    for c in &domain.components {
        for p in c.boundary_samples(512) {
            let j = (bump.jets)(&p);
            let value = (0..n).map(|i| j[i].v.abs()).fold(0.0, f64::max);
            let gradient = (0..n)
                .flat_map(|i| (0..n).map(move |k| (i, k)))
                .map(|(i, k)| j[i].g[k].abs())
                .fold(0.0, f64::max);
            if value > BUMP_TOLERANCE || gradient > BUMP_TOLERANCE {
                return Err(Error::BumpNotVanishing { value, gradient });
            }
        }
    }
    let jets = bump.jets.clone();
    let m = *medium;
    let phi_fn: VectorFn = Arc::new(move |x: &Point| {
        let r = m.apply_to_jets(&jets(x));
        [r[0].into(), r[1].into(), r[2].into()]
    });
    let jets = bump.jets.clone();
    let dom = domain.clone();
    let u_exact: VectorFn = Arc::new(move |x: &Point| {
        if dom.component_of(x).is_none() {
            return CZERO_VEC;
        }
        let j = jets(x);
        [j[0].v.into(), j[1].v.into(), j[2].v.into()]
    });
    let phi = SampledVectorField::sample(n, mesh.nodes.clone(), |p| phi_fn(p), Some(mesh.id.clone()))?;
    Ok(NonRadiatingPair { phi, phi_fn, u_exact })
}
