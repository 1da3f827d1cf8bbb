//! Density-contrast scattering through the Lippmann–Schwinger equation
//! `u^t + omega^2 P[V u^t] = u^i`, with `P f = -int G f`.

use crate::elastic::{LameMedium, SampledVectorField};
use crate::error::{Error, Result};
use crate::geometry::{volume_mesh, DomainGeometry, PolarLayout, QuadratureMesh};
use crate::greens::tensor_from_offset;
use crate::linalg::{cnorm, matvec, norm, sub, CVec, Point, CZERO_VEC};
use crate::potential::{PolarInterpolant, PolarRule, VolumePotential};
use crate::source::{farfield_of_density, FarFieldPattern};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Shared callable scalar field.
pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

/// Density contrast `V` supported in `domain`; the density is `1 + V`.
#[derive(Clone)]
pub struct MediumScatterer {
    pub domain: DomainGeometry,
    pub v: ScalarFn,
    pub medium: LameMedium,
    /// Sampled `sup |V|`.
    pub v_sup: f64,
}

impl std::fmt::Debug for MediumScatterer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MediumScatterer")
            .field("domain", &self.domain)
            .field("medium", &self.medium)
            .field("v_sup", &self.v_sup)
            .finish_non_exhaustive()
    }
}

impl MediumScatterer {
    pub fn new(domain: DomainGeometry, v: ScalarFn, medium: LameMedium) -> Result<Self> {
        if domain.dim != medium.dim {
            return Err(Error::DimensionMismatch {
                expected: medium.dim,
                got: domain.dim,
            });
        }
        let feature = domain
            .components
            .iter()
            .map(|c| c.feature_size())
            .fold(f64::INFINITY, f64::min);
        let probe = volume_mesh(&domain, feature / 16.0)?;
        let mut v_sup = 0.0f64;
        for p in probe.nodes.iter().chain(domain.components.iter().flat_map(|c| c.boundary_samples(256)).collect::<Vec<_>>().iter()) {
            let x = v(p);
            if !x.is_finite() {
                return Err(Error::NonFiniteField);
            }
            v_sup = v_sup.max(x.abs());
        }
        Ok(MediumScatterer { domain, v, medium, v_sup })
    }

    /// Constant contrast on the whole domain.
    pub fn constant(domain: DomainGeometry, v: f64, medium: LameMedium) -> Result<Self> {
        Self::new(domain, Arc::new(move |_| v), medium)
    }

    /// `epsilon = d(Omega) omega`.
    pub fn epsilon(&self) -> f64 {
        self.domain.diameter() * self.medium.omega
    }
}

/// Kind of incident field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum IncidentKind {
    /// `d e^{i kp d.x}`.
    Pressure { direction: Point },
    /// `d_perp e^{i ks d.x}` with `d_perp` the rotation of `d` by +90 degrees (2D)
    /// or the given polarization (3D).
    Shear { direction: Point, polarization: Option<Point> },
    /// `G(x, origin) polarization`, with the origin outside the scatterer.
    PointSource { origin: Point, polarization: Point },
}

/// Entire (or exterior) solution of the homogeneous Lamé system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave {
    pub kind: IncidentKind,
    pub medium: LameMedium,
}

fn check_unit(d: &Point, dim: usize) -> Result<()> {
    if (norm(d) - 1.0).abs() > 1e-12 || (dim == 2 && d[2] != 0.0) {
        return Err(Error::InvalidDirection(format!("{d:?} is not a unit vector in R^{dim}")));
    }
    Ok(())
}

impl IncidentWave {
    pub fn new(kind: IncidentKind, medium: LameMedium) -> Result<Self> {
        let dim = medium.dim;
        match &kind {
            IncidentKind::Pressure { direction } => check_unit(direction, dim)?,
            IncidentKind::Shear { direction, polarization } => {
                check_unit(direction, dim)?;
                match (dim, polarization) {
                    (2, _) => {}
                    (_, Some(p)) => {
                        check_unit(p, dim)?;
                        if crate::linalg::dot(p, direction).abs() > 1e-12 {
                            return Err(Error::InvalidDirection("shear polarization must be orthogonal to the direction".into()));
                        }
                    }
                    (_, None) => return Err(Error::InvalidDirection("3D shear waves need a polarization".into())),
                }
            }
            IncidentKind::PointSource { polarization, .. } => {
                if !(norm(polarization) > 0.0) {
                    return Err(Error::InvalidDirection("zero polarization".into()));
                }
            }
        }
        Ok(IncidentWave { kind, medium })
    }

    pub fn pressure(direction: Point, medium: LameMedium) -> Result<Self> {
        Self::new(IncidentKind::Pressure { direction }, medium)
    }

    pub fn shear(direction: Point, medium: LameMedium) -> Result<Self> {
        Self::new(IncidentKind::Shear { direction, polarization: None }, medium)
    }

    /// Field value at `x`.
    pub fn value(&self, x: &Point) -> CVec {
        let m = &self.medium;
        let plane = |k: f64, d: &Point, pol: &Point| -> CVec {
            let e = Complex64::from_polar(1.0, k * crate::linalg::dot(d, x));
            [e * pol[0], e * pol[1], e * pol[2]]
        };
        match &self.kind {
            IncidentKind::Pressure { direction } => plane(m.kappa_p, direction, direction),
            IncidentKind::Shear { direction, polarization } => {
                let pol = polarization.unwrap_or([-direction[1], direction[0], 0.0]);
                plane(m.kappa_s, direction, &pol)
            }
            IncidentKind::PointSource { origin, polarization } => {
                let d = sub(x, origin);
                let r = norm(&d);
                if r == 0.0 {
                    return [Complex64::new(f64::NAN, 0.0); 3];
                }
                matvec(&tensor_from_offset(&d, r, m), &crate::linalg::to_complex(polarization))
            }
        }
    }
}

/// Sample an incident wave.
pub fn incident_field(incident: &IncidentWave, eval_points: &[Point]) -> Result<SampledVectorField> {
    SampledVectorField::sample(incident.medium.dim, eval_points.to_vec(), |p| incident.value(p), None)
}

/// Linear solver used for the Lippmann–Schwinger system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    NeumannSeries,
    #[default]
    DirectDense,
}

/// Result of a medium solve.
#[derive(Debug, Clone)]
pub struct MediumSolve {
    pub u_total: SampledVectorField,
    pub u_scattered: SampledVectorField,
    pub farfield: FarFieldPattern,
    /// Partial sums used by the Neumann series; 1 for a direct solve.
    pub series_terms_used: usize,
    /// Power-iteration estimate of the spectral radius of `-omega^2 P V`.
    pub contraction_estimate: f64,
    /// Norms of successive Neumann corrections (empty for a direct solve).
    pub corrections: Vec<f64>,
    scatterer: MediumScatterer,
    incident: IncidentWave,
    mesh: QuadratureMesh,
    density: Vec<CVec>,
}

/// Relative stopping tolerance of the Neumann series.
pub const NEUMANN_TOL: f64 = 1e-14;
const NEUMANN_MAX_TERMS: usize = 2000;
const POWER_ITERATIONS: usize = 40;

fn to_vec(f: &[CVec]) -> DVector<Complex64> {
    DVector::from_iterator(2 * f.len(), f.iter().flat_map(|v| [v[0], v[1]]))
}

fn from_vec(v: &DVector<Complex64>) -> Vec<CVec> {
    (0..v.len() / 2).map(|k| [v[2 * k], v[2 * k + 1], Complex64::new(0.0, 0.0)]).collect()
}

fn contraction(t: &DMatrix<Complex64>, seed: u64) -> f64 {
    use rand::Rng;
    let n = t.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DVector::from_fn(n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    x /= Complex64::from(x.norm());
    let mut est = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let y = t * &x;
        est = y.norm();
        if est == 0.0 {
            return 0.0;
        }
        x = y / Complex64::from(est);
    }
    est
}

/// Solve the Lippmann–Schwinger equation on the mesh nodes.
pub fn solve_medium(
    scatterer: &MediumScatterer,
    incident: &IncidentWave,
    mesh: &QuadratureMesh,
    mode: SolveMode,
    directions: &[Point],
) -> Result<MediumSolve> {
    let m = &scatterer.medium;
    if m.dim != 2 {
        return Err(Error::UnsupportedDimension(m.dim));
    }
    if let IncidentKind::PointSource { origin, .. } = incident.kind {
        if scatterer.domain.signed_distance(&origin) <= 0.0 {
            return Err(Error::InvalidParameter("point source must lie outside the scatterer".into()));
        }
    }
    let n = mesh.len();
    let w2 = m.omega * m.omega;
    let ui: Vec<CVec> = mesh.nodes.iter().map(|p| incident.value(p)).collect();
    let vk: Vec<f64> = mesh.nodes.iter().map(|p| (scatterer.v)(p)).collect();
    let weights = vec![2.0 * std::f64::consts::PI / directions.len().max(1) as f64; directions.len()];

    let (ut, terms, rho_est, corrections) = if vk.iter().all(|v| *v == 0.0) {
        (ui.clone(), 1, 0.0, vec![0.0])
    } else {
        let pot = VolumePotential::new(&scatterer.domain, mesh, m)?;
        let p = pot.assemble();
        // T = -omega^2 P diag(V)
        let mut t = p;
        for c in 0..2 * n {
            let s = -w2 * vk[c / 2];
            t.column_mut(c).scale_mut(s);
        }
        let rho_est = contraction(&t, 0x5eed);
        let b = to_vec(&ui);
        match mode {
            SolveMode::DirectDense => {
                let mut a = -t;
                for i in 0..2 * n {
                    a[(i, i)] += Complex64::new(1.0, 0.0);
                }
                let x = a.lu().solve(&b).ok_or(Error::SingularSystem)?;
                if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::SingularSystem);
                }
                (from_vec(&x), 1, rho_est, Vec::new())
            }
            SolveMode::NeumannSeries => {
                if rho_est >= 1.0 {
                    return Err(Error::SeriesDiverges(rho_est));
                }
                let mut sum = b.clone();
                let mut term = b;
                let mut terms = 1;
                let mut corrections = Vec::new();
                while terms < NEUMANN_MAX_TERMS {
                    term = &t * &term;
                    let c = term.norm();
                    corrections.push(c);
                    sum += &term;
                    terms += 1;
                    if c <= NEUMANN_TOL * sum.norm() {
                        break;
                    }
                }
                (from_vec(&sum), terms, rho_est, corrections)
            }
        }
    };
    let us: Vec<CVec> = ut
        .iter()
        .zip(&ui)
        .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
        .collect();
    // u = -int G f with f = -omega^2 V u^t
    let density: Vec<CVec> = ut
        .iter()
        .zip(&vk)
        .map(|(u, v)| [u[0] * (-w2 * v), u[1] * (-w2 * v), CZERO_VEC[2]])
        .collect();
    let farfield = farfield_of_density(mesh, m, &density, directions, &weights)?;
    Ok(MediumSolve {
        u_total: SampledVectorField::new(2, mesh.nodes.clone(), ut, Some(mesh.id.clone()))?,
        u_scattered: SampledVectorField::new(2, mesh.nodes.clone(), us, Some(mesh.id.clone()))?,
        farfield,
        series_terms_used: terms,
        contraction_estimate: rho_est,
        corrections,
        scatterer: scatterer.clone(),
        incident: *incident,
        mesh: mesh.clone(),
        density,
    })
}

impl MediumSolve {
    /// Total field at an arbitrary point.
    ///
    /// Inside a disk or ellipse the nodal total field is interpolated
    /// spectrally and the own-component integral is done by local polar
    /// quadrature. Elsewhere the singularity-subtracted Nyström equation at
    /// `x` is solved as a 2x2 system for `u^t(x)`.
    pub fn total_at(&self, x: &Point) -> Result<CVec> {
        let inside = self.scatterer.domain.component_of(x);
        if let Some(c) = inside {
            if let Some(Some(layout)) = self.mesh.layouts.get(c) {
                return self.total_at_interpolated(x, c, layout);
            }
        }
        self.total_at_nystrom(x)
    }

    fn total_at_interpolated(&self, x: &Point, c: usize, layout: &PolarLayout) -> Result<CVec> {
        let m = &self.scatterer.medium;
        let w2 = m.omega * m.omega;
        let comp = &self.scatterer.domain.components[c];
        let interp = PolarInterpolant::new(comp, layout, &self.u_total.values)?;
        let v = &self.scatterer.v;
        let own = PolarRule::default().integrate(comp, x, m, &|y: &Point| {
            let u = interp.eval(y);
            let s = -w2 * v(y);
            [u[0] * s, u[1] * s, CZERO_VEC[2]]
        });
        let mut out = self.incident.value(x);
        for i in 0..2 {
            out[i] -= own[i];
        }
        for j in 0..self.mesh.len() {
            if self.mesh.component[j] == c {
                continue;
            }
            let d = sub(x, &self.mesh.nodes[j]);
            let g = tensor_from_offset(&d, norm(&d), m);
            let val = matvec(&g, &self.density[j]);
            for i in 0..2 {
                out[i] -= val[i] * self.mesh.weights[j];
            }
        }
        Ok(out)
    }

    fn total_at_nystrom(&self, x: &Point) -> Result<CVec> {
        let m = &self.scatterer.medium;
        let w2 = m.omega * m.omega;
        let inside = self.scatterer.domain.component_of(x);
        let mut smooth = CZERO_VEC;
        let mut local = [[Complex64::new(0.0, 0.0); 2]; 2];
        for j in 0..self.mesh.len() {
            let d = sub(x, &self.mesh.nodes[j]);
            let r = norm(&d);
            if r == 0.0 {
                continue;
            }
            let g = tensor_from_offset(&d, r, m);
            let v = matvec(&g, &self.density[j]);
            for i in 0..2 {
                smooth[i] += v[i] * self.mesh.weights[j];
            }
            if Some(self.mesh.component[j]) == inside {
                for a in 0..2 {
                    for b in 0..2 {
                        local[a][b] -= g[a][b] * self.mesh.weights[j];
                    }
                }
            }
        }
        // u = -int G f, and the density already carries -omega^2 V u^t.
        let ui = self.incident.value(x);
        let rhs = [ui[0] - smooth[0], ui[1] - smooth[1]];
        let Some(c) = inside else {
            return Ok([rhs[0], rhs[1], CZERO_VEC[2]]);
        };
        let s = PolarRule::default().tensor_integral(&self.scatterer.domain.components[c], x, m);
        let vx = (self.scatterer.v)(x);
        let mut a = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                a[i][k] = (s[i][k] + local[i][k]) * (-w2 * vx);
                if i == k {
                    a[i][k] += 1.0;
                }
            }
        }
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.norm() < 1e-14 {
            return Err(Error::SingularSystem);
        }
        let u0 = (a[1][1] * rhs[0] - a[0][1] * rhs[1]) / det;
        let u1 = (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det;
        Ok([u0, u1, CZERO_VEC[2]])
    }

    /// Contrast density `f = -omega^2 V u^t` at the nodes.
    pub fn density(&self) -> &[CVec] {
        &self.density
    }

    pub fn mesh(&self) -> &QuadratureMesh {
        &self.mesh
    }

    /// Largest nodewise mismatch of `u^t - u^i - u`.
    pub fn decomposition_defect(&self) -> f64 {
        (0..self.mesh.len())
            .map(|k| {
                let ui = self.incident.value(&self.mesh.nodes[k]);
                let d = [
                    self.u_total.values[k][0] - ui[0] - self.u_scattered.values[k][0],
                    self.u_total.values[k][1] - ui[1] - self.u_scattered.values[k][1],
                    Complex64::new(0.0, 0.0),
                ];
                cnorm(&d)
            })
            .fold(0.0, f64::max)
    }
}

/// `Upsilon(eps, V) = eps V / (s - eps V)`, nondecreasing in both arguments.
pub fn upsilon(epsilon: f64, v_norm: f64, s: f64) -> Result<f64> {
    let p = epsilon * v_norm;
    if p >= s {
        return Err(Error::OutOfRegime { product: p, s });
    }
    Ok(p / (s - p))
}

/// Predicted bounds for a scatterer at a given constant `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub epsilon: f64,
    pub v_norm: f64,
    pub s: f64,
    pub upsilon: f64,
    /// Bound on `|u| / |u^i|`.
    pub bound_u: f64,
    /// Bound on `|u^t| / |u^i|`.
    pub bound_ut: f64,
    /// False when `eps V >= s`; the bounds are then raw formula values.
    pub in_regime: bool,
}

/// Predicted ratios from `eps = d(Omega) omega` and `sup |V|`.
pub fn contraction_report(scatterer: &MediumScatterer, s: f64) -> ContractionReport {
    contraction_report_raw(scatterer.epsilon(), scatterer.v_sup, s)
}

/// [`contraction_report`] from the raw parameters.
pub fn contraction_report_raw(epsilon: f64, v_norm: f64, s: f64) -> ContractionReport {
    let p = epsilon * v_norm;
    let ups = p / (s - p);
    ContractionReport {
        epsilon,
        v_norm,
        s,
        upsilon: ups,
        bound_u: ups,
        bound_ut: s / (s - p),
        in_regime: p < s,
    }
}
