//! Measurement helpers shared by the experiment runner and the test suites.

use crate::bounds::{small_rhs, ContractionSample};
use crate::cgo::{
    apex_probe, boundary_term_bound, cgo_residual_with, make_cgo, CgoProbe, c1beta_proxy, graph_bump, identity_meshes, integral_identity_check, shell_integral,
    tail_and_holder_bounds, IdentityBreakdown,
};
use crate::elastic::{field_norms, holder_seminorm, make_medium, random_unit, LameMedium, RegularGrid, SampledVectorField};
use crate::fd::FdOrder;
use crate::error::{Error, Result};
use crate::geometry::{make_cap_domain, volume_mesh, DomainComponent, DomainGeometry, QuadratureMesh};
use crate::jet::Jet2;
use crate::linalg::{cnorm, dot, norm, perp2, scale, sub, CVec, Point};
use crate::medium::{incident_field, solve_medium, IncidentWave, MediumScatterer, SolveMode};
use crate::source::{
    circle_directions, farfield_norm, farfield_of_source, make_nonradiating, Bump, FarFieldPattern, SourceProblem, VectorFn,
};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Boundary samples per component used for `sup |phi|` on the boundary.
pub const BOUNDARY_SAMPLES: usize = 2048;
/// Node pairs examined by the sampled Hölder estimator.
pub const HOLDER_PAIRS: usize = 400_000;

/// Ingredients of the small-support ratio of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityStats {
    pub sup_boundary: f64,
    pub holder: f64,
    pub linf: f64,
    /// `sup_boundary / (omega^{-delta} holder + linf)`.
    pub ratio: f64,
}

/// Measure `phi` on one component: boundary supremum from dense boundary
/// samples, Hölder seminorm and sup norm from the mesh nodes of that component.
pub fn intensity_stats(
    component: &DomainComponent,
    component_index: usize,
    phi: &VectorFn,
    mesh: &QuadratureMesh,
    delta: f64,
    omega: f64,
    seed: u64,
) -> Result<IntensityStats> {
    let sup_boundary = component
        .boundary_samples(BOUNDARY_SAMPLES)
        .iter()
        .map(|p| cnorm(&phi(p)))
        .fold(0.0, f64::max);
    let nodes: Vec<_> = mesh
        .nodes
        .iter()
        .zip(&mesh.component)
        .filter(|(_, c)| **c == component_index)
        .map(|(p, _)| *p)
        .collect();
    let field = SampledVectorField::sample(mesh.dim, nodes, |p| phi(p), Some(mesh.id.clone()))?;
    let holder = holder_seminorm(&field, delta, HOLDER_PAIRS, seed)?;
    let linf = field.max_abs().max(sup_boundary);
    Ok(IntensityStats {
        sup_boundary,
        holder,
        linf,
        ratio: sup_boundary / (omega.powf(-delta) * holder + linf),
    })
}

/// Shape of a single test component, scaled by its diameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    Disk,
    /// Semi-axes `d/2` and `d/(2 aspect)`, rotated by `angle`.
    Ellipse { aspect: f64, angle: f64 },
}

impl ShapeSpec {
    pub fn component(&self, center: Point, diameter: f64) -> Result<DomainComponent> {
        match *self {
            ShapeSpec::Disk => DomainComponent::disk(center, diameter / 2.0),
            ShapeSpec::Ellipse { aspect, angle } => {
                if !(aspect >= 1.0) {
                    return Err(Error::InvalidParameter(format!("ellipse aspect must be at least 1, got {aspect}")));
                }
                DomainComponent::ellipse(center, diameter / 2.0, diameter / (2.0 * aspect), angle)
            }
        }
    }
}

/// Mesh nodes per diameter used by the measurement helpers.
pub const NODES_PER_DIAMETER: f64 = 24.0;

/// One member of the manufactured non-radiating family
/// `u = l^2 (1 + tilt (x_1 - c_1)/d) e(polarization)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonRadiatingConfig {
    pub shape: ShapeSpec,
    pub epsilon: f64,
    pub omega: f64,
    pub tilt: f64,
    pub polarization: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonRadiatingMeasurement {
    pub config: NonRadiatingConfig,
    pub diameter: f64,
    pub stats: IntensityStats,
    pub rhs_structural: f64,
    /// `stats.ratio / rhs_structural`.
    pub ratio: f64,
    /// `||u^inf|| / ||phi||_{L2}` when requested.
    pub farfield_relative: Option<f64>,
}

/// Center used for single-component test domains.
pub const TEST_CENTER: Point = [0.3, -0.2, 0.0];

/// Build the family member, measure its intensity ratio and optionally its far field.
pub fn measure_nonradiating(
    cfg: &NonRadiatingConfig,
    lambda: f64,
    mu: f64,
    farfield_directions: Option<usize>,
    seed: u64,
) -> Result<NonRadiatingMeasurement> {
    let medium = make_medium(lambda, mu, cfg.omega, 2)?;
    let d = cfg.epsilon / cfg.omega;
    let comp = cfg.shape.component(TEST_CENTER, d)?;
    let domain = DomainGeometry::single(comp.clone());
    let (tilt, e) = (cfg.tilt, [cfg.polarization.cos(), cfg.polarization.sin()]);
    let bump = Bump::level_squared(&domain, move |x: &[Jet2; 3]| {
        let g = Jet2::constant(1.0) + (x[0] - Jet2::constant(TEST_CENTER[0])).scale(tilt / d);
        [g.scale(e[0]), g.scale(e[1]), Jet2::constant(0.0)]
    });
    let mesh = volume_mesh(&domain, d / NODES_PER_DIAMETER)?;
    let pair = make_nonradiating(&domain, &bump, &medium, &mesh)?;
    let stats = intensity_stats(&comp, 0, &pair.phi_fn, &mesh, cfg.delta, cfg.omega, seed)?;
    let rhs = small_rhs(cfg.epsilon, cfg.delta, 2);
    let farfield_relative = match farfield_directions {
        Some(n) => {
            let problem = SourceProblem::new(domain.clone(), pair.phi_fn.clone(), medium)?;
            let (dirs, _) = circle_directions(n);
            let pattern = farfield_of_source(&problem, &mesh, &dirs)?;
            let (phi_l2, _) = field_norms(&pair.phi, &mesh)?;
            Some(farfield_norm(&pattern) / phi_l2)
        }
        None => None,
    };
    Ok(NonRadiatingMeasurement {
        config: *cfg,
        diameter: d,
        stats,
        rhs_structural: rhs,
        ratio: stats.ratio / rhs,
        farfield_relative,
    })
}

/// Far field of a constant-intensity source with a refinement noise estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedFarField {
    pub norm: f64,
    /// `||u^inf_h - u^inf_{h/2}||`.
    pub noise: f64,
    #[serde(skip)]
    pub pattern: Option<FarFieldPattern>,
}

/// Far field of `phi` on `domain` at mesh spacing `h` and `h/2`; the finer
/// pattern is returned.
pub fn resolved_farfield(domain: &DomainGeometry, phi: VectorFn, medium: &LameMedium, h: f64, directions: usize) -> Result<ResolvedFarField> {
    let problem = SourceProblem::new(domain.clone(), phi, *medium)?;
    let (dirs, _) = circle_directions(directions);
    let coarse = farfield_of_source(&problem, &volume_mesh(domain, h)?, &dirs)?;
    let fine = farfield_of_source(&problem, &volume_mesh(domain, h / 2.0)?, &dirs)?;
    Ok(ResolvedFarField {
        norm: farfield_norm(&fine),
        noise: farfield_norm(&fine.difference(&coarse)?),
        pattern: Some(fine),
    })
}

/// Constant vector source `phi = intensity` on a disk of diameter `epsilon / omega`.
pub fn constant_disk_farfield(epsilon: f64, intensity: [f64; 2], lambda: f64, mu: f64, omega: f64, center: Point, directions: usize) -> Result<ResolvedFarField> {
    let medium = make_medium(lambda, mu, omega, 2)?;
    let d = epsilon / omega;
    let domain = DomainGeometry::single(DomainComponent::disk(center, d / 2.0)?);
    let v: CVec = [intensity[0].into(), intensity[1].into(), 0.0.into()];
    let phi: VectorFn = Arc::new(move |_: &Point| v);
    resolved_farfield(&domain, phi, &medium, d / NODES_PER_DIAMETER, directions)
}

/// Incident wave family for medium measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneWave {
    Pressure,
    Shear,
}

/// A constant-contrast scatterer under plane-wave incidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionConfig {
    pub shape: ShapeSpec,
    pub epsilon: f64,
    pub omega: f64,
    pub contrast: f64,
    pub wave: PlaneWave,
    /// Incidence angle.
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionMeasurement {
    pub config: ContractionConfig,
    pub sample: ContractionSample,
    pub contraction_estimate: f64,
    /// `max |u_direct - u_neumann| / max |u_direct|` when the series was run.
    pub neumann_agreement: Option<f64>,
    pub farfield_norm: f64,
}

/// Solve the medium problem and record the scattering ratios on the scatterer.
pub fn measure_contraction(cfg: &ContractionConfig, lambda: f64, mu: f64, neumann: bool) -> Result<ContractionMeasurement> {
    let medium = make_medium(lambda, mu, cfg.omega, 2)?;
    let d = cfg.epsilon / cfg.omega;
    let domain = DomainGeometry::single(cfg.shape.component(TEST_CENTER, d)?);
    let scatterer = MediumScatterer::constant(domain.clone(), cfg.contrast, medium)?;
    let dir = [cfg.angle.cos(), cfg.angle.sin(), 0.0];
    let incident = match cfg.wave {
        PlaneWave::Pressure => IncidentWave::pressure(dir, medium)?,
        PlaneWave::Shear => IncidentWave::shear(dir, medium)?,
    };
    let mesh = volume_mesh(&domain, d / (NODES_PER_DIAMETER * 2.0 / 3.0))?;
    let (dirs, _) = circle_directions(32);
    let direct = solve_medium(&scatterer, &incident, &mesh, SolveMode::DirectDense, &dirs)?;
    let ui = incident_field(&incident, &mesh.nodes)?;
    let (nu, _) = field_norms(&direct.u_scattered, &mesh)?;
    let (nt, _) = field_norms(&direct.u_total, &mesh)?;
    let (ni, _) = field_norms(&ui, &mesh)?;
    let neumann_agreement = if neumann {
        let series = solve_medium(&scatterer, &incident, &mesh, SolveMode::NeumannSeries, &dirs)?;
        let gap = direct
            .u_total
            .values
            .iter()
            .zip(&series.u_total.values)
            .map(|(a, b)| cnorm(&sub_c(a, b)))
            .fold(0.0, f64::max);
        Some(gap / direct.u_total.max_abs())
    } else {
        None
    };
    Ok(ContractionMeasurement {
        config: *cfg,
        sample: ContractionSample {
            product: scatterer.epsilon() * scatterer.v_sup,
            ratio_u: nu / ni,
            ratio_ut: nt / ni,
        },
        contraction_estimate: direct.contraction_estimate,
        neumann_agreement,
        farfield_norm: farfield_norm(&direct.farfield),
    })
}

fn sub_c(a: &CVec, b: &CVec) -> CVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Paraboloid cap `gamma = K |x'|^2 + cubic_factor K |x'|^3` with chart parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapSpec {
    /// `L = l_factor K`.
    pub l_factor: f64,
    pub m: f64,
    pub varsigma: f64,
    pub cubic_factor: f64,
}

impl Default for CapSpec {
    fn default() -> Self {
        CapSpec {
            l_factor: 10.0,
            m: 2.0,
            varsigma: 0.5,
            cubic_factor: 0.5,
        }
    }
}

impl CapSpec {
    pub fn domain(&self, k: f64, dim: usize) -> Result<DomainGeometry> {
        make_cap_domain(k, self.l_factor * k, self.m, self.varsigma, Some(self.cubic_factor * k), dim)
    }
}

/// The four identity terms at one `(K, tau)` with their structural bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItermMeasurement {
    pub dim: usize,
    pub k: f64,
    pub tau: f64,
    pub breakdown: IdentityBreakdown,
    /// `|phi(0)| |eta| shell(K_-, K_+, tau, b)`.
    pub bound2: f64,
    /// `|eta| [phi]_alpha holder_bound`.
    pub bound3: f64,
    /// `e^{-tau b} K^{-(beta+(n+1)/2)} (K + tau) ||u||_{C^{1,beta}} proxy`.
    pub bound4: f64,
}

impl ItermMeasurement {
    /// `|I_j| / bound_j` for `j = 2, 3, 4`.
    pub fn ratios(&self) -> [f64; 3] {
        [
            self.breakdown.i2.norm() / self.bound2,
            self.breakdown.i3.norm() / self.bound3,
            self.breakdown.i4.norm() / self.bound4,
        ]
    }
}

/// Evaluate the identity on a cap with the graph bump `psi^2 e_1` and compare
/// `I_2, I_3, I_4` with their structural bounds.
#[allow(clippy::too_many_arguments)]
pub fn measure_iterms(
    cap: &CapSpec,
    medium: &LameMedium,
    k: f64,
    tau: f64,
    alpha: f64,
    beta: f64,
    panels: usize,
    seed: u64,
) -> Result<ItermMeasurement> {
    let dim = medium.dim;
    let domain = cap.domain(k, dim)?;
    let chart = domain.chart().cloned().ok_or_else(|| Error::InvalidGeometry("cap without chart".into()))?;
    let bump = graph_bump(&domain, [1.0, 0.0, 0.0])?;
    let meshes = identity_meshes(&domain, panels)?;
    let probe = apex_probe(tau, 0.3, medium)?;
    let breakdown = integral_identity_check(&domain, &bump, &probe, medium, &meshes)?;
    let phi = |x: &Point| -> CVec {
        let r = medium.apply_to_jets(&(bump.jets)(x));
        [r[0].into(), r[1].into(), r[2].into()]
    };
    let field = SampledVectorField::sample(dim, meshes.volume.nodes.clone(), phi, Some(meshes.volume.id.clone()))?;
    let holder = holder_seminorm(&field, alpha, HOLDER_PAIRS, seed)?;
    let c1beta = c1beta_proxy(&bump, &meshes.volume.nodes, dim, beta, HOLDER_PAIRS, seed)?;
    let eta = cnorm(&probe.eta);
    let phi0 = cnorm(&phi(&[0.0; 3]));
    let shell = shell_integral(chart.k_minus, chart.k_plus, tau, chart.b, dim)?;
    let (_, holder_bound) = tail_and_holder_bounds(tau, chart.b, k, alpha, dim)?;
    Ok(ItermMeasurement {
        dim,
        k,
        tau,
        breakdown,
        bound2: phi0 * eta * shell,
        bound3: eta * holder * holder_bound,
        bound4: boundary_term_bound(k, tau, chart.b, beta, dim, c1beta),
    })
}

/// Probe with uniformly random orthonormal `(d, d_perp)` and the given `tau`.
pub fn random_probe<R: rand::Rng>(rng: &mut R, tau: f64, medium: &LameMedium) -> Result<CgoProbe> {
    let dim = medium.dim;
    let d = random_unit(rng, dim);
    let d_perp = if dim == 2 {
        perp2(&d)
    } else {
        loop {
            let v = random_unit(rng, 3);
            let w = sub(&v, &scale(&d, dot(&v, &d)));
            let n = norm(&w);
            if n > 0.1 {
                break scale(&w, 1.0 / n);
            }
        }
    };
    make_cgo(&d, &d_perp, tau, medium)
}

/// Relative residual of a probe on a small grid at `ppw` points per period.
pub fn residual_at_ppw(probe: &CgoProbe, medium: &LameMedium, ppw: f64, order: FdOrder) -> Result<f64> {
    let period = 2.0 * std::f64::consts::PI / (probe.kappa_s.powi(2) + probe.tau.powi(2)).sqrt();
    let count = 2 * order.half_width() + 3;
    let grid = RegularGrid::centered(probe.dim, [0.1, -0.05, 0.02], period / ppw, count);
    cgo_residual_with(probe, medium, &grid, order)
}
