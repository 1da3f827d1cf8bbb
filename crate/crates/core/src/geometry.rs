//! Domains, K-curvature caps, quadrature meshes and distances.
//!
//! Supported components are disks and balls, rotated ellipses, and
//! paraboloid caps `{gamma(x') < x_n < b}` whose apex sits at the component
//! center with interior normal `e_n`.

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::linalg::{dist, norm, sub, Point};
use crate::quadrature::{composite, GaussLegendre};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};
use std::io::Write;

/// Number of samples of `|x'|` used to validate a chart.
pub const CHART_GRID: usize = 201;

/// Gauss–Legendre order used inside each cap panel.
pub const CAP_PANEL_ORDER: usize = 4;

/// Local chart around an admissible K-curvature point.
///
/// The boundary near the point is the graph `x_n = gamma(x')` with
/// `gamma(x') = K |x'|^2 + c |x'|^3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KCurvatureChart {
    pub dim: usize,
    pub k: f64,
    pub k_minus: f64,
    pub k_plus: f64,
    pub l: f64,
    pub m: f64,
    pub varsigma: f64,
    pub rho: f64,
    pub b: f64,
    /// Coefficient `c` of the cubic perturbation.
    pub cubic: f64,
    /// Radius where the graph meets the lid, `gamma(r_lid) = b`.
    pub r_lid: f64,
    /// Largest sampled `|gamma(x') - K|x'|^2| / |x'|^3` on the chart.
    pub cubic_remainder: f64,
}

impl KCurvatureChart {
    /// Graph height at radial distance `r = |x'|`.
    pub fn gamma(&self, r: f64) -> f64 {
        let r = r.abs();
        self.k * r * r + self.cubic * r * r * r
    }

    /// Radial derivative of the graph height for signed `s` (odd in `s`).
    pub fn gamma_prime(&self, s: f64) -> f64 {
        2.0 * self.k * s + 3.0 * self.cubic * s * s.abs()
    }

    /// Jet of `gamma(x')` in the local frame (`x'` = leading `n-1` coordinates).
    pub fn gamma_jet(&self, x: &Point) -> Jet2 {
        let n1 = self.dim - 1;
        let r2: f64 = x[..n1].iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let mut j = Jet2::constant(self.k * r2 + self.cubic * r2 * r);
        for i in 0..n1 {
            j.g[i] = 2.0 * self.k * x[i] + 3.0 * self.cubic * r * x[i];
            for m in 0..n1 {
                let delta = if i == m { 1.0 } else { 0.0 };
                let cubic_part = if r > 0.0 {
                    3.0 * self.cubic * (r * delta + x[i] * x[m] / r)
                } else {
                    0.0
                };
                j.h[i][m] = 2.0 * self.k * delta + cubic_part;
            }
        }
        j
    }
}

/// Build and validate a chart for `gamma = K|x'|^2 + c|x'|^3`.
pub fn make_chart(k: f64, l: f64, m: f64, varsigma: f64, cubic: f64, dim: usize) -> Result<KCurvatureChart> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(k >= E) {
        return Err(Error::KTooSmall(k));
    }
    if !(m >= 1.0) || !(l > 0.0) || !(varsigma > 0.0) {
        return Err(Error::ChartInvalid(format!(
            "need M >= 1, L > 0, varsigma > 0 (got M={m}, L={l}, varsigma={varsigma})"
        )));
    }
    let rho = m.sqrt() / k;
    let b = 1.0 / k;
    let mut k_minus = f64::INFINITY;
    let mut k_plus = f64::NEG_INFINITY;
    let mut remainder = 0.0f64;
    for i in 1..CHART_GRID {
        let r = rho * i as f64 / (CHART_GRID - 1) as f64;
        let g = k * r * r + cubic * r * r * r;
        if g < 0.0 {
            return Err(Error::ChartInvalid(format!("gamma negative at |x'| = {r}")));
        }
        let ratio = g / (r * r);
        k_minus = k_minus.min(ratio);
        k_plus = k_plus.max(ratio);
        remainder = remainder.max((g - k * r * r).abs() / (r * r * r));
    }
    if !(k_minus > 0.0) {
        return Err(Error::ChartInvalid("K_- must be positive".into()));
    }
    for (name, val) in [("K_-", k_minus), ("K_+", k_plus)] {
        let ratio = val / k;
        if ratio < 1.0 / m - 1e-12 || ratio > m + 1e-12 {
            return Err(Error::ChartInvalid(format!(
                "{name}/K = {ratio} outside [1/M, M] with M = {m}"
            )));
        }
    }
    let pinch = l * k.powf(1.0 - varsigma);
    if k_plus - k_minus > pinch + 1e-12 {
        return Err(Error::ChartInvalid(format!(
            "K_+ - K_- = {} exceeds L K^(1-varsigma) = {pinch}",
            k_plus - k_minus
        )));
    }
    // Radius where the graph reaches the lid; gamma is increasing in r.
    let mut lo = 0.0;
    let mut hi = rho;
    let gamma = |r: f64| k * r * r + cubic * r * r * r;
    if gamma(hi) < b {
        return Err(Error::ChartInvalid("graph does not reach the lid inside the chart".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gamma(mid) < b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(KCurvatureChart {
        dim,
        k,
        k_minus,
        k_plus,
        l,
        m,
        varsigma,
        rho,
        b,
        cubic,
        r_lid: 0.5 * (lo + hi),
        cubic_remainder: remainder,
    })
}

/// Shape of a single domain component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Disk (2D) or ball (3D).
    Ball { radius: f64 },
    /// 2D ellipse with semi-axes `a`, `b`, rotated by `angle`.
    Ellipse { a: f64, b: f64, angle: f64 },
    /// Paraboloid cap with apex at the center.
    Cap(KCurvatureChart),
}

/// One connected component of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainComponent {
    pub dim: usize,
    pub center: Point,
    pub kind: ComponentKind,
}

impl DomainComponent {
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")));
        }
        Ok(DomainComponent {
            dim: 2,
            center,
            kind: ComponentKind::Ball { radius },
        })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidGeometry(format!("radius must be positive, got {radius}")));
        }
        Ok(DomainComponent {
            dim: 3,
            center,
            kind: ComponentKind::Ball { radius },
        })
    }

    pub fn ellipse(center: Point, a: f64, b: f64, angle: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidGeometry(format!("semi-axes must be positive, got {a}, {b}")));
        }
        Ok(DomainComponent {
            dim: 2,
            center,
            kind: ComponentKind::Ellipse { a, b, angle },
        })
    }

    pub fn cap(center: Point, chart: KCurvatureChart) -> Self {
        DomainComponent {
            dim: chart.dim,
            center,
            kind: ComponentKind::Cap(chart),
        }
    }

    /// Copy of this component moved by `t`.
    pub fn translated(&self, t: &Point) -> Self {
        let mut c = self.clone();
        for i in 0..3 {
            c.center[i] += t[i];
        }
        c
    }

    /// Copy scaled about its center by `s` (balls and ellipses).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let kind = match &self.kind {
            ComponentKind::Ball { radius } => ComponentKind::Ball { radius: radius * s },
            ComponentKind::Ellipse { a, b, angle } => ComponentKind::Ellipse {
                a: a * s,
                b: b * s,
                angle: *angle,
            },
            ComponentKind::Cap(_) => {
                return Err(Error::InvalidGeometry("caps are scaled through K".into()));
            }
        };
        Ok(DomainComponent {
            dim: self.dim,
            center: self.center,
            kind,
        })
    }

    /// Smallest length scale of the shape.
    pub fn feature_size(&self) -> f64 {
        match &self.kind {
            ComponentKind::Ball { radius } => *radius,
            ComponentKind::Ellipse { a, b, .. } => a.min(*b),
            ComponentKind::Cap(c) => c.r_lid.min(c.b),
        }
    }

    /// Lebesgue measure, exact for the catalog.
    pub fn measure(&self) -> f64 {
        match &self.kind {
            ComponentKind::Ball { radius } => {
                if self.dim == 2 {
                    PI * radius * radius
                } else {
                    4.0 / 3.0 * PI * radius.powi(3)
                }
            }
            ComponentKind::Ellipse { a, b, .. } => PI * a * b,
            ComponentKind::Cap(c) => {
                let rl = c.r_lid;
                let (k, cu, b) = (c.k, c.cubic, c.b);
                if self.dim == 2 {
                    2.0 * (b * rl - k * rl.powi(3) / 3.0 - cu * rl.powi(4) / 4.0)
                } else {
                    2.0 * PI * (b * rl * rl / 2.0 - k * rl.powi(4) / 4.0 - cu * rl.powi(5) / 5.0)
                }
            }
        }
    }

    fn local(&self, x: &Point) -> Point {
        sub(x, &self.center)
    }

    /// True when `x` lies in the open component.
    pub fn contains(&self, x: &Point) -> bool {
        self.signed_distance(x) < 0.0
    }

    /// Signed distance to the component boundary (negative inside).
    pub fn signed_distance(&self, x: &Point) -> f64 {
        let p = self.local(x);
        match &self.kind {
            ComponentKind::Ball { radius } => norm(&p) - radius,
            ComponentKind::Ellipse { a, b, angle } => {
                let (s, c) = angle.sin_cos();
                let u = c * p[0] + s * p[1];
                let v = -s * p[0] + c * p[1];
                let d = ellipse_distance(*a, *b, u, v);
                if (u / a).powi(2) + (v / b).powi(2) < 1.0 {
                    -d
                } else {
                    d
                }
            }
            ComponentKind::Cap(chart) => cap_signed_distance(chart, &p),
        }
    }

    /// A function vanishing on the boundary, positive inside, with nonzero gradient there.
    pub fn level_jet(&self, x: &Point) -> Jet2 {
        let p = self.local(x);
        let c = Jet2::coordinates(&p);
        match &self.kind {
            ComponentKind::Ball { radius } => {
                let mut r2 = Jet2::constant(0.0);
                for ci in c.iter().take(self.dim) {
                    r2 = r2 + ci.powi(2);
                }
                (Jet2::constant(radius * radius) - r2).scale(0.5 / radius)
            }
            ComponentKind::Ellipse { a, b, angle } => {
                let (s, co) = angle.sin_cos();
                let u = c[0] * co + c[1] * s;
                let v = c[0] * -s + c[1] * co;
                let q = u.powi(2).scale(1.0 / (a * a)) + v.powi(2).scale(1.0 / (b * b));
                (Jet2::constant(1.0) - q).scale(0.5 * a.min(*b))
            }
            ComponentKind::Cap(chart) => {
                let n = self.dim - 1;
                let psi = c[n] - chart.gamma_jet(&p);
                let lid = Jet2::constant(chart.b) - c[n];
                psi * lid
            }
        }
    }

    /// Diameter of the component.
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            ComponentKind::Ball { radius } => 2.0 * radius,
            ComponentKind::Ellipse { a, b, .. } => 2.0 * a.max(*b),
            ComponentKind::Cap(chart) => cap_diameter(chart),
        }
    }

    /// Dense boundary samples, used for distances between components.
    pub fn boundary_samples(&self, count: usize) -> Vec<Point> {
        let mut out = Vec::new();
        match (&self.kind, self.dim) {
            (ComponentKind::Ball { radius }, 2) => {
                for i in 0..count {
                    let t = 2.0 * PI * i as f64 / count as f64;
                    out.push([self.center[0] + radius * t.cos(), self.center[1] + radius * t.sin(), 0.0]);
                }
            }
            (ComponentKind::Ball { radius }, _) => {
                let m = ((count as f64).sqrt().ceil() as usize).max(4);
                for i in 0..m {
                    let z = -1.0 + 2.0 * (i as f64 + 0.5) / m as f64;
                    let s = (1.0 - z * z).sqrt();
                    for j in 0..(2 * m) {
                        let ph = PI * j as f64 / m as f64;
                        out.push([
                            self.center[0] + radius * s * ph.cos(),
                            self.center[1] + radius * s * ph.sin(),
                            self.center[2] + radius * z,
                        ]);
                    }
                }
            }
            (ComponentKind::Ellipse { a, b, angle }, _) => {
                let (s, c) = angle.sin_cos();
                for i in 0..count {
                    let t = 2.0 * PI * i as f64 / count as f64;
                    let (u, v) = (a * t.cos(), b * t.sin());
                    out.push([self.center[0] + c * u - s * v, self.center[1] + s * u + c * v, 0.0]);
                }
            }
            (ComponentKind::Cap(chart), 2) => {
                let half = count / 2;
                for i in 0..=half {
                    let s = -chart.r_lid + 2.0 * chart.r_lid * i as f64 / half as f64;
                    out.push([self.center[0] + s, self.center[1] + chart.gamma(s), 0.0]);
                    out.push([self.center[0] + s, self.center[1] + chart.b, 0.0]);
                }
            }
            (ComponentKind::Cap(chart), _) => {
                let m = ((count as f64 / 2.0).sqrt().ceil() as usize).max(4);
                for i in 0..=m {
                    let r = chart.r_lid * i as f64 / m as f64;
                    for j in 0..(2 * m) {
                        let ph = PI * j as f64 / m as f64;
                        let (x, y) = (r * ph.cos(), r * ph.sin());
                        out.push([self.center[0] + x, self.center[1] + y, self.center[2] + chart.gamma(r)]);
                        out.push([self.center[0] + x, self.center[1] + y, self.center[2] + chart.b]);
                    }
                }
            }
        }
        out
    }
}

/// Distance from `(u, v)` to the ellipse `u^2/a^2 + v^2/b^2 = 1`.
fn ellipse_distance(a: f64, b: f64, u: f64, v: f64) -> f64 {
    // Work in the first quadrant with a >= b.
    let (mut a, mut b, mut y0, mut y1) = (a, b, u.abs(), v.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut y0, &mut y1);
    }
    if y1 > 0.0 {
        if y0 > 0.0 {
            // Root of F(t) = (a y0/(t+a^2))^2 + (b y1/(t+b^2))^2 - 1 on t > -b^2.
            let f = |t: f64| (a * y0 / (t + a * a)).powi(2) + (b * y1 / (t + b * b)).powi(2) - 1.0;
            let mut lo = -b * b + b * y1;
            let mut hi = -b * b + (a * a * y0 * y0 + b * b * y1 * y1).sqrt();
            if f(lo) < 0.0 {
                lo = -b * b * (1.0 - 1e-15);
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = 0.5 * (lo + hi);
            let x0 = a * a * y0 / (t + a * a);
            let x1 = b * b * y1 / (t + b * b);
            ((x0 - y0).powi(2) + (x1 - y1).powi(2)).sqrt()
        } else {
            (y1 - b).abs()
        }
    } else {
        let numer = a * y0;
        let denom = a * a - b * b;
        if numer < denom {
            let xde = numer / denom;
            let x0 = a * xde;
            let x1 = b * (1.0 - xde * xde).max(0.0).sqrt();
            ((x0 - y0).powi(2) + x1 * x1).sqrt()
        } else {
            (y0 - a).abs()
        }
    }
}

/// Distance from `(s, z)` to the graph profile `(t, gamma(t))`, `|t| <= r_lid`.
fn profile_graph_distance(chart: &KCurvatureChart, s: f64, z: f64) -> f64 {
    let d2 = |t: f64| (s - t).powi(2) + (z - chart.gamma(t)).powi(2);
    let samples = 400;
    let rl = chart.r_lid;
    let step = 2.0 * rl / samples as f64;
    let mut best_t = -rl;
    let mut best = d2(-rl);
    for i in 1..=samples {
        let t = -rl + step * i as f64;
        let v = d2(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement on the bracket around the best sample.
    let mut lo = (best_t - step).max(-rl);
    let mut hi = (best_t + step).min(rl);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (d2(c), d2(d));
    for _ in 0..100 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = d2(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = d2(d);
        }
    }
    best.min(fc).min(fd).min(d2(lo)).min(d2(hi)).sqrt()
}

fn cap_signed_distance(chart: &KCurvatureChart, p: &Point) -> f64 {
    let n = chart.dim - 1;
    let s = p[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
    let z = p[n];
    let rl = chart.r_lid;
    let lid = if s <= rl {
        (z - chart.b).abs()
    } else {
        ((s - rl).powi(2) + (z - chart.b).powi(2)).sqrt()
    };
    let graph = profile_graph_distance(chart, s, z);
    let d = lid.min(graph);
    let inside = z < chart.b && z > chart.gamma(s) && s < chart.rho;
    if inside {
        -d
    } else {
        d
    }
}

fn cap_diameter(chart: &KCurvatureChart) -> f64 {
    // The cap is convex and rotationally symmetric, so its diameter is
    // realised in a meridian plane by two points of the profile.
    let rl = chart.r_lid;
    let m = 1000;
    let mut profile = Vec::with_capacity(2 * m + 2);
    for i in 0..=m {
        let t = -rl + 2.0 * rl * i as f64 / m as f64;
        profile.push((t, chart.gamma(t)));
    }
    let mut best = 2.0 * rl;
    for &(t, g) in &profile {
        for &(u, h) in &profile {
            best = best.max(((t - u).powi(2) + (g - h).powi(2)).sqrt());
        }
        best = best.max(((t + rl).powi(2) + (g - chart.b).powi(2)).sqrt());
        best = best.max(((t - rl).powi(2) + (g - chart.b).powi(2)).sqrt());
    }
    if chart.cubic == 0.0 {
        // Exact paraboloid: the extremes are rim-to-rim or apex-to-rim.
        best = best.max((2.0 * rl).max((rl * rl + chart.b * chart.b).sqrt()));
    }
    best
}

/// Union of disjoint components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainGeometry {
    pub dim: usize,
    pub components: Vec<DomainComponent>,
}

impl DomainGeometry {
    pub fn new(components: Vec<DomainComponent>) -> Result<Self> {
        let dim = components
            .first()
            .ok_or_else(|| Error::InvalidGeometry("no components".into()))?
            .dim;
        if let Some(c) = components.iter().find(|c| c.dim != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.dim,
            });
        }
        Ok(DomainGeometry { dim, components })
    }

    pub fn single(component: DomainComponent) -> Self {
        DomainGeometry {
            dim: component.dim,
            components: vec![component],
        }
    }

    /// The chart of the first cap component, if any.
    pub fn chart(&self) -> Option<&KCurvatureChart> {
        self.components.iter().find_map(|c| match &c.kind {
            ComponentKind::Cap(chart) => Some(chart),
            _ => None,
        })
    }

    pub fn measure(&self) -> f64 {
        self.components.iter().map(|c| c.measure()).sum()
    }

    /// Signed distance to the union (negative inside).
    pub fn signed_distance(&self, x: &Point) -> f64 {
        self.components
            .iter()
            .map(|c| c.signed_distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the component containing `x`, if any.
    pub fn component_of(&self, x: &Point) -> Option<usize> {
        self.components.iter().position(|c| c.contains(x))
    }

    /// Diameter of the union.
    pub fn diameter(&self) -> f64 {
        let mut best = self.components.iter().map(|c| c.diameter()).fold(0.0, f64::max);
        for (i, a) in self.components.iter().enumerate() {
            for b in self.components.iter().skip(i + 1) {
                best = best.max(farthest_distance(a, b));
            }
        }
        best
    }
}

fn farthest_distance(a: &DomainComponent, b: &DomainComponent) -> f64 {
    if let (ComponentKind::Ball { radius: ra }, ComponentKind::Ball { radius: rb }) = (&a.kind, &b.kind) {
        return dist(&a.center, &b.center) + ra + rb;
    }
    let sa = a.boundary_samples(1000);
    let sb = b.boundary_samples(1000);
    let mut best = 0.0f64;
    for p in &sa {
        for q in &sb {
            best = best.max(dist(p, q));
        }
    }
    best
}

/// Make a domain holding one validated paraboloid cap with apex at the origin.
pub fn make_cap_domain(k: f64, l: f64, m: f64, varsigma: f64, cubic: Option<f64>, dim: usize) -> Result<DomainGeometry> {
    let chart = make_chart(k, l, m, varsigma, cubic.unwrap_or(0.0), dim)?;
    Ok(DomainGeometry::single(DomainComponent::cap([0.0; 3], chart)))
}

/// Diameter of a whole domain.
pub fn diameter(domain: &DomainGeometry) -> f64 {
    domain.diameter()
}

/// Warnings attached to geometric queries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeometryWarning {
    DisjointnessViolated { first: usize, second: usize },
}

/// Minimum distance between components, with warnings for touching pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub distance: f64,
    pub warnings: Vec<GeometryWarning>,
}

fn pair_distance(a: &DomainComponent, b: &DomainComponent) -> f64 {
    if let (ComponentKind::Ball { radius: ra }, ComponentKind::Ball { radius: rb }) = (&a.kind, &b.kind) {
        return (dist(&a.center, &b.center) - ra - rb).max(0.0);
    }
    let from_a = a
        .boundary_samples(20_000)
        .iter()
        .map(|p| b.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    let from_b = b
        .boundary_samples(20_000)
        .iter()
        .map(|p| a.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    from_a.min(from_b).max(0.0)
}

/// Minimum over component pairs of the set distance.
pub fn component_separation(domain: &DomainGeometry) -> Result<Separation> {
    let n = domain.components.len();
    if n < 2 {
        return Err(Error::SingleComponent);
    }
    let mut distance = f64::INFINITY;
    let mut warnings = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pair_distance(&domain.components[i], &domain.components[j]);
            if d <= 1e-12 {
                warnings.push(GeometryWarning::DisjointnessViolated { first: i, second: j });
            }
            distance = distance.min(d);
        }
    }
    Ok(Separation { distance, warnings })
}

/// Signed distance to a domain.
pub fn signed_distance(domain: &DomainGeometry, x: &Point) -> f64 {
    domain.signed_distance(x)
}

/// Volume quadrature nodes with positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMesh {
    pub id: String,
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    /// Component index of each node.
    pub component: Vec<usize>,
    pub h: f64,
    /// Tensor-grid layout of each 2D disk or ellipse component, when known.
    pub layouts: Vec<Option<PolarLayout>>,
}

/// Node layout of a 2D disk or ellipse: radial Gauss nodes times uniform angles.
///
/// Node `start + i * angular + j` sits at unit radius `radii[i]` and angle
/// `2 pi (j + 1/2) / angular` in the component's reference frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarLayout {
    pub start: usize,
    pub radii: Vec<f64>,
    pub angular: usize,
}

impl QuadratureMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Write `x,y,z,weight,component` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z", "weight", "component"])
            .map_err(|e| Error::Export(e.to_string()))?;
        for ((p, wt), c) in self.nodes.iter().zip(&self.weights).zip(&self.component) {
            w.write_record([
                format!("{:.16e}", p[0]),
                format!("{:.16e}", p[1]),
                format!("{:.16e}", p[2]),
                format!("{:.16e}", wt),
                c.to_string(),
            ])
            .map_err(|e| Error::Export(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Export(e.to_string()))
    }
}

/// Which part of the boundary a node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryTag {
    /// Smooth closed boundary of a disk, ball or ellipse.
    Smooth,
    /// Graph part `x_n = gamma(x')` of a cap.
    Graph,
    /// Flat lid `x_n = b` of a cap.
    Lid,
}

/// Boundary quadrature nodes with outward unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMesh {
    pub id: String,
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub normals: Vec<Point>,
    pub weights: Vec<f64>,
    pub tags: Vec<BoundaryTag>,
    pub component: Vec<usize>,
    pub h: f64,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Indices of nodes carrying `tag`.
    pub fn tagged(&self, tag: BoundaryTag) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.tags[i] == tag)
    }
}

/// Explicit polar/panel resolution of a volume mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshResolution {
    /// Radial Gauss nodes (balls/ellipses) or panels along `x'` (caps).
    pub radial: usize,
    /// Angular nodes (balls/ellipses/3D caps) or panels along `x_n` (2D caps).
    pub angular: usize,
}

fn mesh_id(kind: &str, h: f64, count: usize) -> String {
    format!("{kind}-h{h:.6e}-n{count}")
}

fn check_h(domain: &DomainGeometry, h: f64) -> Result<()> {
    let feature = domain
        .components
        .iter()
        .map(|c| c.feature_size())
        .fold(f64::INFINITY, f64::min);
    if !(h > 0.0) || h >= feature {
        return Err(Error::MeshTooCoarse { h, feature });
    }
    Ok(())
}

/// Volume mesh with characteristic spacing `h`.
pub fn volume_mesh(domain: &DomainGeometry, h: f64) -> Result<QuadratureMesh> {
    check_h(domain, h)?;
    let res: Vec<MeshResolution> = domain
        .components
        .iter()
        .map(|c| {
            let size = match &c.kind {
                ComponentKind::Ball { radius } => *radius,
                ComponentKind::Ellipse { a, b, .. } => a.max(*b),
                ComponentKind::Cap(chart) => chart.r_lid.max(chart.b),
            };
            match &c.kind {
                ComponentKind::Cap(chart) => MeshResolution {
                    radial: ((2.0 * chart.r_lid / h).ceil() as usize).max(1),
                    angular: ((chart.b / h).ceil() as usize).max(1),
                },
                _ => MeshResolution {
                    radial: ((size / h).ceil() as usize).max(2),
                    angular: ((2.0 * PI * size / h).ceil() as usize).max(8),
                },
            }
        })
        .collect();
    volume_mesh_with(domain, &res, h)
}

/// Volume mesh from explicit per-component resolutions.
///
/// Balls and ellipses use Gauss–Legendre radial nodes times uniform angles;
/// caps use panels of `CAP_PANEL_ORDER`-point Gauss rules along `x'` and `x_n`.
pub fn volume_mesh_with(domain: &DomainGeometry, res: &[MeshResolution], h: f64) -> Result<QuadratureMesh> {
    if res.len() != domain.components.len() {
        return Err(Error::InvalidParameter("one resolution per component is required".into()));
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut component = Vec::new();
    let mut layouts = Vec::new();
    for (ci, (c, r)) in domain.components.iter().zip(res).enumerate() {
        let before = nodes.len();
        component_volume_nodes(c, r, &mut nodes, &mut weights)?;
        component.extend(std::iter::repeat_n(ci, nodes.len() - before));
        layouts.push(match (&c.kind, c.dim) {
            (ComponentKind::Ball { .. }, 2) | (ComponentKind::Ellipse { .. }, _) => Some(PolarLayout {
                start: before,
                radii: GaussLegendre::new(r.radial).mapped(0.0, 1.0).map(|(x, _)| x).collect(),
                angular: r.angular,
            }),
            _ => None,
        });
    }
    let id = mesh_id("volume", h, nodes.len());
    Ok(QuadratureMesh {
        id,
        dim: domain.dim,
        nodes,
        weights,
        component,
        h,
        layouts,
    })
}

fn component_volume_nodes(c: &DomainComponent, r: &MeshResolution, nodes: &mut Vec<Point>, weights: &mut Vec<f64>) -> Result<()> {
    if r.radial == 0 || r.angular == 0 {
        return Err(Error::InvalidParameter("mesh resolution must be positive".into()));
    }
    let o = c.center;
    match (&c.kind, c.dim) {
        (ComponentKind::Ball { radius }, 2) => {
            let gl = GaussLegendre::new(r.radial);
            let dt = 2.0 * PI / r.angular as f64;
            for (rr, wr) in gl.mapped(0.0, *radius) {
                for j in 0..r.angular {
                    let t = dt * (j as f64 + 0.5);
                    nodes.push([o[0] + rr * t.cos(), o[1] + rr * t.sin(), 0.0]);
                    weights.push(wr * rr * dt);
                }
            }
        }
        (ComponentKind::Ball { radius }, _) => {
            let gl = GaussLegendre::new(r.radial);
            let gz = GaussLegendre::new(r.angular.div_ceil(2).max(2));
            let dp = 2.0 * PI / r.angular as f64;
            for (rr, wr) in gl.mapped(0.0, *radius) {
                for (z, wz) in gz.mapped(-1.0, 1.0) {
                    let s = (1.0 - z * z).sqrt();
                    for j in 0..r.angular {
                        let ph = dp * (j as f64 + 0.5);
                        nodes.push([o[0] + rr * s * ph.cos(), o[1] + rr * s * ph.sin(), o[2] + rr * z]);
                        weights.push(wr * rr * rr * wz * dp);
                    }
                }
            }
        }
        (ComponentKind::Ellipse { a, b, angle }, _) => {
            let gl = GaussLegendre::new(r.radial);
            let dt = 2.0 * PI / r.angular as f64;
            let (s, co) = angle.sin_cos();
            for (rr, wr) in gl.mapped(0.0, 1.0) {
                for j in 0..r.angular {
                    let t = dt * (j as f64 + 0.5);
                    let (u, v) = (a * rr * t.cos(), b * rr * t.sin());
                    nodes.push([o[0] + co * u - s * v, o[1] + s * u + co * v, 0.0]);
                    weights.push(a * b * wr * rr * dt);
                }
            }
        }
        (ComponentKind::Cap(chart), 2) => {
            let gl = GaussLegendre::new(CAP_PANEL_ORDER);
            for (x1, w1) in composite(&gl, -chart.r_lid, chart.r_lid, r.radial) {
                let lo = chart.gamma(x1);
                for (x2, w2) in composite(&gl, lo, chart.b, r.angular) {
                    nodes.push([o[0] + x1, o[1] + x2, 0.0]);
                    weights.push(w1 * w2);
                }
            }
        }
        (ComponentKind::Cap(chart), _) => {
            let gl = GaussLegendre::new(CAP_PANEL_ORDER);
            let n_phi = (4 * r.radial).max(8);
            let dp = 2.0 * PI / n_phi as f64;
            for (rr, wr) in composite(&gl, 0.0, chart.r_lid, r.radial) {
                let lo = chart.gamma(rr);
                for (z, wz) in composite(&gl, lo, chart.b, r.angular) {
                    for j in 0..n_phi {
                        let ph = dp * (j as f64 + 0.5);
                        nodes.push([o[0] + rr * ph.cos(), o[1] + rr * ph.sin(), o[2] + z]);
                        weights.push(wr * rr * wz * dp);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Boundary mesh with characteristic spacing `h`.
pub fn boundary_mesh(domain: &DomainGeometry, h: f64) -> Result<BoundaryMesh> {
    check_h(domain, h)?;
    let mut m = BoundaryMesh {
        id: String::new(),
        dim: domain.dim,
        nodes: Vec::new(),
        normals: Vec::new(),
        weights: Vec::new(),
        tags: Vec::new(),
        component: Vec::new(),
        h,
    };
    for (ci, c) in domain.components.iter().enumerate() {
        let before = m.nodes.len();
        component_boundary_nodes(c, h, &mut m);
        m.component.extend(std::iter::repeat_n(ci, m.nodes.len() - before));
    }
    m.id = mesh_id("boundary", h, m.nodes.len());
    Ok(m)
}

fn push_b(m: &mut BoundaryMesh, p: Point, n: Point, w: f64, tag: BoundaryTag) {
    m.nodes.push(p);
    m.normals.push(n);
    m.weights.push(w);
    m.tags.push(tag);
}

fn component_boundary_nodes(c: &DomainComponent, h: f64, m: &mut BoundaryMesh) {
    let o = c.center;
    match (&c.kind, c.dim) {
        (ComponentKind::Ball { radius }, 2) => {
            let n = ((2.0 * PI * radius / h).ceil() as usize).max(8);
            let dt = 2.0 * PI / n as f64;
            for j in 0..n {
                let t = dt * j as f64;
                let nrm = [t.cos(), t.sin(), 0.0];
                push_b(m, [o[0] + radius * nrm[0], o[1] + radius * nrm[1], 0.0], nrm, radius * dt, BoundaryTag::Smooth);
            }
        }
        (ComponentKind::Ball { radius }, _) => {
            let n = ((2.0 * PI * radius / h).ceil() as usize).max(8);
            let gz = GaussLegendre::new(n.div_ceil(2).max(2));
            let dp = 2.0 * PI / n as f64;
            for (z, wz) in gz.mapped(-1.0, 1.0) {
                let s = (1.0 - z * z).sqrt();
                for j in 0..n {
                    let ph = dp * j as f64;
                    let nrm = [s * ph.cos(), s * ph.sin(), z];
                    let p = [o[0] + radius * nrm[0], o[1] + radius * nrm[1], o[2] + radius * nrm[2]];
                    push_b(m, p, nrm, radius * radius * wz * dp, BoundaryTag::Smooth);
                }
            }
        }
        (ComponentKind::Ellipse { a, b, angle }, _) => {
            let n = ((2.0 * PI * a.max(*b) / h).ceil() as usize).max(8);
            let dt = 2.0 * PI / n as f64;
            let (s, co) = angle.sin_cos();
            for j in 0..n {
                let t = dt * j as f64;
                let (u, v) = (a * t.cos(), b * t.sin());
                let (du, dv) = (-a * t.sin(), b * t.cos());
                let speed = (du * du + dv * dv).sqrt();
                let (nu, nv) = (dv / speed, -du / speed);
                let p = [o[0] + co * u - s * v, o[1] + s * u + co * v, 0.0];
                let nrm = [co * nu - s * nv, s * nu + co * nv, 0.0];
                push_b(m, p, nrm, speed * dt, BoundaryTag::Smooth);
            }
        }
        (ComponentKind::Cap(chart), 2) => {
            let gl = GaussLegendre::new(CAP_PANEL_ORDER);
            let panels = ((2.0 * chart.r_lid / h).ceil() as usize).max(1);
            for (x1, w1) in composite(&gl, -chart.r_lid, chart.r_lid, panels) {
                let gp = chart.gamma_prime(x1);
                let len = (1.0 + gp * gp).sqrt();
                push_b(m, [o[0] + x1, o[1] + chart.gamma(x1), 0.0], [gp / len, -1.0 / len, 0.0], w1 * len, BoundaryTag::Graph);
            }
            for (x1, w1) in composite(&gl, -chart.r_lid, chart.r_lid, panels) {
                push_b(m, [o[0] + x1, o[1] + chart.b, 0.0], [0.0, 1.0, 0.0], w1, BoundaryTag::Lid);
            }
        }
        (ComponentKind::Cap(chart), _) => {
            let gl = GaussLegendre::new(CAP_PANEL_ORDER);
            let panels = ((chart.r_lid / h).ceil() as usize).max(1);
            let n_phi = ((2.0 * PI * chart.r_lid / h).ceil() as usize).max(8);
            let dp = 2.0 * PI / n_phi as f64;
            for (r, wr) in composite(&gl, 0.0, chart.r_lid, panels) {
                let gp = chart.gamma_prime(r);
                let len = (1.0 + gp * gp).sqrt();
                for j in 0..n_phi {
                    let ph = dp * (j as f64 + 0.5);
                    let (cx, sx) = (ph.cos(), ph.sin());
                    let p = [o[0] + r * cx, o[1] + r * sx, o[2] + chart.gamma(r)];
                    push_b(m, p, [gp * cx / len, gp * sx / len, -1.0 / len], wr * r * dp * len, BoundaryTag::Graph);
                    let q = [o[0] + r * cx, o[1] + r * sx, o[2] + chart.b];
                    push_b(m, q, [0.0, 0.0, 1.0], wr * r * dp, BoundaryTag::Lid);
                }
            }
        }
    }
}

/// Perimeter (2D) or surface area (3D) of a component, for mesh checks.
pub fn boundary_measure(c: &DomainComponent) -> f64 {
    match (&c.kind, c.dim) {
        (ComponentKind::Ball { radius }, 2) => 2.0 * PI * radius,
        (ComponentKind::Ball { radius }, _) => 4.0 * PI * radius * radius,
        (ComponentKind::Ellipse { a, b, .. }, _) => {
            crate::quadrature::adaptive_gk(
                |t| ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt(),
                0.0,
                2.0 * PI,
                1e-13,
                1e-13,
                1000,
            )
            .unwrap_or(f64::NAN)
        }
        (ComponentKind::Cap(chart), 2) => {
            let graph = crate::quadrature::adaptive_gk(
                |s| (1.0 + chart.gamma_prime(s).powi(2)).sqrt(),
                -chart.r_lid,
                chart.r_lid,
                1e-14,
                1e-13,
                1000,
            )
            .unwrap_or(f64::NAN);
            graph + 2.0 * chart.r_lid
        }
        (ComponentKind::Cap(chart), _) => {
            let graph = crate::quadrature::adaptive_gk(
                |r| 2.0 * PI * r * (1.0 + chart.gamma_prime(r).powi(2)).sqrt(),
                0.0,
                chart.r_lid,
                1e-14,
                1e-13,
                1000,
            )
            .unwrap_or(f64::NAN);
            graph + PI * chart.r_lid * chart.r_lid
        }
    }
}
