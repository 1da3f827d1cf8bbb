//! Structural right-hand sides of the radiation criteria, regime verdicts,
//! admissible-class predicates and empirical constant calibration.
//!
//! Every "structural" expression has its unnamed constant set to one. Constants
//! are fitted from sweeps whose regime is known independently, never assumed.
//!
//! Hölder seminorms entering a left-hand side come from sampled estimators,
//! which are lower bounds of the true seminorms. The reported lhs is therefore
//! an upper bound of the true ratio.

use crate::error::{Error, Result};
use crate::medium::upsilon;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::E;

/// Three-valued verdict of a criterion under a fitted constant `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `ratio > 1.1 C`.
    RadiatingAsserted,
    /// `ratio <= C`.
    NonRadiatingConsistent,
    /// `C < ratio <= 1.1 C`.
    Indeterminate,
}

/// Band above the fitted constant reported as indeterminate.
pub const INDETERMINATE_BAND: f64 = 0.1;

/// Classify `ratio` against the constant `c`.
pub fn classify(ratio: f64, c: f64) -> Regime {
    if ratio <= c {
        Regime::NonRadiatingConsistent
    } else if ratio <= c * (1.0 + INDETERMINATE_BAND) {
        Regime::Indeterminate
    } else {
        Regime::RadiatingAsserted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub lhs: f64,
    pub rhs_structural: f64,
    pub ratio: f64,
    pub regime: Regime,
    pub inputs_echo: BTreeMap<String, f64>,
}

impl CriterionReport {
    fn build(name: &str, lhs: f64, rhs: f64, c_fit: f64, echo: &[(&str, f64)]) -> Result<Self> {
        if !(rhs > 0.0 && rhs.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name}: structural rhs {rhs} is not positive and finite")));
        }
        if !(lhs >= 0.0 && lhs.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name}: lhs {lhs} is not finite and nonnegative")));
        }
        if !(c_fit > 0.0) {
            return Err(Error::InvalidParameter(format!("fitted constant must be positive, got {c_fit}")));
        }
        let ratio = lhs / rhs;
        let mut inputs_echo: BTreeMap<String, f64> = echo.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        inputs_echo.insert("c_fit".into(), c_fit);
        Ok(CriterionReport {
            name: name.into(),
            lhs,
            rhs_structural: rhs,
            ratio,
            regime: classify(ratio, c_fit),
            inputs_echo,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub constant_fit: f64,
    pub violations: usize,
    pub sweep_size: usize,
    pub fit_method: String,
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 3 => Ok(()),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Hölder exponent range for the small-support family: `(0,1]` in 2D, `(0,1/2]` in 3D.
pub fn check_small_exponent(delta: f64, dim: usize) -> Result<()> {
    check_dim(dim)?;
    let hi = if dim == 2 { 1.0 } else { 0.5 };
    if delta > 0.0 && delta <= hi {
        Ok(())
    } else {
        Err(Error::InvalidExponent(delta))
    }
}

/// `eps^delta (1 + (1 + eps) eps^{n/2})`.
pub fn small_rhs(epsilon: f64, delta: f64, dim: usize) -> f64 {
    epsilon.powf(delta) * (1.0 + (1.0 + epsilon) * epsilon.powf(dim as f64 / 2.0))
}

/// `eps^delta (1 + (1 + Upsilon)(1 + eps) eps^{n/2})`.
pub fn medium_small_rhs(epsilon: f64, delta: f64, dim: usize, ups: f64) -> f64 {
    epsilon.powf(delta) * (1.0 + (1.0 + ups) * (1.0 + epsilon) * epsilon.powf(dim as f64 / 2.0))
}

/// Decay exponent of the K-point expression, validated for the dimension.
///
/// In 2D `alpha` may reach 1 (the closed end is used by the class-free
/// criteria); in 3D `alpha` and `min(alpha, varsigma)` must exceed 1/3.
pub fn kpoint_exponent(alpha: f64, varsigma: f64, dim: usize) -> Result<f64> {
    check_dim(dim)?;
    let m = alpha.min(varsigma);
    if !(alpha > 0.0 && alpha <= 1.0 && varsigma > 0.0) {
        return Err(Error::ExponentOutOfRange(format!("alpha = {alpha}, varsigma = {varsigma}")));
    }
    if dim == 2 {
        return Ok(-m / 2.0);
    }
    if !(alpha > 1.0 / 3.0 && m > 1.0 / 3.0 && m <= 1.0) {
        return Err(Error::ExponentOutOfRange(format!(
            "3D needs alpha and min(alpha, varsigma) in (1/3, 1], got alpha = {alpha}, varsigma = {varsigma}"
        )));
    }
    Ok(-m / 2.0 + 1.0 / 6.0)
}

/// `(ln K)^{(n+1)/2} K^{-min(alpha,varsigma)/2 [+1/6 in 3D]}`.
pub fn kpoint_rhs(k: f64, alpha: f64, varsigma: f64, dim: usize) -> Result<f64> {
    let p = kpoint_exponent(alpha, varsigma, dim)?;
    if k < E {
        return Err(Error::KTooSmall(k));
    }
    Ok(k.ln().powf((dim as f64 + 1.0) / 2.0) * k.powf(p))
}

/// Small-support radiation test for one component.
#[allow(clippy::too_many_arguments)]
pub fn small_support_criterion(
    sup_boundary_phi: f64,
    holder_seminorm_phi: f64,
    linf_phi: f64,
    delta: f64,
    epsilon: f64,
    omega: f64,
    dim: usize,
    c_fit: f64,
) -> Result<CriterionReport> {
    check_small_exponent(delta, dim)?;
    if !(epsilon > 0.0 && omega > 0.0) {
        return Err(Error::InvalidParameter("epsilon and omega must be positive".into()));
    }
    let denom = omega.powf(-delta) * holder_seminorm_phi + linf_phi;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter("source intensity vanishes identically".into()));
    }
    CriterionReport::build(
        "small-support",
        sup_boundary_phi / denom,
        small_rhs(epsilon, delta, dim),
        c_fit,
        &[
            ("sup_boundary_phi", sup_boundary_phi),
            ("holder_seminorm_phi", holder_seminorm_phi),
            ("linf_phi", linf_phi),
            ("delta", delta),
            ("epsilon", epsilon),
            ("omega", omega),
            ("dim", dim as f64),
        ],
    )
}

/// Smallest diameter a non-radiating component can have:
/// `min(1, (c_fit lhs_ratio)^{1/delta}) / omega`.
pub fn diameter_lower_bound(lhs_ratio: f64, delta: f64, omega: f64, c_fit: f64) -> f64 {
    (c_fit * lhs_ratio).powf(1.0 / delta).min(1.0) / omega
}

/// K-curvature point test for sources.
pub fn kpoint_criterion(phi_at_q: f64, norm_max: f64, k: f64, alpha: f64, varsigma: f64, dim: usize, c_fit: f64) -> Result<CriterionReport> {
    let rhs = kpoint_rhs(k, alpha, varsigma, dim)?;
    CriterionReport::build(
        "k-point",
        phi_at_q / norm_max.max(1.0),
        rhs,
        c_fit,
        &[
            ("phi_at_q", phi_at_q),
            ("norm_max", norm_max),
            ("k", k),
            ("alpha", alpha),
            ("varsigma", varsigma),
            ("dim", dim as f64),
        ],
    )
}

/// Small-support radiation test for a medium scatterer.
#[allow(clippy::too_many_arguments)]
pub fn medium_small_criterion(
    v_ui_sup: f64,
    v_norm: f64,
    ui_norm: f64,
    delta: f64,
    epsilon: f64,
    eps_max: f64,
    v_max: f64,
    s_fit: f64,
    dim: usize,
    c_fit: f64,
) -> Result<CriterionReport> {
    check_small_exponent(delta, dim)?;
    if !(epsilon > 0.0 && epsilon <= eps_max) {
        return Err(Error::InvalidParameter(format!("need 0 < epsilon <= eps_max, got {epsilon} and {eps_max}")));
    }
    if !(v_norm > 0.0 && ui_norm > 0.0) {
        return Err(Error::InvalidParameter("norms must be positive".into()));
    }
    let ups = upsilon(eps_max, v_max, s_fit)?;
    CriterionReport::build(
        "medium-small",
        v_ui_sup / (v_norm * ui_norm),
        medium_small_rhs(epsilon, delta, dim, ups),
        c_fit,
        &[
            ("v_ui_sup", v_ui_sup),
            ("v_norm", v_norm),
            ("ui_norm", ui_norm),
            ("delta", delta),
            ("epsilon", epsilon),
            ("eps_max", eps_max),
            ("v_max", v_max),
            ("s_fit", s_fit),
            ("upsilon", ups),
            ("dim", dim as f64),
        ],
    )
}

/// K-curvature point test for a medium scatterer, `lhs = |V(q) u^i(q)|`.
pub fn medium_kpoint_criterion(vui_at_q: f64, k: f64, alpha: f64, varsigma: f64, dim: usize, c_fit: f64) -> Result<CriterionReport> {
    let rhs = kpoint_rhs(k, alpha, varsigma, dim)?;
    CriterionReport::build(
        "medium-k-point",
        vui_at_q,
        rhs,
        c_fit,
        &[("vui_at_q", vui_at_q), ("k", k), ("alpha", alpha), ("varsigma", varsigma), ("dim", dim as f64)],
    )
}

/// Geometric parameter of a transmission-eigenfunction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TransmissionKind {
    Small { epsilon: f64, delta: f64 },
    Kpoint { k: f64, alpha: f64, varsigma: f64 },
}

/// Contrast statistics entering the transmission bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VStats {
    /// Hölder-type norm of `V`.
    pub norm: f64,
    /// `inf |V|` over the boundary.
    pub inf_boundary: f64,
    /// `|V(q)|` at the K-curvature point.
    pub at_q: Option<f64>,
}

/// Upper bound on `sup |w|` (small kind) or `|w(q)|` (K-point kind) for a
/// normalized transmission eigenfunction. `measured` is the eigenfunction
/// boundary datum when available, otherwise the lhs is reported as zero.
pub fn transmission_bounds(kind: TransmissionKind, v: VStats, dim: usize, measured: Option<f64>, c_fit: f64) -> Result<CriterionReport> {
    let lhs = measured.unwrap_or(0.0);
    match kind {
        TransmissionKind::Small { epsilon, delta } => {
            check_small_exponent(delta, dim)?;
            if !(v.inf_boundary > 0.0) {
                return Err(Error::DegenerateContrast);
            }
            if !(epsilon > 0.0) {
                return Err(Error::InvalidParameter("epsilon must be positive".into()));
            }
            let rhs = v.norm / v.inf_boundary * small_rhs(epsilon, delta, dim);
            CriterionReport::build(
                "transmission-small",
                lhs,
                rhs,
                c_fit,
                &[
                    ("v_norm", v.norm),
                    ("v_inf_boundary", v.inf_boundary),
                    ("epsilon", epsilon),
                    ("delta", delta),
                    ("dim", dim as f64),
                ],
            )
        }
        TransmissionKind::Kpoint { k, alpha, varsigma } => {
            let vq = v.at_q.ok_or_else(|| Error::IncompleteInputs("|V(q)| is required for the K-point bound".into()))?;
            if !(vq > 0.0) {
                return Err(Error::DegenerateContrast);
            }
            let rhs = kpoint_rhs(k, alpha, varsigma, dim)?;
            CriterionReport::build(
                "transmission-k-point",
                lhs,
                rhs,
                c_fit,
                &[("v_at_q", vq), ("k", k), ("alpha", alpha), ("varsigma", varsigma), ("dim", dim as f64)],
            )
        }
    }
}

/// Upper end of the bisection bracket in [`epsilon_min_solve`].
pub const EPSILON_BRACKET: f64 = 1e3;

/// Solve `c_fit eps^delta (1 + (1+eps) eps^{n/2}) = target` for `eps`.
pub fn epsilon_min_solve(target_lhs: f64, delta: f64, dim: usize, c_fit: f64) -> Result<f64> {
    check_dim(dim)?;
    if !(target_lhs > 0.0 && delta > 0.0 && c_fit > 0.0) {
        return Err(Error::InvalidParameter("target, delta and constant must be positive".into()));
    }
    let f = |e: f64| c_fit * small_rhs(e, delta, dim);
    let max = f(EPSILON_BRACKET);
    if target_lhs > max {
        return Err(Error::NoRoot { target: target_lhs, max });
    }
    let (mut lo, mut hi) = (0.0f64, EPSILON_BRACKET);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target_lhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Admissible classes for sources (`A`, `B`) and media (`A'`, `B'`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdmissibleClass {
    A,
    B,
    #[serde(rename = "A-prime")]
    APrime,
    #[serde(rename = "B-prime")]
    BPrime,
}

/// Data demanded by the class definitions. Unused fields may be left empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmissibleInputs {
    pub dim: Option<usize>,
    /// Hölder exponent (`alpha` or `delta`).
    pub exponent: Option<f64>,
    pub varsigma: Option<f64>,
    /// Criterion whose ratio is tested against `constant`.
    pub criterion: Option<CriterionReport>,
    /// Class constant (`C`, `R` or the medium analogue).
    pub constant: Option<f64>,
    /// Hölder and `H^1` norms of the source or contrast.
    pub holder_norm: Option<f64>,
    pub h1_norm: Option<f64>,
    /// A-priori cap on those norms.
    pub norm_cap: Option<f64>,
    /// Component diameters, smallest pairwise distance, `epsilon_min` and `omega`
    /// for collections.
    pub component_diameters: Option<Vec<f64>>,
    pub separation: Option<f64>,
    pub epsilon_min: Option<f64>,
    pub omega: Option<f64>,
    /// Medium data.
    pub support_inside: Option<bool>,
    pub v_inf_boundary: Option<f64>,
    pub m_min: Option<f64>,
    pub v_norm: Option<f64>,
    pub m_max: Option<f64>,
    pub diameter: Option<f64>,
    pub diameter_cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassItem {
    pub item: String,
    pub passed: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleVerdict {
    pub class: AdmissibleClass,
    pub admissible: bool,
    pub items: Vec<ClassItem>,
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::IncompleteInputs(format!("missing {name}")))
}

fn item(items: &mut Vec<ClassItem>, name: &str, passed: bool, detail: String) {
    items.push(ClassItem {
        item: name.into(),
        passed,
        reason: if passed { String::new() } else { detail },
    });
}

/// Evaluate every item of a class definition.
pub fn admissible_class_check(class: AdmissibleClass, inputs: &AdmissibleInputs) -> Result<AdmissibleVerdict> {
    let dim = need(&inputs.dim, "dim")?;
    check_dim(dim)?;
    let exponent = need(&inputs.exponent, "exponent")?;
    let criterion = need(&inputs.criterion, "criterion")?;
    let constant = need(&inputs.constant, "constant")?;
    let mut items = Vec::new();

    let (lo, hi, hi_closed) = match (class, dim) {
        (AdmissibleClass::A | AdmissibleClass::APrime, 2) => (0.0, 1.0, true),
        (AdmissibleClass::A | AdmissibleClass::APrime, _) => (0.0, 0.5, true),
        (_, 2) => (0.0, 1.0, false),
        _ => (1.0 / 3.0, 1.0, false),
    };
    let in_range = exponent > lo && if hi_closed { exponent <= hi } else { exponent < hi };
    item(&mut items, "exponent range", in_range, format!("exponent {exponent} outside the class range"));
    if matches!(class, AdmissibleClass::BPrime) && dim == 3 {
        let vs = need(&inputs.varsigma, "varsigma")?;
        let m = exponent.min(vs);
        item(
            &mut items,
            "exponent range",
            m > 1.0 / 3.0 && m < 1.0,
            format!("min(alpha, varsigma) = {m} outside (1/3, 1)"),
        );
    }

    match class {
        AdmissibleClass::B | AdmissibleClass::BPrime => {
            let cap = need(&inputs.norm_cap, "norm_cap")?;
            let h = need(&inputs.holder_norm, "holder_norm")?;
            let h1 = need(&inputs.h1_norm, "h1_norm")?;
            let ok = if matches!(class, AdmissibleClass::B) { h.max(h1) < cap } else { h.max(h1) <= cap };
            item(&mut items, "norm bound", ok, format!("max(Hölder, H1) = {} exceeds {cap}", h.max(h1)));
        }
        AdmissibleClass::APrime => {
            let inside = need(&inputs.support_inside, "support_inside")?;
            item(&mut items, "support", inside, "contrast support leaves the domain".into());
            let vi = need(&inputs.v_inf_boundary, "v_inf_boundary")?;
            let m_min = need(&inputs.m_min, "m_min")?;
            item(&mut items, "contrast", vi >= m_min, format!("inf |V| on the boundary = {vi} below {m_min}"));
            let vn = need(&inputs.v_norm, "v_norm")?;
            let m_max = need(&inputs.m_max, "m_max")?;
            item(&mut items, "norm bound", vn <= m_max, format!("contrast norm {vn} exceeds {m_max}"));
        }
        AdmissibleClass::A => {}
    }
    if matches!(class, AdmissibleClass::BPrime) {
        if let (Some(d), Some(cap)) = (inputs.diameter, inputs.diameter_cap) {
            item(&mut items, "diameter", d <= cap, format!("diameter {d} exceeds {cap}"));
        }
        if let Some(inside) = inputs.support_inside {
            item(&mut items, "support", inside, "contrast support leaves the domain".into());
        }
    }

    let ratio_ok = match class {
        AdmissibleClass::A => criterion.ratio > constant,
        _ => criterion.ratio >= constant,
    };
    item(
        &mut items,
        "criterion",
        ratio_ok,
        format!("criterion ratio {} does not clear the constant {constant}", criterion.ratio),
    );

    if matches!(class, AdmissibleClass::A | AdmissibleClass::APrime) {
        if let Some(diams) = &inputs.component_diameters {
            if diams.len() > 1 {
                let em = need(&inputs.epsilon_min, "epsilon_min")?;
                let omega = need(&inputs.omega, "omega")?;
                let sep = need(&inputs.separation, "separation")?;
                let limit = em / omega;
                let biggest = diams.iter().cloned().fold(0.0, f64::max);
                item(&mut items, "component diameter", biggest <= limit, format!("component diameter {biggest} exceeds {limit}"));
                item(&mut items, "separation", sep > 2.0 * limit, format!("separation {sep} not above {}", 2.0 * limit));
            }
        }
    }
    Ok(AdmissibleVerdict {
        class,
        admissible: items.iter().all(|i| i.passed),
        items,
    })
}

/// Tightest constant making every `lhs <= C rhs` hold.
pub fn calibrate_constant(sweep: &[(f64, f64)]) -> Result<CalibrationResult> {
    if sweep.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut c = 0.0f64;
    for &(lhs, rhs) in sweep {
        if !(rhs > 0.0) || !lhs.is_finite() {
            return Err(Error::InvalidParameter(format!("sweep entry ({lhs}, {rhs}) is not usable")));
        }
        c = c.max(lhs / rhs);
    }
    Ok(CalibrationResult {
        constant_fit: c,
        violations: count_violations(c, sweep),
        sweep_size: sweep.len(),
        fit_method: "max of lhs/rhs_structural over the sweep".into(),
    })
}

/// Entries with `lhs / rhs > c`.
///
/// Comparing the ratio rather than `lhs > c rhs` keeps the fitted maximum
/// itself from counting as a violation through rounding.
pub fn count_violations(c: f64, entries: &[(f64, f64)]) -> usize {
    entries.iter().filter(|(l, r)| *l / *r > c).count()
}

/// Measured scattering ratios for one medium configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionSample {
    /// `eps sup|V|`.
    pub product: f64,
    /// `||u|| / ||u^i||` on the scatterer.
    pub ratio_u: f64,
    /// `||u^t|| / ||u^i||` on the scatterer.
    pub ratio_ut: f64,
}

impl ContractionSample {
    /// Largest `s` for which both `ratio_u <= Upsilon` and `ratio_ut <= 1 + Upsilon` hold.
    pub fn largest_s(&self) -> f64 {
        let p = self.product;
        let mut s = if self.ratio_u > 0.0 { p + p / self.ratio_u } else { f64::INFINITY };
        if self.ratio_ut > 1.0 {
            s = s.min(self.ratio_ut * p / (self.ratio_ut - 1.0));
        }
        s
    }

    /// Both bounds hold at `s` (and the configuration is in the regime `p < s`).
    pub fn holds(&self, s: f64) -> bool {
        let p = self.product;
        if p >= s {
            return false;
        }
        let ups = p / (s - p);
        self.ratio_u <= ups && self.ratio_ut <= 1.0 + ups
    }
}

/// Fit the contraction constant `s` as the largest value consistent with every sample.
pub fn calibrate_contraction(samples: &[ContractionSample]) -> Result<CalibrationResult> {
    if samples.is_empty() {
        return Err(Error::EmptySweep);
    }
    let s = samples.iter().map(|c| c.largest_s()).fold(f64::INFINITY, f64::min);
    if !s.is_finite() {
        return Err(Error::InvalidParameter("contraction samples carry no scattering".into()));
    }
    Ok(CalibrationResult {
        constant_fit: s,
        violations: samples.iter().filter(|c| !c.holds(s * (1.0 - 1e-12))).count(),
        sweep_size: samples.len(),
        fit_method: "min over the sweep of the largest s satisfying both ratio bounds".into(),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientSamples(x.len().min(y.len())));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("log-log fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Fit `ln y = p ln K + q ln ln K + c` by least squares and return `(p, q)`.
///
/// Applied to sampled K-point right-hand sides this recovers the power and
/// logarithmic exponents without assuming either.
pub fn kpoint_decay_fit(ks: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if ks.len() != values.len() || ks.len() < 3 {
        return Err(Error::InsufficientSamples(ks.len().min(values.len())));
    }
    if ks.iter().any(|k| !(*k > E)) || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidParameter("decay fit needs K > e and positive values".into()));
    }
    let a = nalgebra::DMatrix::from_fn(ks.len(), 3, |i, j| match j {
        0 => ks[i].ln(),
        1 => ks[i].ln().ln(),
        _ => 1.0,
    });
    let b = nalgebra::DVector::from_iterator(values.len(), values.iter().map(|v| v.ln()));
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("decay fit failed: {e}")))?;
    Ok((sol[0], sol[1]))
}
