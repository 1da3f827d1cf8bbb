//! One-dimensional quadrature rules.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` points, computed by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre nodes on [a, b] split into `panels` equal panels.
pub fn composite(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(rule.len() * panels);
    let step = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + step * p as f64;
        out.extend(rule.mapped(lo, lo + step));
    }
    out
}

/// Composite rule on [0, r] with panels refined geometrically toward 0.
///
/// Used for integrands with a logarithmic endpoint singularity at 0.
pub fn graded_toward_zero(rule: &GaussLegendre, r: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(rule.len() * (levels + 1));
    let mut hi = r;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        out.extend(rule.mapped(lo, hi));
        hi = lo;
    }
    out.extend(rule.mapped(0.0, hi));
    out
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS_K: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WEIGHTS_G: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WEIGHTS_K[7];
    let mut g = fc * GK_WEIGHTS_G[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += GK_WEIGHTS_K[i] * s;
        if i % 2 == 1 {
            g += GK_WEIGHTS_G[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of a real function on [a, b].
///
/// Bisects the interval with the largest error estimate until the total
/// estimate falls below `max(abs_tol, rel_tol * |I|)` or `max_intervals` is hit.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<f64> {
    let (v, e) = gk15(&mut f, a, b);
    let mut intervals = vec![(a, b, v, e)];
    loop {
        let total: f64 = intervals.iter().map(|t| t.2).sum();
        let err: f64 = intervals.iter().map(|t| t.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if intervals.len() >= max_intervals {
            return Err(Error::QuadratureBudgetExceeded(format!(
                "adaptive quadrature stopped at {} intervals with error estimate {err:e}",
                intervals.len()
            )));
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Fixed-size complex array integrand value.
pub type Arr<const N: usize> = [Complex64; N];

fn gk_vec<const N: usize, F: FnMut(f64) -> Arr<N>>(f: &mut F, a: f64, b: f64) -> (Arr<N>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = [Complex64::new(0.0, 0.0); N];
    let mut g = [Complex64::new(0.0, 0.0); N];
    for n in 0..N {
        k[n] = fc[n] * GK_WEIGHTS_K[7];
        g[n] = fc[n] * GK_WEIGHTS_G[3];
    }
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let f1 = f(c - x);
        let f2 = f(c + x);
        for n in 0..N {
            let s = f1[n] + f2[n];
            k[n] += s * GK_WEIGHTS_K[i];
            if i % 2 == 1 {
                g[n] += s * GK_WEIGHTS_G[i / 2];
            }
        }
    }
    let mut err = 0.0f64;
    for n in 0..N {
        k[n] *= h;
        err += ((k[n] - g[n] * h).norm()).powi(2);
    }
    (k, err.sqrt())
}

/// Adaptive Gauss–Kronrod integration of a complex-array-valued function
/// over consecutive breakpoint intervals.
///
/// Returns the estimate and whether the relative tolerance was met within
/// `max_intervals` subintervals.
pub fn adaptive_gk_array<const N: usize, F: FnMut(f64) -> Arr<N>>(
    mut f: F,
    breaks: &[f64],
    rel_tol: f64,
    max_intervals: usize,
) -> (Arr<N>, bool) {
    let mut intervals: Vec<(f64, f64, Arr<N>, f64)> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk_vec(&mut f, w[0], w[1]);
            intervals.push((w[0], w[1], v, e));
        }
    }
    loop {
        let mut total = [Complex64::new(0.0, 0.0); N];
        let mut err = 0.0;
        for t in &intervals {
            for n in 0..N {
                total[n] += t.2[n];
            }
            err += t.3;
        }
        let scale = total.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if err <= rel_tol * scale || err < 1e-300 {
            return (total, true);
        }
        if intervals.len() >= max_intervals {
            return (total, false);
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk_vec(&mut f, lo, mid);
        let (v2, e2) = gk_vec(&mut f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
