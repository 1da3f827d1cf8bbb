//! Centered finite-difference stencils.

use crate::linalg::{CVec, Point, CZERO_VEC};
use serde::{Deserialize, Serialize};

/// Formal accuracy order of a centered stencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FdOrder {
    #[default]
    Second,
    Fourth,
    Sixth,
}

impl FdOrder {
    /// Half-width of the stencil in grid points.
    pub fn half_width(self) -> usize {
        match self {
            FdOrder::Second => 1,
            FdOrder::Fourth => 2,
            FdOrder::Sixth => 3,
        }
    }

    /// Weights of the first-derivative stencil at offsets `-r..=r` (before dividing by h).
    pub fn first(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[-0.5, 0.0, 0.5],
            FdOrder::Fourth => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
            FdOrder::Sixth => &[
                -1.0 / 60.0,
                3.0 / 20.0,
                -3.0 / 4.0,
                0.0,
                3.0 / 4.0,
                -3.0 / 20.0,
                1.0 / 60.0,
            ],
        }
    }

    /// Weights of the second-derivative stencil at offsets `-r..=r` (before dividing by h^2).
    pub fn second(self) -> &'static [f64] {
        match self {
            FdOrder::Second => &[1.0, -2.0, 1.0],
            FdOrder::Fourth => &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
            FdOrder::Sixth => &[
                1.0 / 90.0,
                -3.0 / 20.0,
                3.0 / 2.0,
                -49.0 / 18.0,
                3.0 / 2.0,
                -3.0 / 20.0,
                1.0 / 90.0,
            ],
        }
    }
}

fn axpy(acc: &mut CVec, w: f64, v: &CVec) {
    for i in 0..3 {
        acc[i] += v[i] * w;
    }
}

fn shifted(x: &Point, offsets: &[(usize, f64)]) -> Point {
    let mut y = *x;
    for &(axis, d) in offsets {
        y[axis] += d;
    }
    y
}

/// Second derivatives `H[j][k] = d_j d_k f(x)` of a vector field by centered differences.
pub fn hessian<F: Fn(&Point) -> CVec>(f: &F, x: &Point, h: f64, dim: usize, order: FdOrder) -> [[CVec; 3]; 3] {
    let r = order.half_width() as i64;
    let w1 = order.first();
    let w2 = order.second();
    let mut out = [[CZERO_VEC; 3]; 3];
    for j in 0..dim {
        let mut acc = CZERO_VEC;
        for (idx, w) in w2.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let o = (idx as i64 - r) as f64 * h;
            axpy(&mut acc, *w, &f(&shifted(x, &[(j, o)])));
        }
        for c in acc.iter_mut() {
            *c /= h * h;
        }
        out[j][j] = acc;
        for k in (j + 1)..dim {
            let mut acc = CZERO_VEC;
            for (a, wa) in w1.iter().enumerate() {
                if *wa == 0.0 {
                    continue;
                }
                for (b, wb) in w1.iter().enumerate() {
                    if *wb == 0.0 {
                        continue;
                    }
                    let oa = (a as i64 - r) as f64 * h;
                    let ob = (b as i64 - r) as f64 * h;
                    axpy(&mut acc, wa * wb, &f(&shifted(x, &[(j, oa), (k, ob)])));
                }
            }
            for c in acc.iter_mut() {
                *c /= h * h;
            }
            out[j][k] = acc;
            out[k][j] = acc;
        }
    }
    out
}

/// First derivatives `D[j] = d_j f(x)` by centered differences.
pub fn gradient<F: Fn(&Point) -> CVec>(f: &F, x: &Point, h: f64, dim: usize, order: FdOrder) -> [CVec; 3] {
    let r = order.half_width() as i64;
    let w1 = order.first();
    let mut out = [CZERO_VEC; 3];
    for j in 0..dim {
        let mut acc = CZERO_VEC;
        for (idx, w) in w1.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let o = (idx as i64 - r) as f64 * h;
            axpy(&mut acc, *w, &f(&shifted(x, &[(j, o)])));
        }
        for c in acc.iter_mut() {
            *c /= h;
        }
        out[j] = acc;
    }
    out
}
