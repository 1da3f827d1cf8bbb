//! Second-order forward-mode jets.
//!
//! A `Jet2` carries a value, gradient and Hessian with respect to the
//! spatial coordinates, so manufactured fields can be pushed through the
//! Lamé operator without finite differences.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

impl Jet2 {
    pub fn constant(v: f64) -> Self {
        Jet2 {
            v,
            g: [0.0; 3],
            h: [[0.0; 3]; 3],
        }
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn variable(value: f64, i: usize) -> Self {
        let mut j = Jet2::constant(value);
        j.g[i] = 1.0;
        j
    }

    /// Coordinate jets of a point.
    pub fn coordinates(x: &[f64; 3]) -> [Jet2; 3] {
        [
            Jet2::variable(x[0], 0),
            Jet2::variable(x[1], 1),
            Jet2::variable(x[2], 2),
        ]
    }

    /// Apply a scalar function with value `f0`, derivative `f1` and second derivative `f2`.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Jet2::constant(f0);
        for i in 0..3 {
            out.g[i] = f1 * self.g[i];
            for j in 0..3 {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.g[i] * self.g[j];
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn powi(&self, n: i32) -> Self {
        if n == 0 {
            return Jet2::constant(1.0);
        }
        let nf = n as f64;
        let f0 = self.v.powi(n);
        let f1 = nf * self.v.powi(n - 1);
        let f2 = if n >= 2 || self.v != 0.0 {
            nf * (nf - 1.0) * self.v.powi(n - 2)
        } else {
            0.0
        };
        self.chain(f0, f1, f2)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.v *= s;
        for i in 0..3 {
            out.g[i] *= s;
            for j in 0..3 {
                out.h[i][j] *= s;
            }
        }
        out
    }

    pub fn laplacian(&self, dim: usize) -> f64 {
        (0..dim).map(|i| self.h[i][i]).sum()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        let mut out = self;
        out.v += o.v;
        for i in 0..3 {
            out.g[i] += o.g[i];
            for j in 0..3 {
                out.h[i][j] += o.h[i][j];
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + o.scale(-1.0)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.v * o.v);
        for i in 0..3 {
            out.g[i] = self.g[i] * o.v + self.v * o.g[i];
            for j in 0..3 {
                out.h[i][j] = self.h[i][j] * o.v
                    + self.v * o.h[i][j]
                    + self.g[i] * o.g[j]
                    + self.g[j] * o.g[i];
            }
        }
        out
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, o: f64) -> Jet2 {
        let mut out = self;
        out.v += o;
        out
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, o: f64) -> Jet2 {
        self.scale(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_polynomial() {
        let [x, y, _] = Jet2::coordinates(&[0.3, -0.7, 0.0]);
        // f = x^2 y
        let f = x.powi(2) * y;
        assert!((f.v - 0.09 * -0.7).abs() < 1e-15);
        assert!((f.g[0] - 2.0 * 0.3 * -0.7).abs() < 1e-15);
        assert!((f.g[1] - 0.09).abs() < 1e-15);
        assert!((f.h[0][0] - 2.0 * -0.7).abs() < 1e-15);
        assert!((f.h[0][1] - 0.6).abs() < 1e-15);
        assert!((f.h[1][1]).abs() < 1e-15);
    }
}
