//! Fixed-size vector helpers.
//!
//! Points and vectors are stored as 3-arrays in both dimensions; in 2D the
//! third entry is zero and ignored. This keeps kernels allocation-free.

use num_complex::Complex64;

/// A point or real vector. Unused trailing coordinates are zero.
pub type Point = [f64; 3];
/// A complex vector (displacement, force density, traction).
pub type CVec = [Complex64; 3];
/// A complex matrix, row-major: `m[i][j]`.
pub type CMat = [[Complex64; 3]; 3];

pub const ZERO_C: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const CZERO_VEC: CVec = [ZERO_C; 3];
pub const CZERO_MAT: CMat = [[ZERO_C; 3]; 3];

/// 2D point.
pub fn p2(x: f64, y: f64) -> Point {
    [x, y, 0.0]
}

/// 3D point.
pub fn p3(x: f64, y: f64, z: f64) -> Point {
    [x, y, z]
}

pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Bilinear (non-conjugated) product of complex vectors.
pub fn cdot(a: &CVec, b: &CVec) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm of a complex vector.
pub fn cnorm(a: &CVec) -> f64 {
    (a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()).sqrt()
}

pub fn cadd(a: &CVec, b: &CVec) -> CVec {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn csub(a: &CVec, b: &CVec) -> CVec {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cscale(a: &CVec, s: Complex64) -> CVec {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Promote a real vector to a complex one.
pub fn to_complex(a: &Point) -> CVec {
    [
        Complex64::new(a[0], 0.0),
        Complex64::new(a[1], 0.0),
        Complex64::new(a[2], 0.0),
    ]
}

/// Matrix-vector product `m v`.
pub fn matvec(m: &CMat, v: &CVec) -> CVec {
    let mut out = CZERO_VEC;
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

/// Transpose.
pub fn transpose(m: &CMat) -> CMat {
    let mut t = CZERO_MAT;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

/// In-plane perpendicular `(-v2, v1)`.
pub fn perp2(v: &Point) -> Point {
    [-v[1], v[0], 0.0]
}

/// Kahan-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> Complex64 {
        self.sum
    }
}
