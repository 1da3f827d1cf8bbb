//! Fundamental solutions of the Helmholtz and Lamé operators.
//!
//! Conventions: `(Delta + kappa^2) Phi = -delta` and
//! `(L + omega^2) G = -delta I`, so the outgoing solution of
//! `L u + omega^2 u = f` is `u = -int G f`.

use crate::elastic::LameMedium;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, CMat, Point, CZERO_MAT};
use crate::special::cylinder;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Outgoing fundamental solution of the Helmholtz equation.
pub fn helmholtz_fundamental(kappa: f64, x: &Point, y: &Point, dim: usize) -> Result<Complex64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let r = norm(&sub(x, y));
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(match dim {
        2 => I * 0.25 * cylinder(kappa * r).h0(),
        3 => Complex64::from_polar(1.0, kappa * r) / (4.0 * PI * r),
        d => return Err(Error::UnsupportedDimension(d)),
    })
}

/// Kupradze tensor evaluated at a pair of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorKernelValue {
    pub matrix: CMat,
    pub source: Point,
    pub target: Point,
}

/// Radial pieces of the tensor: `G = a I + b xhat xhat^T` with `xhat = (x - y)/r`.
///
/// In 2D the pole of `H1` cancels between the shear and pressure parts;
/// the cancellation is carried out analytically so the coefficients stay
/// accurate as `r -> 0`.
#[derive(Debug, Clone, Copy)]
pub struct RadialCoefficients {
    pub identity: Complex64,
    pub projector: Complex64,
}

/// Coefficients of `G(x, y)` as functions of `r = |x - y| > 0`.
pub fn radial_coefficients(r: f64, medium: &LameMedium) -> RadialCoefficients {
    let (ks, kp) = (medium.kappa_s, medium.kappa_p);
    let w2 = medium.omega * medium.omega;
    let (phi_s, f1_over_r, f2) = if medium.dim == 2 {
        let cs = cylinder(ks * r);
        let cp = cylinder(kp * r);
        let phi_s = I * 0.25 * cs.h0();
        let phi_p = I * 0.25 * cp.h0();
        let f1_over_r = I * 0.25 * (-ks * cs.h1_regular() + kp * cp.h1_regular()) / r;
        let f2 = -ks * ks * phi_s + kp * kp * phi_p - f1_over_r;
        (phi_s, f1_over_r, f2)
    } else {
        let e = |k: f64| Complex64::from_polar(1.0, k * r) / (4.0 * PI * r);
        let d1 = |k: f64| e(k) * (I * k * r - 1.0) / r;
        let d2 = |k: f64| e(k) * (2.0 - 2.0 * I * k * r - k * k * r * r) / (r * r);
        (e(ks), (d1(ks) - d1(kp)) / r, d2(ks) - d2(kp))
    };
    RadialCoefficients {
        identity: phi_s / medium.mu + f1_over_r / w2,
        projector: (f2 - f1_over_r) / w2,
    }
}

/// The outgoing Lamé fundamental tensor
/// `G = (1/mu) Phi_s I + omega^{-2} Hess_x (Phi_s - Phi_p)`.
pub fn kupradze_tensor(x: &Point, y: &Point, medium: &LameMedium) -> Result<TensorKernelValue> {
    let d = sub(x, y);
    let r = norm(&d);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(TensorKernelValue {
        matrix: tensor_from_offset(&d, r, medium),
        source: *y,
        target: *x,
    })
}

/// Tensor for offset `d = x - y` with `r = |d| > 0`; no validation.
pub fn tensor_from_offset(d: &Point, r: f64, medium: &LameMedium) -> CMat {
    let c = radial_coefficients(r, medium);
    let n = medium.dim;
    let mut m = CZERO_MAT;
    for i in 0..n {
        for j in 0..n {
            let mut v = c.projector * (d[i] * d[j] / (r * r));
            if i == j {
                v += c.identity;
            }
            m[i][j] = v;
        }
    }
    m
}

/// Constants of the far-field asymptotics of the tensor:
/// `G(x, y) ~ c_p e^{i kp|x|}/|x|^{(n-1)/2} e^{-i kp xhat.y} xhat xhat^T
///          + c_s e^{i ks|x|}/|x|^{(n-1)/2} e^{-i ks xhat.y} (I - xhat xhat^T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldConstants {
    pub c_p: Complex64,
    pub c_s: Complex64,
}

/// Far-field constants from the large-argument form of the fundamental solutions.
pub fn farfield_constants(medium: &LameMedium) -> FarFieldConstants {
    if medium.dim == 2 {
        let phase = Complex64::from_polar(1.0, PI / 4.0);
        FarFieldConstants {
            c_p: phase / ((medium.lambda + 2.0 * medium.mu) * (8.0 * PI * medium.kappa_p).sqrt()),
            c_s: phase / (medium.mu * (8.0 * PI * medium.kappa_s).sqrt()),
        }
    } else {
        FarFieldConstants {
            c_p: Complex64::new(1.0 / (4.0 * PI * (medium.lambda + 2.0 * medium.mu)), 0.0),
            c_s: Complex64::new(1.0 / (4.0 * PI * medium.mu), 0.0),
        }
    }
}

/// Far-field kernels of the tensor for observation direction `xhat` and source `y`.
///
/// Returns the scalar pressure coefficient (the pressure kernel is this
/// scalar times `xhat xhat^T`) and the tangential shear matrix.
pub fn farfield_kernels(xhat: &Point, y: &Point, medium: &LameMedium) -> Result<(Complex64, CMat)> {
    if (norm(xhat) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidDirection(format!("|xhat| = {}", norm(xhat))));
    }
    let c = farfield_constants(medium);
    let phase_p = Complex64::from_polar(1.0, -medium.kappa_p * dot(xhat, y));
    let phase_s = Complex64::from_polar(1.0, -medium.kappa_s * dot(xhat, y));
    let n = medium.dim;
    let mut shear = CZERO_MAT;
    let cs = c.c_s * phase_s;
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            shear[i][j] = cs * (delta - xhat[i] * xhat[j]);
        }
    }
    Ok((c.c_p * phase_p, shear))
}
