//! Bessel, Hankel and gamma-type special functions.
//!
//! Cylinder functions of order 0 and 1 use the ascending series below
//! `SERIES_CROSSOVER` and the Hankel asymptotic expansion above it. Both
//! branches are accurate to about 1e-11 relative on the positive axis.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Argument at which the Bessel evaluation switches from series to asymptotics.
pub const SERIES_CROSSOVER: f64 = 12.0;

/// Values of J0, J1, Y0 and the regular part of Y1 at one argument.
///
/// `y1_regular` is `Y1(z) + 2/(pi z)`, which stays bounded as `z -> 0`.
#[derive(Debug, Clone, Copy)]
pub struct CylinderValues {
    pub j0: f64,
    pub j1: f64,
    pub y0: f64,
    pub y1_regular: f64,
}

impl CylinderValues {
    pub fn y1(&self, z: f64) -> f64 {
        self.y1_regular - 2.0 / (PI * z)
    }

    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.j0, self.y0)
    }

    pub fn h1(&self, z: f64) -> Complex64 {
        Complex64::new(self.j1, self.y1(z))
    }

    /// `H1(z) + 2i/(pi z)`, the Hankel function with its pole removed.
    pub fn h1_regular(&self) -> Complex64 {
        Complex64::new(self.j1, self.y1_regular)
    }
}

/// Evaluate J0, J1, Y0 and the regular part of Y1 at `z > 0`.
pub fn cylinder(z: f64) -> CylinderValues {
    debug_assert!(z > 0.0);
    if z < SERIES_CROSSOVER {
        cylinder_series(z)
    } else {
        cylinder_asymptotic(z)
    }
}

fn cylinder_series(z: f64) -> CylinderValues {
    let q = 0.25 * z * z;
    let half = 0.5 * z;
    let log_half = half.ln();

    // term_k = (-q)^k / (k!)^2 ; term1_k = (-q)^k / (k! (k+1)!)
    let mut term0 = 1.0;
    let mut term1 = 1.0;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    let mut y0_sum = 0.0;
    let mut y1_sum = 0.0;
    // psi(k+1) = -gamma + H_k
    let mut harmonic = 0.0;
    let mut k = 0usize;
    loop {
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0);
        j0 += term0;
        j1 += term1;
        if k >= 1 {
            y0_sum += harmonic * term0;
        }
        y1_sum += (psi_k1 + psi_k2) * term1;

        k += 1;
        let kf = k as f64;
        harmonic += 1.0 / kf;
        term0 *= -q / (kf * kf);
        term1 *= -q / (kf * (kf + 1.0));
        if term0.abs() < 1e-18 && term1.abs() < 1e-18 && k > 2 {
            break;
        }
        if k > 200 {
            break;
        }
    }
    j1 *= half;
    // Y0 series: (2/pi)(ln(z/2)+gamma) J0 - (2/pi) sum_{k>=1} H_k (-q)^k/(k!)^2
    let y0 = 2.0 / PI * (log_half + EULER_GAMMA) * j0 - 2.0 / PI * y0_sum;
    let y1_regular = 2.0 / PI * log_half * j1 - half / PI * y1_sum;
    CylinderValues {
        j0,
        j1,
        y0,
        y1_regular,
    }
}

/// Hankel asymptotic series sum_k i^k a_k(nu) / z^k, truncated at the smallest term.
fn hankel_asymptotic_sum(nu: f64, z: f64) -> Complex64 {
    let mu = 4.0 * nu * nu;
    let mut sum = Complex64::new(1.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    let mut ipow = Complex64::new(1.0, 0.0);
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * z);
        ipow *= Complex64::new(0.0, 1.0);
        let mag = a.abs();
        if mag > last {
            break;
        }
        sum += ipow * a;
        last = mag;
        if mag < 1e-17 {
            break;
        }
    }
    sum
}

fn cylinder_asymptotic(z: f64) -> CylinderValues {
    let amp = (2.0 / (PI * z)).sqrt();
    let chi0 = z - FRAC_PI_4;
    let chi1 = z - FRAC_PI_2 - FRAC_PI_4;
    let h0 = amp * Complex64::from_polar(1.0, chi0) * hankel_asymptotic_sum(0.0, z);
    let h1 = amp * Complex64::from_polar(1.0, chi1) * hankel_asymptotic_sum(1.0, z);
    CylinderValues {
        j0: h0.re,
        j1: h1.re,
        y0: h0.im,
        y1_regular: h1.im + 2.0 / (PI * z),
    }
}

/// Hankel function of the first kind and order zero, `H0(z) = J0(z) + i Y0(z)`.
pub fn hankel0_first_kind(z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::NonpositiveArgument(z));
    }
    Ok(cylinder(z).h0())
}

/// Derivative `H0'(z) = -H1(z)`.
pub fn hankel0_first_kind_derivative(z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::NonpositiveArgument(z));
    }
    Ok(-cylinder(z).h1(z))
}

/// Hankel function of the first kind and order one.
pub fn hankel1_first_kind(z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::NonpositiveArgument(z));
    }
    Ok(cylinder(z).h1(z))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for complex argument (Lanczos approximation with reflection).
pub fn gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return PI / (s * gamma_complex(1.0 - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

/// Lower incomplete gamma function `gamma(t, c) = int_0^t e^{-x} x^{c-1} dx`.
///
/// Uses the power series for moderate `t` and the complement of the
/// Legendre continued fraction for the upper function when `t` is large.
pub fn lower_incomplete_gamma(t: f64, c: Complex64) -> Result<Complex64> {
    if !(c.re > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Re(c) must be positive, got {}",
            c.re
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let prefactor = (c * t.ln() - t).exp();
    if t < c.norm() + 30.0 {
        let mut term = 1.0 / c;
        let mut sum = term;
        for k in 1..2000 {
            term *= t / (c + k as f64);
            sum += term;
            if term.norm() < 1e-17 * sum.norm() {
                break;
            }
        }
        Ok(prefactor * sum)
    } else {
        // Modified Lentz evaluation of the upper-gamma continued fraction.
        let tiny = 1e-300;
        let mut b = Complex64::new(t + 1.0, 0.0) - c;
        let mut cc = Complex64::new(1.0 / tiny, 0.0);
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let fi = i as f64;
            let an = -fi * (fi - c);
            b += 2.0;
            d = an * d + b;
            if d.norm() < tiny {
                d = Complex64::new(tiny, 0.0);
            }
            cc = b + an / cc;
            if cc.norm() < tiny {
                cc = Complex64::new(tiny, 0.0);
            }
            d = 1.0 / d;
            let del = d * cc;
            h *= del;
            if (del - 1.0).norm() < 1e-16 {
                break;
            }
        }
        Ok(gamma_complex(c) - prefactor * h)
    }
}

/// Surface measure of the unit sphere `S^{m}` in `R^{m+1}` for `m` in {0, 1, 2}.
pub fn sphere_measure(m: usize) -> f64 {
    match m {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        _ => {
            let a = (m as f64 + 1.0) / 2.0;
            2.0 * PI.powf(a) / gamma_complex(Complex64::new(a, 0.0)).re
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_crossover() {
        for z in [11.0, 11.9, 12.0, 12.5, 14.0] {
            let s = cylinder_series(z);
            let a = cylinder_asymptotic(z);
            assert!((s.j0 - a.j0).abs() < 1e-10, "j0 at {z}");
            assert!((s.j1 - a.j1).abs() < 1e-10, "j1 at {z}");
            assert!((s.y0 - a.y0).abs() < 1e-10, "y0 at {z}");
            assert!((s.y1_regular - a.y1_regular).abs() < 1e-10, "y1 at {z}");
        }
    }

    #[test]
    fn gamma_complex_matches_known_values() {
        let g = gamma_complex(Complex64::new(0.5, 0.0));
        assert!((g.re - PI.sqrt()).abs() < 1e-13);
        let g = gamma_complex(Complex64::new(5.0, 0.0));
        assert!((g.re - 24.0).abs() < 1e-11);
    }
}
