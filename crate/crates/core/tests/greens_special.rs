#![allow(clippy::excessive_precision)]
use elastic_scatter::elastic::make_medium;
use elastic_scatter::fd::{hessian, FdOrder};
use elastic_scatter::greens::{farfield_constants, farfield_kernels, helmholtz_fundamental, kupradze_tensor};
use elastic_scatter::linalg::{dot, CVec, Point, CZERO_VEC};
use elastic_scatter::special::{
    cylinder, gamma_complex, hankel0_first_kind, hankel0_first_kind_derivative, hankel1_first_kind,
    lower_incomplete_gamma,
};
use elastic_scatter::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

// (z, J0, Y0, J1, Y1) from 30-digit arbitrary-precision evaluation
const BESSEL_TABLE: [(f64, f64, f64, f64, f64); 7] = [
    (0.05, 0.99937509764946858, -1.9793110008172096, 0.024992188313759701, -12.78985517117497),
    (1.0, 0.76519768655796655, 0.088256964215676958, 0.44005058574493352, -0.78121282130028872),
    (3.7, -0.39923020337119112, 0.10607431532035411, 0.053833987745461791, 0.41667437268380749),
    (11.9, 0.025049441699589645, -0.22983321394337506, -0.22898324966192406, -0.03471149833403061),
    (12.1, 0.069666773606807312, -0.21843838055092549, -0.21574897337692481, -0.078736931451395746),
    (40.0, 0.0073668905842372896, 0.12593641705826093, 0.126038318037585, -0.0057935058215496329),
    (1000.0, 0.024786686152420175, 0.0047159179776228134, 0.0047283119070895239, -0.024784331292351779),
];

#[test]
fn bessel_values_match_reference_table() {
    for (z, j0, y0, j1, y1) in BESSEL_TABLE {
        let cv = cylinder(z);
        // absolute tolerance scaled by the envelope sqrt(2/(pi z)) near zeros
        let env = (2.0 / (PI * z)).sqrt().min(1.0);
        assert!((cv.j0 - j0).abs() < 1e-10 * env, "J0({z})");
        assert!((cv.y0 - y0).abs() < 1e-10 * env.max(y0.abs()), "Y0({z})");
        assert!((cv.j1 - j1).abs() < 1e-10 * env, "J1({z})");
        assert!((cv.y1(z) - y1).abs() < 1e-10 * env.max(y1.abs()), "Y1({z})");
        let h0 = hankel0_first_kind(z).unwrap();
        assert_eq!(h0, c(cv.j0, cv.y0));
        let h1 = hankel1_first_kind(z).unwrap();
        assert_eq!(hankel0_first_kind_derivative(z).unwrap(), -h1);
    }
    let h = hankel0_first_kind(1.0).unwrap();
    assert!(rel(h.re, 0.7651976866) < 1e-10 && rel(h.im, 0.0882569642) < 1e-9);
}

#[test]
fn bessel_wronskian() {
    for z in [0.5, 1.0, 5.0, 20.0] {
        let cv = cylinder(z);
        // J0 Y0' - J0' Y0 with Y0' = -Y1, J0' = -J1
        let w = -cv.j0 * cv.y1(z) + cv.j1 * cv.y0;
        assert!((w - 2.0 / (PI * z)).abs() < 1e-10, "z={z}");
    }
}

#[test]
fn hankel_modulus_asymptote() {
    let z = 1000.0;
    let m = hankel0_first_kind(z).unwrap().norm() * z.sqrt();
    assert!((m - (2.0 / PI).sqrt()).abs() < 1e-6);
    assert!(matches!(hankel0_first_kind(0.0), Err(Error::NonpositiveArgument(_))));
    assert!(matches!(hankel1_first_kind(-1.0), Err(Error::NonpositiveArgument(_))));
}

#[test]
fn incomplete_gamma_examples() {
    for t in [0.1f64, 1.0, 10.0] {
        let v = lower_incomplete_gamma(t, c(1.0, 0.0)).unwrap();
        assert!((v - c(1.0 - (-t).exp(), 0.0)).norm() < 1e-14);
    }
    let v = lower_incomplete_gamma(50.0, c(1.5, 0.0)).unwrap();
    assert!((v.re - PI.sqrt() / 2.0).abs() < 1e-10 && v.im.abs() < 1e-12);
    // reference values from 30-digit arbitrary-precision evaluation
    let table = [
        (2.0, c(2.5, 0.0), c(0.59897957413602228, 0.0)),
        (3.0, c(1.5, 2.0), c(0.24837924944048871, 0.11575075958679278)),
        (40.0, c(0.7, 0.3), c(1.085815126667921, -0.38366157420826276)),
        (0.3, c(0.2, -1.1), c(-0.57424532882586305, 0.17632018374083903)),
        (60.0, c(3.0, 5.0), c(0.059470074633256925, 0.0057509791877971158)),
    ];
    for (t, a, want) in table {
        let got = lower_incomplete_gamma(t, a).unwrap();
        assert!((got - want).norm() < 1e-10 * want.norm(), "t={t} c={a}: {got}");
    }
    assert!(matches!(lower_incomplete_gamma(1.0, c(0.0, 1.0)), Err(Error::InvalidParameter(_))));
    assert_eq!(lower_incomplete_gamma(0.0, c(2.0, 0.0)).unwrap(), c(0.0, 0.0));
}

#[test]
fn incomplete_gamma_matches_simpson_quadrature() {
    // composite Simpson on int_0^2 e^{-x} x^{3/2} dx, smooth enough for 1e-10
    let n = 20_000;
    let h = 2.0 / n as f64;
    let f = |x: f64| (-x).exp() * x.powf(1.5);
    let mut s = f(0.0) + f(2.0);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = s * h / 3.0;
    let got = lower_incomplete_gamma(2.0, c(2.5, 0.0)).unwrap();
    assert!((got.re - oracle).abs() < 1e-10);
}

#[test]
fn gamma_function_spot_values() {
    assert!((gamma_complex(c(5.0, 0.0)) - c(24.0, 0.0)).norm() < 1e-12);
    assert!((gamma_complex(c(0.5, 0.0)).re - PI.sqrt()).abs() < 1e-13);
    // reflection branch: Gamma(-1/2) = -2 sqrt(pi)
    assert!((gamma_complex(c(-0.5, 0.0)).re + 2.0 * PI.sqrt()).abs() < 1e-12);
}

#[test]
fn helmholtz_fundamental_values() {
    let v = helmholtz_fundamental(1.0, &[1.0, 0.0, 0.0], &[0.0; 3], 3).unwrap();
    assert!((v - c(0.0429958913714318, 0.0669621333502909)).norm() < 1e-15);
    // leading Hankel asymptote carries a relative correction 1/(8 kappa r)
    let k = 2.0;
    for (r, with_correction, tol) in [(100.0, true, 1e-5), (1000.0, false, 1e-4)] {
        let v = helmholtz_fundamental(k, &[r, 0.0, 0.0], &[0.0; 3], 2).unwrap();
        let z = k * r;
        let mut asym = c(0.0, 0.25) * (2.0 / (PI * z)).sqrt() * Complex64::from_polar(1.0, z - PI / 4.0);
        if with_correction {
            asym *= c(1.0, -1.0 / (8.0 * z));
        }
        assert!((v - asym).norm() < tol * asym.norm(), "kappa r = {z}");
    }
    assert!(matches!(
        helmholtz_fundamental(1.0, &[0.0; 3], &[0.0; 3], 2),
        Err(Error::CoincidentPoints)
    ));
}

#[test]
fn helmholtz_fundamental_solves_the_equation_away_from_the_source() {
    for dim in [2, 3] {
        let k = 3.0;
        let f = |x: &Point| -> CVec {
            let mut v = CZERO_VEC;
            v[0] = helmholtz_fundamental(k, x, &[0.0; 3], dim).unwrap();
            v
        };
        for x in [[0.7, 0.4, 0.2], [1.5, -0.3, 0.9]] {
            let x = if dim == 2 { [x[0], x[1], 0.0] } else { x };
            let hs = hessian(&f, &x, 0.01, dim, FdOrder::Sixth);
            let lap: Complex64 = (0..dim).map(|j| hs[j][j][0]).sum();
            let u = f(&x)[0];
            let res = (lap + u * (k * k)).norm() / (k * k * u.norm());
            assert!(res < 1e-6, "dim {dim}: {res}");
        }
    }
}

#[test]
fn kupradze_tensor_is_reciprocal() {
    let mut rng_state = 12345u64;
    let mut next = || {
        rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
    };
    for dim in [2, 3] {
        let m = make_medium(1.7, 0.6, 2.3, dim).unwrap();
        for _ in 0..50 {
            let mut x = [next(), next(), next()];
            let mut y = [next(), next(), next()];
            if dim == 2 {
                x[2] = 0.0;
                y[2] = 0.0;
            }
            let a = kupradze_tensor(&x, &y, &m).unwrap().matrix;
            let b = kupradze_tensor(&y, &x, &m).unwrap().matrix;
            for i in 0..dim {
                for j in 0..dim {
                    assert!((a[i][j] - b[j][i]).norm() < 1e-12 * (1.0 + a[i][j].norm()));
                }
            }
        }
    }
}

#[test]
fn kupradze_columns_solve_the_lame_system() {
    for dim in [2, 3] {
        let m = make_medium(2.0, 1.0, 3.0, dim).unwrap();
        // sixth-order stencil at 32 points per shear wavelength
        let h = m.shear_wavelength() / 32.0;
        for col in 0..dim {
            let f = |x: &Point| -> CVec {
                let g = kupradze_tensor(x, &[0.0; 3], &m).unwrap().matrix;
                [g[0][col], g[1][col], g[2][col]]
            };
            for x in [[1.1, 0.6, 0.3], [-0.8, 1.9, -0.5]] {
                let mut x = x;
                if dim == 2 {
                    x[2] = 0.0;
                }
                let r = m.residual_fd(&f, &x, h, FdOrder::Sixth);
                let u = f(&x);
                let scale = m.omega * m.omega * u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let res = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / scale;
                assert!(res < 1e-5, "dim {dim} col {col}: {res}");
            }
        }
    }
}

#[test]
fn kupradze_decay_rate_in_the_plane() {
    let m = make_medium(2.0, 1.0, 3.0, 2).unwrap();
    // transverse entry: the projector term drops out and the shear part dominates
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    let n = 200;
    for i in 0..n {
        let r = 10f64.powf(1.0 + 2.0 * i as f64 / (n - 1) as f64);
        let g = kupradze_tensor(&[0.0, r, 0.0], &[0.0; 3], &m).unwrap().matrix[0][0].norm();
        let (lx, ly) = (r.ln(), g.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let nf = n as f64;
    let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
    assert!((slope + 0.5).abs() < 0.025, "slope {slope}");
}

#[test]
fn shear_kernel_is_tangential() {
    for dim in [2, 3] {
        let m = make_medium(1.0, 1.0, 2.0, dim).unwrap();
        for k in 0..16 {
            let t = 2.0 * PI * k as f64 / 16.0;
            let xhat: Point = if dim == 2 { [t.cos(), t.sin(), 0.0] } else { [0.6 * t.cos(), 0.6 * t.sin(), 0.8] };
            let (_, s) = farfield_kernels(&xhat, &[0.3, -0.1, 0.2], &m).unwrap();
            let v = [c(1.0, 0.5), c(-2.0, 0.1), c(0.7, -0.4)];
            let mut w = CZERO_VEC;
            for i in 0..dim {
                for j in 0..dim {
                    w[i] += s[i][j] * v[j];
                }
            }
            let d: Complex64 = (0..dim).map(|i| w[i] * xhat[i]).sum();
            assert!(d.norm() < 1e-14);
        }
    }
}

#[test]
fn farfield_constants_match_large_radius_stripping() {
    for dim in [2, 3] {
        let m = make_medium(2.0, 1.0, 3.0, dim).unwrap();
        // the 3D pressure part has a relative correction 2/(kappa_p r), so it needs a larger radius
        let big_r = if dim == 2 { 200.0 } else { 1000.0 } * m.shear_wavelength();
        let xhat: Point = if dim == 2 { [0.6, 0.8, 0.0] } else { [0.48, 0.64, 0.6] };
        let x = [xhat[0] * big_r, xhat[1] * big_r, xhat[2] * big_r];
        let g = kupradze_tensor(&x, &[0.0; 3], &m).unwrap().matrix;
        let cst = farfield_constants(&m);
        let amp = big_r.powf((dim as f64 - 1.0) / 2.0);
        let strip_p = Complex64::from_polar(amp, -m.kappa_p * big_r);
        let strip_s = Complex64::from_polar(amp, -m.kappa_s * big_r);
        // x̂ᵀ G x̂ isolates the pressure part, a tangent t gives tᵀ G t for shear
        let t: Point = if dim == 2 { [-0.8, 0.6, 0.0] } else { [0.8, -0.6, 0.0] };
        let quad = |a: &Point, b: &Point| -> Complex64 {
            let mut s = c(0.0, 0.0);
            for i in 0..dim {
                for j in 0..dim {
                    s += g[i][j] * a[i] * b[j];
                }
            }
            s
        };
        let p = quad(&xhat, &xhat) * strip_p;
        let s = quad(&t, &t) * strip_s;
        assert!((p - cst.c_p).norm() < 1e-3 * cst.c_p.norm(), "dim {dim} pressure {p} vs {}", cst.c_p);
        assert!((s - cst.c_s).norm() < 1e-3 * cst.c_s.norm(), "dim {dim} shear {s} vs {}", cst.c_s);
    }
}

#[test]
fn farfield_kernels_reject_non_unit_direction() {
    let m = make_medium(1.0, 1.0, 1.0, 2).unwrap();
    assert!(matches!(
        farfield_kernels(&[1.0, 1.0, 0.0], &[0.0; 3], &m),
        Err(Error::InvalidDirection(_))
    ));
}

proptest! {
    #[test]
    fn kernels_translate_by_a_phase(
        theta in 0.0f64..std::f64::consts::TAU,
        tx in -2.0f64..2.0,
        ty in -2.0f64..2.0,
        yx in -1.0f64..1.0,
        yy in -1.0f64..1.0,
    ) {
        let m = make_medium(2.0, 1.0, 3.0, 2).unwrap();
        let xhat = [theta.cos(), theta.sin(), 0.0];
        let y = [yx, yy, 0.0];
        let t = [tx, ty, 0.0];
        let yt = [yx + tx, yy + ty, 0.0];
        let (p0, s0) = farfield_kernels(&xhat, &y, &m).unwrap();
        let (p1, s1) = farfield_kernels(&xhat, &yt, &m).unwrap();
        let ph_p = Complex64::from_polar(1.0, -m.kappa_p * dot(&xhat, &t));
        let ph_s = Complex64::from_polar(1.0, -m.kappa_s * dot(&xhat, &t));
        prop_assert!((p1 - p0 * ph_p).norm() < 1e-14);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((s1[i][j] - s0[i][j] * ph_s).norm() < 1e-14);
            }
        }
    }
}
