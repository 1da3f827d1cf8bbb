use elastic_scatter::bounds::{calibrate_constant, count_violations};
use elastic_scatter::cgo::{
    apex_probe, c1beta_proxy, cgo_residual, cgo_residual_with, graph_bump, identity_meshes, integral_identity_check,
    make_cgo, paraboloid_integral_closed, select_tau, shell_integral, tail_and_holder_bounds, traction_point_solve,
    zeta_choice, CgoProbe,
};
use elastic_scatter::elastic::{make_medium, RegularGrid};
use elastic_scatter::fd::{gradient, FdOrder};
use elastic_scatter::geometry::make_cap_domain;
use elastic_scatter::jet::Jet2;
use elastic_scatter::linalg::{CVec, Point};
use elastic_scatter::montecarlo::paraboloid_mc;
use elastic_scatter::source::Bump;
use elastic_scatter::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Composite Simpson rule on [a, b] with `n` (even) intervals.
fn simpson<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, n: usize) -> Complex64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * (h / 3.0)
}

#[test]
fn planar_probe_example() {
    let m = make_medium(1.0, 0.25, 1.0, 2).unwrap();
    assert!((m.kappa_s - 2.0).abs() < 1e-15);
    let p = make_cgo(&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], 4.0, &m).unwrap();
    assert!((p.xi[0] - c(0.0, 20f64.sqrt())).norm() < 1e-15);
    assert!((p.xi[1] - c(-4.0, 0.0)).norm() < 1e-15);
    assert!((p.eta[0] - c(1.0, 0.0)).norm() < 1e-15);
    assert!((p.eta[1] - c(0.0, 1.25f64.sqrt())).norm() < 1e-15);
    assert!((p.xi_dot_xi() + 4.0).norm() < 1e-14);
    assert!(p.xi_dot_eta().norm() < 1e-14);
    assert_eq!(apex_probe(4.0, 0.0, &m).unwrap(), p);
}

#[test]
fn probe_preconditions() {
    let m = make_medium(1.0, 0.25, 1.0, 2).unwrap();
    assert!(matches!(
        make_cgo(&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], 2.0, &m),
        Err(Error::TauTooSmall { .. })
    ));
    assert!(matches!(
        make_cgo(&[0.0, -1.0, 0.0], &[0.6, 0.8, 0.0], 5.0, &m),
        Err(Error::NonOrthonormalPair)
    ));
}

#[test]
fn spatial_apex_probe() {
    let m = make_medium(0.0, 1.0, 1.0, 3).unwrap();
    let phi = 0.7f64;
    let p = apex_probe(5.0, phi, &m).unwrap();
    assert_eq!(p.d, [0.0, 0.0, -1.0]);
    assert_eq!(p.d_perp, [phi.sin(), phi.cos(), 0.0]);
    let s = 26f64.sqrt();
    assert!((p.xi[0] - c(0.0, s * phi.sin())).norm() < 1e-14);
    assert!((p.xi[2] - c(-5.0, 0.0)).norm() < 1e-14);
    assert!((p.eta[2] - c(0.0, (1.0 + 1.0 / 25.0f64).sqrt())).norm() < 1e-14);
}

fn residual_at(p: &CgoProbe, m: &elastic_scatter::elastic::LameMedium, ppw: f64, order: FdOrder) -> f64 {
    let period = 2.0 * PI / (p.kappa_s.powi(2) + p.tau.powi(2)).sqrt();
    let grid = RegularGrid::centered(p.dim, [0.1, -0.05, 0.02], period / ppw, 2 * order.half_width() + 3);
    cgo_residual_with(p, m, &grid, order).unwrap()
}

#[test]
fn probe_solves_the_lame_system() {
    for dim in [2, 3] {
        let m = make_medium(2.0, 1.0, 2.0, dim).unwrap();
        let p = apex_probe(6.0, 0.4, &m).unwrap();
        // second-order truncation is about 0.12 (12/ppw)^2 relative, so 1e-6 needs thousands of ppw
        let fine = residual_at(&p, &m, 6144.0, FdOrder::Second);
        assert!(fine < 1e-6, "dim {dim}: {fine}");
        assert!(residual_at(&p, &m, 48.0, FdOrder::Sixth) < 1e-6);
        let (a, b) = (residual_at(&p, &m, 24.0, FdOrder::Second), residual_at(&p, &m, 48.0, FdOrder::Second));
        let slope = (a / b).log2();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
        let mut bad = p;
        bad.eta = [c(0.0, 0.0); 3];
        for i in 0..dim {
            bad.eta[i] = c(p.d[i], 0.0) + c(0.0, -1.0) * p.d[i];
        }
        assert!(residual_at(&bad, &m, 48.0, FdOrder::Second) > 0.1);
        let coarse = RegularGrid::centered(dim, [0.0; 3], 1.0, 5);
        assert!(matches!(cgo_residual(&p, &m, &coarse), Err(Error::GridTooCoarse { .. })));
    }
}

#[test]
fn closed_paraboloid_integral_examples() {
    let v = paraboloid_integral_closed(&[c(0.0, 0.0), c(-4.0, 0.0), c(0.0, 0.0)], 1.0, 2).unwrap();
    assert!((v - c(PI.sqrt() / 8.0, 0.0)).norm() < 1e-15);
    assert!((v.re - 0.221557).abs() < 1e-6);
    let tau = 7.0;
    let k = 3.0;
    let v = paraboloid_integral_closed(&[c(0.0, 0.0), c(0.0, 0.0), c(-tau, 0.0)], k, 3).unwrap();
    // cylindrical reduction: int_0^inf e^{-tau t} (pi t / K) dt
    let radial = simpson(|t| c((-tau * t).exp() * PI * t / k, 0.0), 0.0, 12.0, 20_000);
    assert!((v.re - PI / (tau * tau * k)).abs() < 1e-15);
    assert!((v - radial).norm() < 1e-10);
    assert!(matches!(
        paraboloid_integral_closed(&[c(0.0, 0.0), c(0.1, 0.0), c(0.0, 0.0)], 1.0, 2),
        Err(Error::NonDecaying(_))
    ));
}

#[test]
fn closed_integral_matches_one_dimensional_reduction() {
    // int e^{xi1 x1} (-e^{xi2 K x1^2} / xi2) dx1 over a truncated line
    let m = make_medium(1.0, 0.25, 1.0, 2).unwrap();
    let p = apex_probe(8.0, 0.0, &m).unwrap();
    let k = 4.0;
    let (x1, x2) = (p.xi[0], p.xi[1]);
    let line = simpson(|t| (x1 * t + x2 * k * t * t).exp() * (-1.0 / x2), -2.0, 2.0, 40_000);
    let closed = paraboloid_integral_closed(&p.xi, k, 2).unwrap();
    assert!((closed - line).norm() < 1e-10 * closed.norm());
}

#[test]
fn closed_integral_matches_monte_carlo() {
    let m = make_medium(1.0, 0.25, 1.0, 2).unwrap();
    let p = apex_probe(8.0, 0.0, &m).unwrap();
    let closed = paraboloid_integral_closed(&p.xi, 4.0, 2).unwrap();
    let est = paraboloid_mc(&p.xi, 4.0, 2, 312_500, 32, 11).unwrap();
    assert_eq!(est.samples, 10_000_000);
    let (rel, z) = est.compare(closed);
    assert!(rel < 0.02 && z < 4.0, "rel {rel} z {z}");
}

#[test]
fn shell_integral_examples() {
    assert_eq!(shell_integral(2.0, 2.0, 10.0, 1.0, 2).unwrap(), 0.0);
    // substitution x_n = t^2 turns the sqrt-width integrand into a smooth one
    let (km, kp, tau, b) = (1.0f64, 4.0f64, 10.0f64, 1.0f64);
    let w = 2.0 * (km.powf(-0.5) - kp.powf(-0.5));
    let oracle = simpson(|t| c((-tau * t * t).exp() * w * t * 2.0 * t, 0.0), 0.0, b.sqrt(), 20_000).re;
    let got = shell_integral(km, kp, tau, b, 2).unwrap();
    assert!((got - oracle).abs() < 1e-6 * oracle, "{got} vs {oracle}");
    let oracle3 = simpson(|t| c((-tau * t).exp() * PI * t * (1.0 / km - 1.0 / kp), 0.0), 0.0, b, 20_000).re;
    assert!((shell_integral(km, kp, tau, b, 3).unwrap() - oracle3).abs() < 1e-6 * oracle3);
    // saturation: gamma(50, 3/2) equals Gamma(3/2) to far below 1e-8
    let sat = shell_integral(km, kp, 10.0, 5.0, 2).unwrap();
    let full = w * 10f64.powf(-1.5) * PI.sqrt() / 2.0;
    assert!((sat - full).abs() < 1e-8 * full);
    assert!(matches!(shell_integral(3.0, 2.0, 1.0, 1.0, 2), Err(Error::InvalidCurvatures { .. })));
}

/// `int_{x_n > b} e^{-tau x_n} |cross-section at x_n| dx_n` by Simpson after `x_n = b + s^2`.
fn tail_oracle(tau: f64, b: f64, k: f64, dim: usize) -> f64 {
    let width = |t: f64| if dim == 2 { 2.0 * (t / k).sqrt() } else { PI * t / k };
    let top = (40.0 / tau).sqrt();
    simpson(|s| c((-tau * (b + s * s)).exp() * width(b + s * s) * 2.0 * s, 0.0), 0.0, top, 4000).re
}

#[test]
fn tail_bound_holds_with_a_fitted_constant() {
    for dim in [2, 3] {
        let mut cal = Vec::new();
        for &tau in &[5.0, 20.0, 80.0, 320.0] {
            for &b in &[0.01, 0.05, 0.2] {
                for &k in &[3.0, 10.0, 100.0] {
                    let (tail, _) = tail_and_holder_bounds(tau, b, k, 0.5, dim).unwrap();
                    cal.push((tail_oracle(tau, b, k, dim), tail));
                }
            }
        }
        let fit = calibrate_constant(&cal).unwrap();
        assert_eq!(fit.violations, 0);
        let mut hold = Vec::new();
        for &tau in &[7.0, 40.0, 150.0] {
            for &b in &[0.02, 0.1] {
                for &k in &[5.0, 50.0] {
                    let (tail, _) = tail_and_holder_bounds(tau, b, k, 0.5, dim).unwrap();
                    hold.push((tail_oracle(tau, b, k, dim), tail));
                }
            }
        }
        assert_eq!(count_violations(fit.constant_fit, &hold), 0, "dim {dim} C {}", fit.constant_fit);
    }
}

#[test]
fn holder_bound_exponent_collapse_and_k_scaling() {
    for dim in [2usize, 3] {
        let (b, k) = (0.3, 12.0);
        let (_, h0) = tail_and_holder_bounds(5.0, b, k, 0.0, dim).unwrap();
        let n = dim as f64;
        let want = b.powf((n + 1.0) / 2.0) * k.powf(-(n - 1.0) / 2.0);
        assert!((h0 - want).abs() < 1e-15 * want);
        let scaled = |k: f64| tail_and_holder_bounds(5.0, b, k, 0.3, dim).unwrap().0 * k.powf((n - 1.0) / 2.0);
        assert!((scaled(12.0) - scaled(24.0)).abs() < 1e-14 * scaled(12.0));
    }
}

#[test]
fn tau_selection() {
    assert!((select_tau(100.0, 0.25).unwrap() - 460.517_018_598_809_1).abs() < 1e-9);
    let e = std::f64::consts::E;
    assert!((select_tau(e, 0.3).unwrap() - 4.0 * e * 0.3).abs() < 1e-14);
    assert!(matches!(select_tau(2.0, 0.3), Err(Error::KTooSmall(_))));
    assert_eq!(zeta_choice(0.5, 1.0, 2).unwrap(), 0.25);
    assert!((zeta_choice(0.5, 0.4, 3).unwrap() - (0.2 + 1.0 / 6.0)).abs() < 1e-15);
}

#[test]
fn traction_systems_at_the_apex() {
    let m = make_medium(2.0, 1.0, 1.0, 2).unwrap();
    let v = traction_point_solve(true, &m, 2).unwrap();
    // outward normal -e2: rows -(mu d2u1, (lambda + 2 mu) d2u2)
    assert_eq!(v.matrix, vec![vec![-1.0, 0.0], vec![0.0, -4.0]]);
    assert_eq!(v.determinant, 4.0);
    assert!(v.gradient_vanishes);
    let m3 = make_medium(0.0, 1.0, 1.0, 3).unwrap();
    let v3 = traction_point_solve(true, &m3, 3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                assert_eq!(v3.matrix[i][j], 0.0);
            }
        }
    }
    let diag: Vec<f64> = (0..3).map(|i| v3.matrix[i][i].abs()).collect();
    assert_eq!(diag, vec![1.0, 1.0, 2.0]);
    assert_eq!(v3.determinant, -2.0);
    assert!(matches!(traction_point_solve(true, &m, 3), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn manufactured_bump_gradient_vanishes_at_the_apex() {
    for dim in [2, 3] {
        let cap = make_cap_domain(10.0, 1.0, 4.0, 0.5, Some(5.0), dim).unwrap();
        let bump = graph_bump(&cap, [1.0, -0.5, 0.3]).unwrap();
        let u = |x: &Point| -> CVec {
            let j = (bump.jets)(x);
            [c(j[0].v, 0.0), c(j[1].v, 0.0), c(j[2].v, 0.0)]
        };
        let g = gradient(&u, &[0.0; 3], 1e-5, dim, FdOrder::Second);
        let worst = g.iter().flat_map(|r| r.iter()).map(|z| z.norm()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "dim {dim}: {worst}");
    }
}

#[test]
fn identity_with_zero_field_is_trivial() {
    let m = make_medium(2.0, 1.0, 1.0, 2).unwrap();
    let cap = make_cap_domain(10.0, 1.0, 1.0, 0.5, None, 2).unwrap();
    let zero = Bump::new(Arc::new(|_: &Point| [Jet2::constant(0.0); 3]));
    let meshes = identity_meshes(&cap, 4).unwrap();
    let p = apex_probe(40.0, 0.0, &m).unwrap();
    let r = integral_identity_check(&cap, &zero, &p, &m, &meshes).unwrap();
    for t in [r.lhs, r.i1, r.i2, r.i3, r.i4] {
        assert_eq!(t, c(0.0, 0.0));
    }
    assert_eq!(r.residual, 0.0);
}

#[test]
fn identity_holds_for_a_graph_bump() {
    for dim in [2, 3] {
        let m = make_medium(2.0, 1.0, 1.0, dim).unwrap();
        let cap = make_cap_domain(10.0, 1.0, 4.0, 0.5, Some(5.0), dim).unwrap();
        let bump = graph_bump(&cap, [1.0, 0.5, -0.25]).unwrap();
        let p = apex_probe(40.0, 0.3, &m).unwrap();
        let coarse = integral_identity_check(&cap, &bump, &p, &m, &identity_meshes(&cap, 4).unwrap()).unwrap();
        let fine = integral_identity_check(&cap, &bump, &p, &m, &identity_meshes(&cap, 8).unwrap()).unwrap();
        assert!(fine.relative_residual < 1e-3, "dim {dim}: {}", fine.relative_residual);
        assert!(fine.residual <= 0.5 * coarse.residual.max(1e-300) || fine.relative_residual < 1e-12);
        assert!(fine.lid_nodes > 0 && fine.volume_nodes > coarse.volume_nodes);
    }
}

#[test]
fn identity_rejects_bumps_that_do_not_vanish_on_the_graph() {
    let m = make_medium(2.0, 1.0, 1.0, 2).unwrap();
    let cap = make_cap_domain(10.0, 1.0, 1.0, 0.5, None, 2).unwrap();
    let bad = Bump::new(Arc::new(|x: &Point| [Jet2::constant(1.0 + x[0]), Jet2::constant(0.0), Jet2::constant(0.0)]));
    let p = apex_probe(40.0, 0.0, &m).unwrap();
    assert!(matches!(
        integral_identity_check(&cap, &bad, &p, &m, &identity_meshes(&cap, 4).unwrap()),
        Err(Error::BoundaryConditionViolated(_))
    ));
}

#[test]
fn c1beta_proxy_of_a_linear_field() {
    // u = (x1, 0): |u| up to 1, |grad u| = 1 and a constant gradient has zero Hölder quotient
    let bump = Bump::new(Arc::new(|x: &Point| {
        let c = Jet2::coordinates(x);
        [c[0], Jet2::constant(0.0), Jet2::constant(0.0)]
    }));
    let nodes: Vec<Point> = (0..11).map(|i| [i as f64 / 10.0, 0.3, 0.0]).collect();
    let v = c1beta_proxy(&bump, &nodes, 2, 0.5, 1000, 1).unwrap();
    assert!((v - 2.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn probe_identities_hold_to_rounding(
        theta in 0.0f64..std::f64::consts::TAU,
        phi in 0.0f64..std::f64::consts::PI,
        psi in 0.0f64..std::f64::consts::TAU,
        log_ratio in 0.0f64..3.0,
        dim in 2usize..=3,
    ) {
        let m = make_medium(1.3, 0.7, 2.0, dim).unwrap();
        let tau = m.kappa_s * 10f64.powf(log_ratio).max(1.0 + 1e-9);
        let (d, dp): (Point, Point) = if dim == 2 {
            ([theta.cos(), theta.sin(), 0.0], [-theta.sin(), theta.cos(), 0.0])
        } else {
            let d = [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()];
            let e1 = [phi.cos() * theta.cos(), phi.cos() * theta.sin(), -phi.sin()];
            let e2 = [-theta.sin(), theta.cos(), 0.0];
            (d, [psi.cos() * e1[0] + psi.sin() * e2[0], psi.cos() * e1[1] + psi.sin() * e2[1], psi.cos() * e1[2] + psi.sin() * e2[2]])
        };
        let p = make_cgo(&d, &dp, tau, &m).unwrap();
        let scale = 2.0 * tau * tau + m.kappa_s * m.kappa_s;
        prop_assert!((p.xi_dot_xi() + m.kappa_s * m.kappa_s).norm() / scale <= 64.0 * f64::EPSILON);
        prop_assert!(p.xi_dot_eta().norm() / scale.sqrt() <= 64.0 * f64::EPSILON);
    }

    #[test]
    fn paraboloid_integral_rescales_under_dilation(
        s in 0.2f64..5.0,
        tau in 3.0f64..30.0,
        k in 1.0f64..50.0,
        a in -3.0f64..3.0,
        dim in 2usize..=3,
    ) {
        let n = dim;
        let mut xi: CVec = [c(0.0, a), c(0.5 * a, 0.0), c(0.0, 0.0)];
        xi[n - 1] = c(-tau, 0.3 * a);
        let base = paraboloid_integral_closed(&xi, k, n).unwrap();
        let sxi = [xi[0] * s, xi[1] * s, xi[2] * s];
        let scaled = paraboloid_integral_closed(&sxi, s * k, n).unwrap();
        let want = base * s.powi(-(n as i32));
        prop_assert!((scaled - want).norm() <= 1e-12 * want.norm());
    }

    #[test]
    fn select_tau_is_increasing(k in 2.72f64..1e4, dk in 1e-3f64..100.0, z in 0.01f64..2.0, dz in 1e-3f64..1.0) {
        let t = select_tau(k, z).unwrap();
        prop_assert!(select_tau(k + dk, z).unwrap() > t);
        prop_assert!(select_tau(k, z + dz).unwrap() > t);
    }
}
