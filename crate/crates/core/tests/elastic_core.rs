use elastic_scatter::elastic::{
    field_norms, helmholtz_split, holder_seminorm, make_medium, traction, FieldJet, LameMedium, RegularGrid,
    SampledVectorField,
};
use elastic_scatter::fd::FdOrder;
use elastic_scatter::geometry::{volume_mesh, DomainComponent, DomainGeometry};
use elastic_scatter::linalg::{cnorm, csub, CMat, CVec, Point, CZERO_VEC};
use elastic_scatter::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn jet(dim: usize, g: CMat) -> FieldJet {
    FieldJet {
        dim,
        point: [0.0; 3],
        value: CZERO_VEC,
        gradient: g,
    }
}

#[test]
fn wavenumbers_from_moduli() {
    let m = make_medium(2.0, 1.0, 2.0, 2).unwrap();
    assert!((m.kappa_p - 1.0).abs() < 1e-15);
    assert!((m.kappa_s - 2.0).abs() < 1e-15);
    let m = make_medium(0.0, 1.0, 1.0, 3).unwrap();
    assert!((m.kappa_p - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((m.kappa_s - 1.0).abs() < 1e-15);
}

#[test]
fn convexity_cone_and_frequency_are_enforced() {
    assert!(matches!(
        make_medium(-1.0, 1.0, 1.0, 2),
        Err(Error::StrongConvexityViolated { .. })
    ));
    assert!(matches!(
        make_medium(1.0, 0.0, 1.0, 2),
        Err(Error::StrongConvexityViolated { .. })
    ));
    assert!(matches!(make_medium(1.0, 1.0, 0.0, 2), Err(Error::InvalidFrequency(_))));
    assert!(matches!(make_medium(1.0, 1.0, 1.0, 4), Err(Error::UnsupportedDimension(4))));
}

#[test]
fn rigid_translation_has_zero_traction() {
    for dim in [2, 3] {
        let m = make_medium(1.5, 0.7, 1.0, dim).unwrap();
        let mut j = jet(dim, [[Complex64::new(0.0, 0.0); 3]; 3]);
        j.value = [c(1.0, 2.0), c(-3.0, 0.5), if dim == 3 { c(0.2, 0.0) } else { c(0.0, 0.0) }];
        let mut nu = [0.0; 3];
        nu[0] = 0.6;
        nu[1] = 0.8;
        let t = traction(&j, &nu, &m).unwrap();
        assert!(cnorm(&t) == 0.0);
    }
}

fn sample_gradient() -> CMat {
    let mut g = [[c(0.0, 0.0); 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = c(1.0 + i as f64 + 0.37 * j as f64, 0.5 * i as f64 - 0.2 * j as f64);
        }
    }
    g
}

#[test]
fn traction_point_formula_2d() {
    let (l, mu) = (2.0, 1.0);
    let m = make_medium(l, mu, 1.0, 2).unwrap();
    let mut g = sample_gradient();
    for row in g.iter_mut() {
        row[2] = c(0.0, 0.0);
    }
    g[2] = [c(0.0, 0.0); 3];
    let t = traction(&jet(2, g), &[0.0, -1.0, 0.0], &m).unwrap();
    let e0 = -(g[1][0] + g[0][1]) * mu;
    let e1 = -(g[0][0] * l + g[1][1] * (l + 2.0 * mu));
    assert!((t[0] - e0).norm() < 1e-14);
    assert!((t[1] - e1).norm() < 1e-14);
}

#[test]
fn traction_point_formula_3d() {
    let (l, mu) = (1.3, 0.8);
    let m = make_medium(l, mu, 1.0, 3).unwrap();
    let g = sample_gradient();
    let t = traction(&jet(3, g), &[0.0, 0.0, -1.0], &m).unwrap();
    let e = [
        -(g[0][2] + g[2][0]) * mu,
        -(g[1][2] + g[2][1]) * mu,
        -((g[0][0] + g[1][1]) * l + g[2][2] * (l + 2.0 * mu)),
    ];
    for i in 0..3 {
        assert!((t[i] - e[i]).norm() < 1e-14, "component {i}");
    }
}

#[test]
fn traction_rejects_bad_normals_and_dims() {
    let m = make_medium(1.0, 1.0, 1.0, 2).unwrap();
    let j = jet(2, sample_gradient());
    assert!(matches!(traction(&j, &[1.0, 1.0, 0.0], &m), Err(Error::NonUnitNormal(_))));
    let j3 = jet(3, sample_gradient());
    assert!(matches!(
        traction(&j3, &[1.0, 0.0, 0.0], &m),
        Err(Error::DimensionMismatch { .. })
    ));
}

fn plane(dir: Point, pol: Point, kappa: f64) -> impl Fn(&Point) -> CVec {
    move |x: &Point| {
        let ph = Complex64::new(0.0, kappa * (dir[0] * x[0] + dir[1] * x[1] + dir[2] * x[2])).exp();
        [ph * pol[0], ph * pol[1], ph * pol[2]]
    }
}

fn split_error(m: &LameMedium, ppw: f64, order: FdOrder, u: &dyn Fn(&Point) -> CVec, up: &dyn Fn(&Point) -> CVec) -> f64 {
    let h = m.shear_wavelength() / ppw;
    let grid = RegularGrid::centered(m.dim, [0.05, -0.02, 0.01], h, 2 * order.half_width() + 5);
    let field = grid.sample(u).unwrap();
    let (p, s) = helmholtz_split(&grid, &field, m, order).unwrap();
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..p.len() {
        let x = p.nodes[k];
        let exact_p = up(&x);
        let exact_s = csub(&u(&x), &exact_p);
        err = err.max(cnorm(&csub(&p.values[k], &exact_p))).max(cnorm(&csub(&s.values[k], &exact_s)));
        scale = scale.max(cnorm(&u(&x)));
    }
    err / scale
}

#[test]
fn plane_waves_split_into_their_own_type() {
    for dim in [2, 3] {
        let m = make_medium(2.0, 1.0, 3.0, dim).unwrap();
        let d: Point = if dim == 2 { [0.6, 0.8, 0.0] } else { [0.48, 0.64, 0.6] };
        let dp: Point = if dim == 2 { [-0.8, 0.6, 0.0] } else { [0.8, -0.6, 0.0] };
        let pw = plane(d, d, m.kappa_p);
        let zero = |_: &Point| CZERO_VEC;
        // second-order truncation: a small multiple of (kappa h)^2
        let kh = 2.0 * std::f64::consts::PI / 40.0;
        assert!(split_error(&m, 40.0, FdOrder::Second, &pw, &pw) < 0.5 * kh * kh);
        let sw = plane(d, dp, m.kappa_s);
        assert!(split_error(&m, 40.0, FdOrder::Second, &sw, &zero) < 0.5 * kh * kh);
    }
}

#[test]
fn superposed_wave_split_meets_tolerance_at_ten_ppw() {
    let m = make_medium(2.0, 1.0, 3.0, 2).unwrap();
    let dp: Point = [0.6, 0.8, 0.0];
    let ds: Point = [-0.28, 0.96, 0.0];
    let pw = plane(dp, dp, m.kappa_p);
    let sw = plane(ds, [-0.96, -0.28, 0.0], m.kappa_s);
    let u = |x: &Point| {
        let a = pw(x);
        let b = sw(x);
        [a[0] + b[0] * 0.7, a[1] + b[1] * 0.7, a[2] + b[2] * 0.7]
    };
    let err = split_error(&m, 10.0, FdOrder::Sixth, &u, &pw);
    assert!(err < 1e-3, "sixth-order split error {err}");
}

#[test]
fn second_order_split_converges_at_second_order() {
    let m = make_medium(2.0, 1.0, 3.0, 2).unwrap();
    let ds: Point = [-0.28, 0.96, 0.0];
    let sw = plane(ds, [-0.96, -0.28, 0.0], m.kappa_s);
    let zero = |_: &Point| CZERO_VEC;
    let e1 = split_error(&m, 20.0, FdOrder::Second, &sw, &zero);
    let e2 = split_error(&m, 40.0, FdOrder::Second, &sw, &zero);
    let slope = (e1 / e2).log2();
    assert!(slope >= 1.9, "slope {slope}");
}

#[test]
fn coarse_grid_is_rejected() {
    let m = make_medium(2.0, 1.0, 3.0, 2).unwrap();
    let grid = RegularGrid::centered(2, [0.0; 3], m.shear_wavelength() / 8.0, 7);
    let f = grid.sample(|_| CZERO_VEC).unwrap();
    assert!(matches!(
        helmholtz_split(&grid, &f, &m, FdOrder::Second),
        Err(Error::GridTooCoarse { .. })
    ));
}

fn line_field(n: usize, f: impl Fn(f64) -> f64) -> SampledVectorField {
    let nodes: Vec<Point> = (0..n).map(|i| [i as f64 / (n - 1) as f64, 0.0, 0.0]).collect();
    SampledVectorField::sample(2, nodes, |x| [c(f(x[0]), 0.0), c(0.0, 0.0), c(0.0, 0.0)], None).unwrap()
}

#[test]
fn holder_seminorm_examples() {
    let constant = line_field(50, |_| 3.0);
    assert_eq!(holder_seminorm(&constant, 0.5, 10_000, 1).unwrap(), 0.0);
    let abs = line_field(50, f64::abs);
    assert!((holder_seminorm(&abs, 1.0, 10_000, 1).unwrap() - 1.0).abs() < 1e-12);
    // exhaustive maximum of x + y over distinct grid pairs is 2 - 1/(n-1)
    for n in [21usize, 201] {
        let sq = line_field(n, |x| x * x);
        let v = holder_seminorm(&sq, 1.0, usize::MAX, 1).unwrap();
        let oracle = 2.0 - 1.0 / (n - 1) as f64;
        assert!((v - oracle).abs() < 1e-12, "n={n}: {v} vs {oracle}");
    }
    let single = SampledVectorField::new(2, vec![[0.0; 3]], vec![CZERO_VEC], None).unwrap();
    assert!(matches!(holder_seminorm(&single, 1.0, 10, 1), Err(Error::InsufficientSamples(1))));
    assert!(matches!(holder_seminorm(&abs, 1.5, 10, 1), Err(Error::InvalidExponent(_))));
}

#[test]
fn field_norms_examples() {
    let disk = DomainGeometry::single(DomainComponent::disk([0.0; 3], 1.0).unwrap());
    let mesh = volume_mesh(&disk, 0.05).unwrap();
    let zero = SampledVectorField::sample(2, mesh.nodes.clone(), |_| CZERO_VEC, Some(mesh.id.clone())).unwrap();
    assert_eq!(field_norms(&zero, &mesh).unwrap(), (0.0, 0.0));
    let one = SampledVectorField::sample(2, mesh.nodes.clone(), |_| [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], Some(mesh.id.clone())).unwrap();
    let (l2, linf) = field_norms(&one, &mesh).unwrap();
    assert!((l2 - std::f64::consts::PI.sqrt()).abs() < 1e-3 * l2);
    assert_eq!(linf, 1.0);
    let cst = SampledVectorField::sample(2, mesh.nodes.clone(), |_| [c(3.0, 4.0), c(0.0, 0.0), c(0.0, 0.0)], None).unwrap();
    assert!((field_norms(&cst, &mesh).unwrap().1 - 5.0).abs() < 1e-15);
    let short = SampledVectorField::new(2, vec![[0.0; 3]], vec![CZERO_VEC], None).unwrap();
    assert!(matches!(field_norms(&short, &mesh), Err(Error::MeshMismatch { .. })));
}

#[test]
fn sampled_fields_reject_non_finite_values() {
    let r = SampledVectorField::new(2, vec![[0.0; 3]], vec![[c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0)]], None);
    assert!(matches!(r, Err(Error::NonFiniteField)));
    let r = SampledVectorField::new(2, vec![[0.0; 3]; 2], vec![CZERO_VEC], None);
    assert!(matches!(r, Err(Error::MeshMismatch { .. })));
}

fn cmat_strategy() -> impl Strategy<Value = CMat> {
    prop::array::uniform9((-5.0f64..5.0, -5.0f64..5.0)).prop_map(|a| {
        let mut g = [[c(0.0, 0.0); 3]; 3];
        for (k, (re, im)) in a.iter().enumerate() {
            g[k / 3][k % 3] = c(*re, *im);
        }
        g
    })
}

proptest! {
    #[test]
    fn traction_is_linear_in_the_jet(
        g1 in cmat_strategy(),
        g2 in cmat_strategy(),
        a in (-3.0f64..3.0, -3.0f64..3.0),
        b in (-3.0f64..3.0, -3.0f64..3.0),
        theta in 0.0f64..std::f64::consts::TAU,
        phi in 0.0f64..std::f64::consts::PI,
    ) {
        let (a, b) = (c(a.0, a.1), c(b.0, b.1));
        for dim in [2usize, 3] {
            let m = make_medium(1.1, 0.9, 1.0, dim).unwrap();
            let nu: Point = if dim == 2 {
                [theta.cos(), theta.sin(), 0.0]
            } else {
                [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]
            };
            let mut mix = [[c(0.0, 0.0); 3]; 3];
            let (mut h1, mut h2) = (g1, g2);
            for i in 0..3 {
                for j in 0..3 {
                    if i >= dim || j >= dim {
                        h1[i][j] = c(0.0, 0.0);
                        h2[i][j] = c(0.0, 0.0);
                    }
                    mix[i][j] = h1[i][j] * a + h2[i][j] * b;
                }
            }
            let t = traction(&jet(dim, mix), &nu, &m).unwrap();
            let t1 = traction(&jet(dim, h1), &nu, &m).unwrap();
            let t2 = traction(&jet(dim, h2), &nu, &m).unwrap();
            for i in 0..dim {
                let e = t1[i] * a + t2[i] * b;
                prop_assert!((t[i] - e).norm() <= 1e-12 * (1.0 + e.norm()));
            }
        }
    }

    #[test]
    fn seminorm_never_decreases_with_more_pairs(
        seed in 0u64..1000,
        budget in 1usize..400,
        extra in 1usize..400,
        delta in 0.05f64..1.0,
    ) {
        let f = line_field(60, |x| (7.0 * x).sin() + x.abs().sqrt());
        let small = holder_seminorm(&f, delta, budget, seed).unwrap();
        let large = holder_seminorm(&f, delta, budget + extra, seed).unwrap();
        prop_assert!(large >= small);
    }

    #[test]
    fn shear_wavenumber_exceeds_pressure_wavenumber(
        mu in 0.01f64..100.0,
        t in 0.001f64..10.0,
        omega in 0.01f64..100.0,
        dim in 2usize..=3,
    ) {
        // lambda ranges over the open convexity cone n lambda + 2 mu > 0
        let lambda = -2.0 * mu / dim as f64 + t * mu;
        let m = make_medium(lambda, mu, omega, dim).unwrap();
        prop_assert!(m.kappa_p < m.kappa_s);
    }
}
