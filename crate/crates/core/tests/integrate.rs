use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use superint::clifford::MixedClifford;
use superint::distrib::DistributionExpansion;
use superint::error::Error;
use superint::expr::Expr;
use superint::grassmann::{Grassmann, SuperContext};
use superint::integrate::*;
use superint::special::{Kind, Shape};
use superint::superfun::{abs_x, parse_superfunction, to_poly_sf, x_square};

fn ctx(m: usize, n: usize) -> SuperContext {
    SuperContext::new(m, n).unwrap()
}

fn sf(text: &str, c: SuperContext) -> superint::superfun::SuperFunction {
    parse_superfunction(text, c).unwrap()
}

fn unit_box(m: usize, r: f64) -> Options {
    let b = 1.25 * r + 0.05;
    Options::default().with_box(vec![(-b, b); m])
}

#[test]
fn superball_volume_m3_n1_is_two() {
    let c = ctx(3, 1);
    let v = domain_integral(&sf("-(X2) - 1", c), &Grassmann::one(c), &[], &Options::default()).unwrap();
    assert!((v.value - 2.0).abs() < 1e-12, "{}", v.value);
    assert_eq!(v.backend, "radial");
}

#[test]
fn paraboloid_and_hyperboloid_special_values() {
    let opts = Options::default();
    // at M = 1 the paraboloid area is 1 for every height
    let a = shape_integral(Shape::Paraboloid, Kind::Area, ctx(3, 1), 2.0, &opts).unwrap();
    assert!((a.value - 1.0).abs() < 1e-8, "{}", a.value);
    // hyperboloid area vanishes at M = 1
    let a = shape_integral(Shape::Hyperboloid, Kind::Area, ctx(3, 1), 1.0, &opts).unwrap();
    assert!(a.value.abs() < 1e-10, "{}", a.value);
    let v = shape_integral(Shape::Paraboloid, Kind::Volume, ctx(3, 0), 1.0, &opts).unwrap();
    assert!((v.value - PI / 2.0).abs() < 1e-8);
}

#[test]
fn classical_surface_area_of_paraboloid_via_axis() {
    let c = ctx(3, 0);
    let g = sf("x1^2 + x2^2 - x3", c);
    let opts = Options::default().with_box(vec![(-1.35, 1.35), (-1.35, 1.35), (-0.3, 1.3)]);
    let a = surface_integral(&g, &Grassmann::one(c), &[Expr::var(3).sub(&Expr::int(1))], &opts).unwrap();
    let want = PI / 6.0 * (5f64.powf(1.5) - 1.0);
    assert!((a.value - want).abs() < 1e-8, "{} vs {want}", a.value);
}

#[test]
fn delta_weight_substitution() {
    // ∫ δ(x² + R²)|x| F = R ∫ δ(x² + R²) F
    for (m, n) in [(2, 1), (3, 1), (4, 1)] {
        let c = ctx(m, n);
        for r in [0.75, 1.0, 1.5] {
            let g = x_square(c).add(&Grassmann::scalar(c, Expr::float(r * r)));
            let d = DistributionExpansion::delta(&g, 0).unwrap();
            let f = sf("1 + x1^2 + 2*q1*q2*x2", c);
            let o = unit_box(m, r);
            let with = integrate_distribution(&d, &MixedClifford::scalar(abs_x(c).unwrap().mul(&f)), &[], &o).unwrap();
            let without = integrate_distribution(&d, &MixedClifford::scalar(f), &[], &o).unwrap();
            let (a, b) = (with.scalar(), r * without.scalar());
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "({m},{n}) R={r}: {a} vs {b}");
        }
    }
}

#[test]
fn backends_agree_on_unit_ball_and_sphere() {
    for (m, n) in [(2, 0), (3, 0), (2, 1), (3, 1)] {
        let c = ctx(m, n);
        let g = superball_phase(c, 1.0);
        let f = sf(if n == 0 { "1 + x1^2" } else { "1 + x1^2 + q1*q2*x2" }, c);
        let base = unit_box(m, 1.0);
        let area = surface_integral(&g, &f, &[], &base).unwrap().value;
        let ls = surface_integral(&g, &f, &[], &base.clone().with_backend(Backend::Levelset)).unwrap();
        assert!((area - ls.value).abs() < 1e-6, "({m},{n}) area {area} vs {}", ls.value);
        let vol = domain_integral(&g, &f, &[], &base).unwrap().value;
        let gr = domain_integral(&g, &f, &[], &base.clone().with_backend(Backend::Grid)).unwrap();
        assert!((vol - gr.value).abs() < 1e-6, "({m},{n}) volume {vol} vs {}", gr.value);
    }
}

#[test]
fn generic_circle_and_disc() {
    let c = ctx(2, 0);
    let g = sf("(x1 - 0.3)^2 + x2^2 - 1", c);
    let one = Grassmann::one(c);
    let opts = Options::default().with_box(vec![(-1.0, 1.6), (-1.3, 1.3)]);
    let s = surface_integral(&g, &one, &[], &opts).unwrap();
    assert!((s.value - 2.0 * PI).abs() < 1e-7, "{s:?}");
    assert_ne!(s.backend, "radial");
    let v = domain_integral(&g, &one, &[], &opts).unwrap();
    assert!((v.value - PI).abs() < 1e-7, "{v:?}");
}

#[test]
fn ellipse_area_without_box() {
    let c = ctx(2, 0);
    let g = sf("x1^2/4 + x2^2 - 1", c);
    let v = domain_integral(&g, &Grassmann::one(c), &[], &Options::default()).unwrap();
    assert!((v.value - 2.0 * PI).abs() < 1e-7, "{v:?}");
}

#[test]
fn oriented_closed_supersphere_vanishes() {
    for (m, n) in [(2, 0), (3, 1), (2, 1)] {
        let c = ctx(m, n);
        let g = superball_phase(c, 1.0);
        let r = oriented_surface_integral(&g, &MixedClifford::scalar(Grassmann::one(c)), &[], &Options::default())
            .unwrap();
        assert!(r.max_abs() < 1e-10, "({m},{n}) {:?}", r.components);
        assert!(!r.components.is_empty());
    }
}

#[test]
fn oriented_flux_of_position_vector() {
    // ∂[g] = −2x̲, so the weight is 2x̲x̲ = −2 on the sphere and δ(r² − 1) = δ(r − 1)/2
    let c = ctx(3, 0);
    let g = sf("x1^2 + x2^2 + x3^2 - 1", c);
    let mut xv = MixedClifford::zero(c);
    for j in 1..=3 {
        xv = xv.add(&MixedClifford::e(c, j).scale_left(&sf(&format!("x{j}"), c)));
    }
    let r = oriented_surface_integral(&g, &xv, &[], &Options::default()).unwrap();
    let area = 4.0 * PI;
    assert!((r.scalar() + area).abs() < 1e-9, "{:?}", r.components);
}

#[test]
fn pizzetti_classical_moment() {
    let c = ctx(3, 0);
    let p = to_poly_sf(&sf("x1^2", c)).unwrap();
    let (series, engine) = pizzetti_compare(&p, &Options::default()).unwrap();
    assert!((series - 4.0 * PI / 3.0).abs() < 1e-12);
    assert!((engine - series).abs() < 1e-10);
}

#[test]
fn degenerate_phase_is_rejected() {
    let c = ctx(2, 0);
    let g = sf("x1^2 + x2^2", c);
    let err = surface_integral(&g, &Grassmann::one(c), &[], &unit_box(2, 1.0)).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err:?}");
}

#[test]
fn region_leaving_the_box_is_rejected() {
    let c = ctx(2, 0);
    let g = sf("x1^2 + x2^2 - 4", c);
    let err = domain_integral(&g, &Grassmann::one(c), &[], &unit_box(2, 1.0)).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err:?}");
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let c = ctx(3, 1);
    let g = sf("x1^2 + 2*x2^2 + x3^2 - 1 + q1*q2", c);
    let f = sf("x1*x2 + x3^2 + q1*q2", c);
    let a = domain_integral(&g, &f, &[], &Options::default()).unwrap();
    let b = domain_integral(&g, &f, &[], &Options::default()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

fn ball_volume(m: usize, n: usize, r: f64) -> f64 {
    let mm = m as f64 - 2.0 * n as f64;
    PI.powf(mm / 2.0) / gamma(mm / 2.0 + 1.0) * r.powf(mm)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn volume_scales_as_r_to_the_superdimension(k in 0usize..5, r in 0.3f64..3.0) {
        let (m, n) = [(2, 0), (3, 0), (3, 1), (4, 1), (5, 2)][k];
        let c = ctx(m, n);
        let v = domain_integral(&superball_phase(c, r), &Grassmann::one(c), &[], &unit_box(m, r)).unwrap().value;
        let want = ball_volume(m, n, r);
        prop_assert!((v - want).abs() < 1e-9 * (1.0 + want.abs()), "{} vs {}", v, want);
    }

    #[test]
    fn area_scales_as_r_to_the_superdimension_minus_one(k in 0usize..4, r in 0.3f64..3.0) {
        let (m, n) = [(2, 0), (3, 1), (4, 1), (5, 2)][k];
        let c = ctx(m, n);
        let mm = m as f64 - 2.0 * n as f64;
        let a = surface_integral(&superball_phase(c, r), &Grassmann::one(c), &[], &unit_box(m, r)).unwrap().value;
        let a1 = surface_integral(&superball_phase(c, 1.0), &Grassmann::one(c), &[], &unit_box(m, 1.0)).unwrap().value;
        let want = a1 * r.powf(mm - 1.0);
        prop_assert!((a - want).abs() < 1e-9 * (1.0 + want.abs()), "{} vs {}", a, want);
    }

    #[test]
    fn radial_phase_reparametrization_keeps_the_domain(k in 0usize..4, r in 0.5f64..2.0) {
        let (m, n) = [(2, 1), (3, 1), (4, 1), (3, 2)][k];
        let c = ctx(m, n);
        let one = Grassmann::one(c);
        let o = unit_box(m, r);
        let a = domain_integral(&superball_phase(c, r), &one, &[], &o).unwrap().value;
        let lin = abs_x(c).unwrap().sub(&Grassmann::scalar(c, Expr::float(r)));
        let b = domain_integral(&lin, &one, &[], &o).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
    }
}
