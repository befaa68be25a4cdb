use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::f64::consts::PI;
use superint::grassmann::SuperContext;
use superint::special::*;
use superint::superfun::{parse_superfunction, to_poly_sf};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn gamma_half_integers_match_factorial_forms() {
    // Γ(k+1/2) = (2k)!/(4^k k!)·√π and Γ(1/2−k) = (−4)^k k!/(2k)!·√π, with exact integer ratios
    for k in 0u32..30 {
        let fact = |n: u32| (1..=n).fold(BigInt::from(1), |a, j| a * j);
        let up = num_rational::BigRational::new(fact(2 * k), BigInt::from(4).pow(k) * fact(k));
        let want = up.to_f64().unwrap() * PI.sqrt();
        assert!(rel(gamma(k as f64 + 0.5).unwrap(), want) < 1e-13, "k={k}");
        let down = num_rational::BigRational::new(BigInt::from(-4).pow(k) * fact(k), fact(2 * k));
        let want = down.to_f64().unwrap() * PI.sqrt();
        assert!(rel(gamma(0.5 - k as f64).unwrap(), want) < 1e-13, "k={k}");
    }
}

#[test]
fn gauss_series_agrees_with_euler_integral() {
    for big_m in [-3, -2, -1, 0, 1, 2, 3, 4, 5] {
        let mf = big_m as f64;
        for i in 0..=16 {
            let z = -0.5 * i as f64;
            // hyperboloid volume parameters
            let a = (1.0 - mf) / 2.0;
            let s = hyp2f1(a, 0.5, 1.5, z).unwrap();
            let e = hyp2f1_euler(a, 0.5, 1.5, z).unwrap();
            assert!((s - e).abs() <= 1e-9 * (1.0 + e.abs()), "M={big_m} z={z}: {s} vs {e}");
            // paraboloid area parameters, M > 1
            if big_m > 1 {
                let (b, c) = ((mf - 1.0) / 2.0, (mf + 1.0) / 2.0);
                let s = hyp2f1(-0.5, b, c, z).unwrap();
                let e = hyp2f1_euler(-0.5, b, c, z).unwrap();
                assert!((s - e).abs() <= 1e-9 * (1.0 + e.abs()), "M={big_m} z={z}");
            }
        }
    }
}

#[test]
fn appell_series_agrees_with_integral() {
    for big_m in [-2, -1, 0, 1, 2, 3, 4, 5] {
        let b2 = (3.0 - big_m as f64) / 2.0;
        for h in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let (z1, z2) = (-2.0 * h * h, -h * h);
            let s = appell_f1(0.5, -0.5, b2, 1.5, z1, z2).unwrap();
            let i = appell_f1_integral(0.5, -0.5, b2, 1.5, z1, z2).unwrap();
            assert!((s - i).abs() <= 1e-8 * (1.0 + i.abs()), "M={big_m} h={h}: {s} vs {i}");
        }
    }
}

#[test]
fn hypergeometric_oracle_values() {
    // mpmath (30 digits)
    let f1 = [
        (2, 0.5, 1.0352955316640430292),
        (3, 2.0, 1.8116126200701152567),
        (4, 1.0, 1.4874979437088128807),
        (5, 2.0, 4.9601610425613508496),
        (-1, 2.0, 0.50117973905426254683),
        (0, 1.0, 0.85200339312129295122),
    ];
    for (big_m, h, want) in f1 {
        let v = appell_f1(0.5, -0.5, (3.0 - big_m as f64) / 2.0, 1.5, -2.0 * h * h, -h * h).unwrap();
        assert!(rel(v, want) < 1e-12, "F1 M={big_m} h={h}");
    }
    let sp = [(3, 0.5, 1.3987174742355439602), (5, 2.0, 2.4833333333333333333), (2, 1.0, 1.4789428575445974338)];
    for (big_m, h, want) in sp {
        let mf = big_m as f64;
        let v = hyp2f1(-0.5, (mf - 1.0) / 2.0, (mf + 1.0) / 2.0, -4.0 * h).unwrap();
        assert!(rel(v, want) < 1e-12, "2F1 M={big_m} h={h}");
    }
    let sh = [(-2, 2.0, 0.44721359549995793928), (0, 1.0, 0.88137358701954302523), (4, 2.0, 3.9042921150331851959)];
    for (big_m, h, want) in sh {
        let v = hyp2f1((1.0 - big_m as f64) / 2.0, 0.5, 1.5, -h * h).unwrap();
        assert!(rel(v, want) < 1e-12, "2F1 M={big_m} h={h}");
    }
}

#[test]
fn catalog_classical_cases() {
    let cases = [
        (Shape::Paraboloid, Kind::Volume, 2, 4.0 / 3.0),
        (Shape::Paraboloid, Kind::Area, 2, 5f64.sqrt() + 2f64.asinh() / 2.0),
        (Shape::Paraboloid, Kind::Volume, 3, PI / 2.0),
        (Shape::Paraboloid, Kind::Area, 3, PI / 6.0 * (5f64.powf(1.5) - 1.0)),
        (Shape::Hyperboloid, Kind::Volume, 2, 2.0 * (2f64.sqrt() + 1f64.asinh())),
        (Shape::Hyperboloid, Kind::Volume, 3, 8.0 * PI / 3.0),
        (Shape::Hyperboloid, Kind::Area, 3, PI * (2.0 * 3f64.sqrt() + 2f64.sqrt() * 2f64.sqrt().asinh())),
    ];
    for (shape, kind, m, want) in cases {
        let v = catalog(shape, kind, m, 0, 1.0).unwrap().value;
        assert!(rel(v, want) < 1e-12, "{shape:?} {kind:?} m={m}: {v} vs {want}");
    }
    // m = 2 hyperboloid length 4∫₁^√2 √(2x²−1)/√(x²−1) dx, with x = cosh u
    let (direct, _) = superint::quad::adaptive(
        |u: f64| Ok(4.0 * (2.0 * u.cosh().powi(2) - 1.0).sqrt()),
        0.0,
        2f64.sqrt().acosh(),
        1e-13,
        1e-13,
    )
    .unwrap();
    let v = catalog(Shape::Hyperboloid, Kind::Area, 2, 0, 1.0).unwrap().value;
    assert!(rel(v, direct) < 1e-9, "{v} vs {direct}");
}

#[test]
fn catalog_zero_branches_and_ranges() {
    assert_eq!(catalog(Shape::Superball, Kind::Volume, 4, 3, 1.0).unwrap().value, 0.0);
    assert_eq!(catalog(Shape::Supersphere, Kind::Area, 4, 2, 1.5).unwrap().value, 0.0);
    assert_eq!(catalog(Shape::Paraboloid, Kind::Volume, 3, 2, 1.0).unwrap().value, 0.0);
    assert_eq!(catalog(Shape::Hyperboloid, Kind::Area, 5, 2, 1.0).unwrap().value, 0.0);
    assert_ne!(catalog(Shape::Superball, Kind::Volume, 2, 1, 1.0).unwrap().value, 0.0);
    assert!(catalog(Shape::Paraboloid, Kind::Area, 2, 1, 1.0).is_err());
    assert!(catalog(Shape::Superball, Kind::Volume, 0, 0, 1.0).is_err());
    assert!((paraboloid_area_continued(3, 1, 0.7).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn pizzetti_examples() {
    let p = |text: &str, m: usize, n: usize| {
        let ctx = SuperContext::new(m, n).unwrap();
        pizzetti(&to_poly_sf(&parse_superfunction(text, ctx).unwrap()).unwrap()).unwrap()
    };
    assert!((p("1", 3, 1) - 2.0).abs() < 1e-14);
    assert_eq!(p("x1*x2", 3, 1), 0.0);
    assert!((p("x1^2", 3, 0) - 4.0 * PI / 3.0).abs() < 1e-14);
    let want = 2.0 * PI.powf(0.5) / gamma(1.5).unwrap();
    assert!((p("q1*q2", 3, 1) - want).abs() < 1e-14);
    assert!((p("q1*q2", 3, 1) - sphere_area(3.0) / PI).abs() < 1e-14);
}
