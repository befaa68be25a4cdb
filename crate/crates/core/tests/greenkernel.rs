use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::factorial::factorial;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use superint::clifford::MixedClifford;
use superint::error::Error;
use superint::expr::Expr;
use superint::grassmann::{Grassmann, SuperContext};
use superint::greenkernel::*;
use superint::integrate::{superball_phase, Backend, Options};
use superint::scalar::Scalar;
use superint::superfun::{eval_at, from_poly_sf, parse_superfunction, SuperFunction};
use superint::verify::random_superpoly;

fn area(m: usize) -> f64 {
    2.0 * PI.powf(m as f64 / 2.0) / gamma(m as f64 / 2.0)
}

fn ctx(m: usize, n: usize) -> SuperContext {
    SuperContext::new(m, n).unwrap()
}

fn sf(text: &str, c: SuperContext) -> SuperFunction {
    parse_superfunction(text, c).unwrap()
}

#[test]
fn first_kernel_has_unit_flux() {
    // n·φ₁ = x̲x̲ p/R = −R p on the sphere of radius R
    for m in 2..=6 {
        let phi = phi_family(m, 1).unwrap();
        for r in [0.5, 1.0, 3.0] {
            let flux = -r * phi[0].profile(r) * area(m) * r.powi(m as i32 - 1);
            assert!((flux - 1.0).abs() < 1e-13, "m={m} R={r}: {flux}");
        }
    }
}

#[test]
fn plane_log_kernel() {
    let phi = phi_family(2, 2).unwrap();
    assert!(phi[1].has_log());
    assert_eq!(phi[1].dirac(2), phi[0]);
    // radial derivative of −log r/2π times the circle length
    let r = 1.7;
    let h = 1e-5;
    let d = (phi[1].profile(r + h) - phi[1].profile(r - h)) / (2.0 * h);
    assert!((d * 2.0 * PI * r + 1.0).abs() < 1e-9);
}

#[test]
fn dirac_lowers_the_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 2..=6 {
        let phi = match phi_family(m, 5) {
            Ok(p) => p,
            Err(Error::Unsupported(_)) => phi_family(m, 3).unwrap(),
            Err(e) => panic!("{e:?}"),
        };
        for j in 1..phi.len() {
            for _ in 0..100 {
                let x: Vec<f64> = loop {
                    let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                    if (0.3..2.0).contains(&r) {
                        break v;
                    }
                };
                let (want_s, want_v) = phi[j - 1].eval(&x);
                // five-point stencil
                let h = 1e-3;
                let d = |i: usize, pick: &dyn Fn(&(f64, Vec<f64>)) -> f64| {
                    let at = |s: f64| {
                        let mut y = x.clone();
                        y[i] += s * h;
                        pick(&phi[j].eval(&y))
                    };
                    (at(-2.0) - 8.0 * at(-1.0) + 8.0 * at(1.0) - at(2.0)) / (12.0 * h)
                };
                let scale = 1.0 + want_s.abs() + want_v.iter().map(|v| v.abs()).sum::<f64>();
                if phi[j].vector {
                    // ∂ Σe_kV_k = −div V for a radial field
                    let div: f64 = (0..m).map(|i| d(i, &|e| e.1[i])).sum();
                    assert!((-div - want_s).abs() < 1e-8 * scale, "m={m} j={}: {} vs {want_s}", j + 1, -div);
                } else {
                    for i in 0..m {
                        let g = d(i, &|e| e.0);
                        assert!((g - want_v[i]).abs() < 1e-8 * scale, "m={m} j={} i={i}", j + 1);
                    }
                }
            }
        }
    }
}

#[test]
fn logs_appear_in_even_dimensions_only() {
    for m in 2..=7 {
        let phi = phi_family(m, 5).unwrap();
        assert_eq!(phi.iter().any(|k| k.has_log()), m % 2 == 0 && m <= 4, "m={m}");
    }
    assert!(matches!(phi_family(1, 1).unwrap_err(), Error::Unsupported(_)));
}

#[test]
fn nu_terms_match_the_sums() {
    for m in 2..=5 {
        for n in 0..=2 {
            let Ok(nu) = nu1(m, n) else { continue };
            assert_eq!(nu.terms.len(), 2 * n + 1);
            let mut powers: Vec<usize> = nu.terms.iter().map(|t| t.xgrave_power).collect();
            powers.sort_unstable();
            assert_eq!(powers, (0..=2 * n).collect::<Vec<_>>());
            let pn = PI.powi(n as i32);
            for t in &nu.terms {
                let want = if t.j % 2 == 0 {
                    let k = (t.j - 2) / 2;
                    pn * 2f64.powi(2 * k as i32 + 1) * factorial(k as u64) / factorial((n - k - 1) as u64)
                } else {
                    let k = (t.j - 1) / 2;
                    -pn * 4f64.powi(k as i32) * factorial(k as u64) / factorial((n - k) as u64)
                };
                assert!((t.coeff - want).abs() < 1e-12 * want.abs(), "m={m} n={n} j={}", t.j);
                assert_eq!(t.j + t.xgrave_power, 2 * n + 1);
                assert_eq!(t.kernel.vector, t.j % 2 == 1);
            }
        }
    }
}

#[test]
fn delta_factor_reproduces_the_value_in_a_doubled_algebra() {
    // x̀ = (x̀₁, x̀₂), ỳ = (x̀₃, x̀₄); integrating π(x̀ − ỳ)² F(x̀) over x̀ gives F(ỳ)
    let c = ctx(1, 2);
    let gen = |i: usize| Grassmann::<Scalar>::generator(c, i).unwrap();
    let num = |v: f64| Grassmann::scalar(c, Scalar::float(v));
    let d = gen(1).sub(&gen(3)).mul(&gen(2).sub(&gen(4))).scale(&Scalar::float(PI));
    let (a, b, cc, dd) = (0.7, -1.3, 2.1, 0.4);
    let f = num(a).add(&gen(1).scale(&Scalar::float(b))).add(&gen(2).scale(&Scalar::float(cc))).add(&gen(1).mul(&gen(2)).scale(&Scalar::float(dd)));
    let prod = d.mul(&f);
    let mut partial = Grassmann::<Scalar>::zero(c);
    for (blade, v) in prod.terms() {
        if blade & 0b11 == 0b11 {
            partial.add_term(blade >> 2 << 2, Scalar::float(v.to_f64() / PI));
        }
    }
    let want = num(a).add(&gen(3).scale(&Scalar::float(b))).add(&gen(4).scale(&Scalar::float(cc))).add(&gen(3).mul(&gen(4)).scale(&Scalar::float(dd)));
    for blade in 0..16u32 {
        assert!((partial.coeff(blade).to_f64() - want.coeff(blade).to_f64()).abs() < 1e-14, "blade {blade:b}");
    }
}

#[test]
fn delta_pairs_to_the_body_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let c = ctx(2, n);
        let d = super_dirac_delta(2, n).unwrap();
        assert!((d.factor().berezin() - 1.0).abs() < 1e-14);
        for _ in 0..5 {
            let g = from_poly_sf(&random_superpoly(&mut rng, c, 3, false));
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let want = eval_at(&g, &y).unwrap().body().to_f64();
            assert!((d.pair(&g, &y).unwrap() - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }
}

#[test]
fn cauchy_pompeiu_on_the_disc() {
    let c = ctx(2, 0);
    let g = sf("x1^2 + x2^2 - 1", c);
    let gf = sf("1 + 2*x1 - x1*x2^2 + 3*x2^3", c);
    let y = [0.21, -0.35];
    let want = eval_at(&gf, &y).unwrap().body().to_f64();
    let r = cauchy_pompeiu(&gf, &g, &y, &Options::default()).unwrap();
    assert!((r.scalar() - want).abs() < 1e-8, "{} vs {want}", r.scalar());
    let outside = cauchy_pompeiu(&gf, &g, &[1.4, 0.3], &Options::default()).unwrap();
    assert!(outside.max_abs() < 1e-8, "{:?}", outside.components);
    let err = cauchy_pompeiu(&gf, &g, &[1.0, 0.0], &Options::default()).unwrap_err();
    assert!(matches!(err, Error::Refused(_)), "{err:?}");
}

#[test]
fn cauchy_pompeiu_constant_in_superspace() {
    for (m, n) in [(2, 1), (3, 1)] {
        let c = ctx(m, n);
        let r = cauchy_pompeiu(&Grassmann::one(c), &superball_phase(c, 1.0), &vec![0.0; m], &Options::default()).unwrap();
        assert!((r.scalar() - 1.0).abs() < 1e-8, "({m},{n}) {:?}", r.components);
    }
}

#[test]
fn stokes_with_constants_is_trivial() {
    let c = ctx(2, 1);
    let one = MixedClifford::scalar(Grassmann::<Expr>::one(c));
    let r = stokes_check(&one, &one, &superball_phase(c, 1.0), &Options::default()).unwrap();
    assert!(r.lhs.max_abs() < 1e-12 && r.rhs.max_abs() < 1e-10, "{:?}", r.rhs.components);
}

#[test]
fn stokes_grid_and_radial_agree() {
    let c = ctx(2, 1);
    let one = MixedClifford::scalar(Grassmann::<Expr>::one(c));
    let x1 = MixedClifford::scalar(sf("x1", c));
    let g = superball_phase(c, 1.0);
    let a = stokes_check(&one, &x1, &g, &Options::default()).unwrap();
    let b = stokes_check(&one, &x1, &g, &Options::default().with_backend(Backend::Grid).with_tol(1e-8)).unwrap();
    assert!(a.lhs.max_deviation(&b.lhs) < 1e-4);
    assert!(a.rhs.max_deviation(&b.rhs) < 1e-4);
    assert!(a.deviation < 1e-8 && b.deviation < 1e-6);
}

#[test]
fn stokes_on_the_disc_with_random_polynomials() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = ctx(2, 0);
    let g = sf("x1^2 + x2^2 - 1", c);
    for _ in 0..3 {
        let f = MixedClifford::scalar(from_poly_sf(&random_superpoly(&mut rng, c, 4, false)))
            .add(&MixedClifford::e(c, 2).scale_left(&from_poly_sf(&random_superpoly(&mut rng, c, 2, false))));
        let gg = MixedClifford::scalar(from_poly_sf(&random_superpoly(&mut rng, c, 3, false)));
        let r = stokes_check(&f, &gg, &g, &Options::default()).unwrap();
        assert!(r.deviation < 1e-6, "{}", r.deviation);
    }
}
