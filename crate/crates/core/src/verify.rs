//! Acceptance suites, shared by the `acceptance` test target and `superint verify`.
//!
//! Each suite runs a fixed, seeded set of cases and records the deviation of
//! every case against its tolerance.

use crate::clifford::MixedClifford;
use crate::distrib::DistributionExpansion;
use crate::error::Result;
use crate::expr::{inverse_jet, jet_eval, Expr};
use crate::grassmann::{Blade, Grassmann, SuperContext};
use crate::greenkernel::{cauchy_pompeiu, stokes_check};
use crate::integrate::{
    domain_integral, integrate_distribution, pizzetti_compare, shape_integral, superball_phase, surface_integral,
    Backend, Options,
};
use crate::poly::{Monomial, Poly};
use crate::special::{
    appell_f1, appell_f1_integral, catalog, gamma, hyp2f1, hyp2f1_euler, paraboloid_area_continued, Kind, Shape,
};
use crate::superfun::{abs_x, eval_at, from_poly_sf};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma as oracle_gamma;
use std::f64::consts::PI;
use std::time::Instant;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

pub const SUITES: [(usize, &str); 11] = [
    (1, "volumes"),
    (2, "areas"),
    (3, "paraboloid"),
    (4, "hyperboloid"),
    (5, "pizzetti"),
    (6, "symbolic"),
    (7, "phase-invariance"),
    (8, "stokes"),
    (9, "cauchy-pompeiu"),
    (10, "special"),
    (11, "jets"),
];

/// Suite number from a name or a number.
pub fn suite_id(name: &str) -> Option<usize> {
    if let Ok(k) = name.parse::<usize>() {
        return SUITES.iter().find(|s| s.0 == k).map(|s| s.0);
    }
    SUITES.iter().find(|s| s.1 == name).map(|s| s.0)
}

#[derive(Clone, Debug)]
pub struct CaseOutcome {
    pub label: String,
    pub deviation: f64,
    pub tolerance: f64,
}

impl CaseOutcome {
    pub fn ok(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub id: usize,
    pub name: &'static str,
    pub cases: Vec<CaseOutcome>,
    pub seconds: f64,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
        self.cases.iter().filter(|c| !c.ok())
    }

    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.failures().next().is_none()
    }

    /// The case with the largest deviation/tolerance ratio.
    pub fn worst(&self) -> Option<&CaseOutcome> {
        self.cases.iter().max_by(|a, b| (a.deviation / a.tolerance).total_cmp(&(b.deviation / b.tolerance)))
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let worst = match self.worst() {
            Some(w) => format!("worst {} dev {:.3e} tol {:.0e}", w.label, w.deviation, w.tolerance),
            None => "no cases".into(),
        };
        format!(
            "{status} criterion {:>2} {:<17} {:>4} cases, {} failed, {worst} ({:.1}s)",
            self.id,
            self.name,
            self.cases.len(),
            self.failures().count(),
            self.seconds
        )
    }
}

struct Cases(Vec<CaseOutcome>);

impl Cases {
    fn check(&mut self, label: impl Into<String>, deviation: f64, tolerance: f64) {
        let deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        self.0.push(CaseOutcome { label: label.into(), deviation, tolerance });
    }

    /// |engine − want| against tol; errors count as failures.
    fn compare(&mut self, label: impl Into<String>, engine: Result<f64>, want: f64, tol: f64) {
        let label = label.into();
        match engine {
            Ok(v) => self.check(label, (v - want).abs(), tol),
            Err(e) => self.check(format!("{label} [{e}]"), f64::INFINITY, tol),
        }
    }

    fn holds(&mut self, label: impl Into<String>, ok: bool) {
        self.check(label, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

pub fn run_suite(id: usize, seed: u64) -> SuiteReport {
    let t = Instant::now();
    let mut c = Cases(Vec::new());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    match id {
        1 => volumes(&mut c),
        2 => areas(&mut c),
        3 => paraboloid(&mut c),
        4 => hyperboloid(&mut c),
        5 => pizzetti_suite(&mut c, &mut rng),
        6 => symbolic(&mut c, &mut rng),
        7 => phase_invariance(&mut c),
        8 => stokes(&mut c, &mut rng),
        9 => cp(&mut c, &mut rng),
        10 => special_functions(&mut c),
        11 => jets(&mut c, &mut rng),
        _ => c.check(format!("unknown suite {id}"), f64::INFINITY, 0.0),
    }
    let name = SUITES.iter().find(|s| s.0 == id).map(|s| s.1).unwrap_or("unknown");
    SuiteReport { id, name, cases: c.0, seconds: t.elapsed().as_secs_f64() }
}

const BALL_GRID: [(usize, usize); 8] = [(1, 0), (2, 0), (3, 0), (2, 1), (3, 1), (4, 1), (3, 2), (5, 2)];
const RADII: [f64; 3] = [0.5, 1.0, 2.0];

fn ctx(m: usize, n: usize) -> SuperContext {
    SuperContext::new(m, n).expect("valid context")
}

fn superdim(m: usize, n: usize) -> f64 {
    m as f64 - 2.0 * n as f64
}

/// 1/Γ(x) with the poles at 0, −1, −2, … mapped to 0.
fn rgamma_oracle(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / oracle_gamma(x)
    }
}

fn volumes(c: &mut Cases) {
    let opts = Options::default();
    for (m, n) in BALL_GRID {
        let mm = superdim(m, n);
        for r in RADII {
            let want = PI.powf(mm / 2.0) * rgamma_oracle(mm / 2.0 + 1.0) * r.powf(mm);
            let v = shape_integral(Shape::Superball, Kind::Volume, ctx(m, n), r, &opts).map(|v| v.value);
            c.compare(format!("({m},{n}) R={r}"), v, want, 1e-8);
        }
    }
    for (m, n) in [(2, 2), (4, 3)] {
        for r in RADII {
            let v = shape_integral(Shape::Superball, Kind::Volume, ctx(m, n), r, &opts).map(|v| v.value);
            c.compare(format!("zero ({m},{n}) R={r}"), v, 0.0, 1e-10);
        }
    }
}

fn areas(c: &mut Cases) {
    let opts = Options::default();
    for (m, n) in BALL_GRID.into_iter().chain([(2, 2), (4, 3)]) {
        let mm = superdim(m, n);
        for r in RADII {
            let want = 2.0 * PI.powf(mm / 2.0) * rgamma_oracle(mm / 2.0) * r.powf(mm - 1.0);
            let tol = if want == 0.0 { 1e-10 } else { 1e-8 };
            let v = shape_integral(Shape::Supersphere, Kind::Area, ctx(m, n), r, &opts).map(|v| v.value);
            c.compare(format!("({m},{n}) R={r}"), v, want, tol);
        }
    }
}

fn paraboloid(c: &mut Cases) {
    let opts = Options::default();
    let five: f64 = 5.0;
    let classical = [
        (2, Kind::Volume, 4.0 / 3.0),
        (2, Kind::Area, five.sqrt() + 2f64.asinh() / 2.0),
        (3, Kind::Volume, PI / 2.0),
        (3, Kind::Area, PI / 6.0 * (five.powf(1.5) - 1.0)),
    ];
    for (m, kind, want) in classical {
        let v = shape_integral(Shape::Paraboloid, kind, ctx(m, 0), 1.0, &opts).map(|v| v.value);
        c.compare(format!("({m},0) {} h=1", kind.name()), v, want, 1e-6);
    }
    for (m, n) in [(3, 1), (4, 1)] {
        for h in [0.5, 1.0, 2.0] {
            for kind in [Kind::Volume, Kind::Area] {
                let label = format!("({m},{n}) {} h={h}", kind.name());
                let want = match catalog(Shape::Paraboloid, kind, m, n, h) {
                    Ok(v) => v.value,
                    Err(_) => match paraboloid_area_continued(m, n, h) {
                        Ok(v) => v,
                        Err(e) => {
                            c.check(format!("{label} [{e}]"), f64::INFINITY, 1e-6);
                            continue;
                        }
                    },
                };
                let v = shape_integral(Shape::Paraboloid, kind, ctx(m, n), h, &opts).map(|v| v.value);
                c.compare(label, v, want, 1e-6);
            }
        }
    }
}

fn hyperboloid(c: &mut Cases) {
    let opts = Options::default();
    let (s2, s3) = (2f64.sqrt(), 3f64.sqrt());
    let classical = [
        (2, Kind::Volume, 2.0 * (s2 + 1f64.asinh())),
        (3, Kind::Volume, 8.0 * PI / 3.0),
        (3, Kind::Area, PI * (2.0 * s3 + s2 * s2.asinh())),
    ];
    for (m, kind, want) in classical {
        let v = shape_integral(Shape::Hyperboloid, kind, ctx(m, 0), 1.0, &opts).map(|v| v.value);
        c.compare(format!("({m},0) {} h=1", kind.name()), v, want, 1e-6);
    }
    for (m, n) in [(3, 1), (4, 1)] {
        for h in [0.5, 1.0, 2.0] {
            for kind in [Kind::Volume, Kind::Area] {
                let label = format!("({m},{n}) {} h={h}", kind.name());
                let want = match catalog(Shape::Hyperboloid, kind, m, n, h) {
                    Ok(v) => v.value,
                    Err(e) => {
                        c.check(format!("{label} [{e}]"), f64::INFINITY, 1e-5);
                        continue;
                    }
                };
                let tol = if want == 0.0 { 1e-10 } else { 1e-5 };
                let v = shape_integral(Shape::Hyperboloid, kind, ctx(m, n), h, &opts).map(|v| v.value);
                c.compare(label, v, want, tol);
            }
        }
    }
}

fn small_int(rng: &mut ChaCha8Rng) -> i64 {
    let k = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

/// Random polynomial in m variables of total degree ≤ deg.
pub fn random_poly(rng: &mut ChaCha8Rng, m: usize, deg: u32, terms: usize) -> Poly {
    let mut out = Vec::new();
    for _ in 0..terms {
        let d = rng.gen_range(0..=deg);
        let mut e = vec![0u32; m];
        for _ in 0..d {
            e[rng.gen_range(0..m)] += 1;
        }
        out.push((Monomial::new(e), BigRational::from_integer(small_int(rng).into())));
    }
    Poly::from_terms(out)
}

/// Random polynomial superfunction; `even_only` restricts to even blades.
pub fn random_superpoly(rng: &mut ChaCha8Rng, ctx: SuperContext, deg: u32, even_only: bool) -> Grassmann<Poly> {
    let mut g = Grassmann::scalar(ctx, random_poly(rng, ctx.m, deg, 3));
    for b in 1..(1 as Blade) << (2 * ctx.n) {
        if even_only && b.count_ones() % 2 == 1 {
            continue;
        }
        if rng.gen_bool(0.6) {
            g.add_term(b, random_poly(rng, ctx.m, deg, 2));
        }
    }
    g
}

fn pizzetti_suite(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let opts = Options::default();
    for (m, n) in [(2, 1), (3, 1), (4, 2)] {
        for i in 0..20 {
            let p = random_superpoly(rng, ctx(m, n), 6, false);
            let label = format!("({m},{n}) #{i}");
            match pizzetti_compare(&p, &opts) {
                Ok((s, e)) => c.check(label, (s - e).abs(), 1e-7 * (1.0 + s.abs())),
                Err(e) => c.check(format!("{label} [{e}]"), f64::INFINITY, 1e-7),
            }
        }
    }
}

/// Even phase over m = 2 with body a·x1² + b·x2 + c, a ≠ 0.
fn random_phase(rng: &mut ChaCha8Rng, n: usize) -> Grassmann<Poly> {
    let ctx = ctx(2, n);
    let r = |k: i64| BigRational::from_integer(k.into());
    let body = Poly::from_terms([
        (Monomial::new(vec![2, 0]), r(rng.gen_range(1..4))),
        (Monomial::new(vec![0, 1]), r(rng.gen_range(-3..4))),
        (Monomial::new(vec![0, 0]), r(rng.gen_range(-5..5))),
    ]);
    let mut g = Grassmann::scalar(ctx, body);
    for b in 1..(1 as Blade) << (2 * n) {
        if b.count_ones() % 2 == 0 {
            g.add_term(b, random_poly(rng, 2, 1, 1));
        }
    }
    g
}

fn symbolic(c: &mut Cases, rng: &mut ChaCha8Rng) {
    type D = DistributionExpansion<Poly>;
    let fact = |j: usize| (1..=j as i64).product::<i64>();
    for i in 0..50 {
        let n = i % 3;
        let j = rng.gen_range(0..=3usize);
        let g = random_phase(rng, n);
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let (i_ok, ii_ok, minus_ok) = match (D::delta(&g, j), D::delta(&g, 0), D::delta(&g.neg(), j)) {
            (Ok(dj), Ok(d0), Ok(dm)) => (
                dj.multiply(&g.pow(j as u32)).equivalent(&d0.map_coeffs(|x| x.scale_int(sign * fact(j)))),
                dj.multiply(&g.pow(j as u32 + 1)).is_zero(),
                dm.coeff_eq(&dj.negate_phase().map_coeffs(|x| x.scale_int(sign))),
            ),
            _ => (false, false, false),
        };
        c.holds(format!("delta-power n={n} j={j} #{i}"), i_ok);
        c.holds(format!("delta-annihilate n={n} j={j} #{i}"), ii_ok);
        c.holds(format!("minus n={n} j={j} #{i}"), minus_ok);
    }
    for i in 0..50 {
        let n = 1 + i % 2;
        let cx = ctx(2, n);
        let f = random_superpoly(rng, cx, 2, false);
        let g = random_superpoly(rng, cx, 2, false);
        c.holds(format!("star involution n={n} #{i}"), f.star().star().coeff_eq(&f));
        let j = rng.gen_range(1..=2 * n);
        let ok = match (f.mul(&g).fer_partial(j), f.fer_partial(j), g.fer_partial(j)) {
            (Ok(lhs), Ok(df), Ok(dg)) => lhs.coeff_eq(&df.mul(&g).add(&f.star().mul(&dg))),
            _ => false,
        };
        c.holds(format!("leibniz n={n} j={j} #{i}"), ok);
    }
}

fn phase_invariance(c: &mut Cases) {
    let opts = Options::default();
    for (m, n) in [(2, 1), (3, 1), (4, 1), (3, 2)] {
        for r in [1.0, 1.5] {
            let cx = ctx(m, n);
            let quadratic = superball_phase(cx, r);
            let linear = match abs_x(cx) {
                Ok(a) => a.sub(&Grassmann::scalar(cx, Expr::float(r))),
                Err(e) => {
                    c.check(format!("({m},{n}) [{e}]"), f64::INFINITY, 1e-6);
                    continue;
                }
            };
            let one = Grassmann::one(cx);
            let box_r = 1.25 * r + 0.05;
            let o = opts.clone().with_box(vec![(-box_r, box_r); m]);
            let pair = |f: &dyn Fn(&Grassmann<Expr>) -> Result<f64>| -> Result<(f64, f64)> {
                Ok((f(&quadratic)?, f(&linear)?))
            };
            for (what, res) in [
                ("volume", pair(&|g| domain_integral(g, &one, &[], &o).map(|v| v.value))),
                ("area", pair(&|g| surface_integral(g, &one, &[], &o).map(|v| v.value))),
            ] {
                let label = format!("({m},{n}) {what} R={r}");
                match res {
                    Ok((a, b)) => c.check(label, (a - b).abs(), 1e-6),
                    Err(e) => c.check(format!("{label} [{e}]"), f64::INFINITY, 1e-6),
                }
            }
        }
    }
}

fn to_mixed(p: &Grassmann<Poly>) -> MixedClifford<Expr> {
    MixedClifford::scalar(from_poly_sf(p))
}

fn stokes(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let opts = Options::default().with_backend(Backend::Grid).with_tol(1e-7);
    for (m, n) in [(2, 0), (2, 1), (3, 1), (2, 2)] {
        let cx = ctx(m, n);
        let g = superball_phase(cx, 1.0);
        for i in 0..10 {
            let f = to_mixed(&random_superpoly(rng, cx, 3, false))
                .add(&to_mixed(&random_superpoly(rng, cx, 2, false)).mul(&MixedClifford::e(cx, m)).expect("product"));
            let mut gg = to_mixed(&random_superpoly(rng, cx, 3, false))
                .add(&to_mixed(&random_superpoly(rng, cx, 2, false)).mul(&MixedClifford::e(cx, 1)).expect("product"));
            if n > 0 {
                let w = to_mixed(&random_superpoly(rng, cx, 2, false)).mul(&MixedClifford::egrave(cx, 1));
                gg = gg.add(&w.expect("product"));
            }
            let label = format!("({m},{n}) #{i}");
            match stokes_check(&f, &gg, &g, &opts) {
                Ok(r) => c.check(label, r.deviation, 1e-4),
                Err(e) => c.check(format!("{label} [{e}]"), f64::INFINITY, 1e-4),
            }
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, m: usize, rmin: f64, rmax: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
    let r = rng.gen_range(rmin..rmax);
    for x in &mut v {
        *x *= r / norm;
    }
    v
}

fn cp(c: &mut Cases, rng: &mut ChaCha8Rng) {
    let opts = Options::default();
    for (m, n) in [(2, 0), (3, 0), (2, 1), (3, 1)] {
        let cx = ctx(m, n);
        let g = superball_phase(cx, 1.0);
        for i in 0..5 {
            let gf = from_poly_sf(&random_superpoly(rng, cx, 3, false));
            for k in 0..6 {
                let inside = k < 3;
                let y = if inside { random_point(rng, m, 0.0, 0.5) } else { random_point(rng, m, 1.5, 2.0) };
                let label = format!("({m},{n}) G#{i} {} y={y:.3?}", if inside { "interior" } else { "exterior" });
                let want = if inside { eval_at(&gf, &y).map(|v| v.body().to_f64()).unwrap_or(f64::NAN) } else { 0.0 };
                let tol = if inside { 1e-3 * (1.0 + want.abs()) } else { 1e-3 };
                match cauchy_pompeiu(&gf, &g, &y, &opts) {
                    Ok(r) => {
                        let others = r
                            .components
                            .iter()
                            .filter(|(key, _)| key.0 != 0 || !key.1.is_empty())
                            .fold(0.0f64, |a, (_, v)| a.max(v.abs()));
                        c.check(label, (r.scalar() - want).abs().max(others), tol)
                    }
                    Err(e) => c.check(format!("{label} [{e}]"), f64::INFINITY, tol),
                }
            }
        }
    }
}

fn special_functions(c: &mut Cases) {
    let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + b.abs());
    // parameter sets of the paraboloid/hyperboloid closed forms
    for big_m in -3i64..=5 {
        let mf = big_m as f64;
        for h in [0.5, 1.0, 2.0] {
            let a = (1.0 - mf) / 2.0;
            let z = -h * h;
            match (hyp2f1(a, 0.5, 1.5, z), hyp2f1_euler(a, 0.5, 1.5, z)) {
                (Ok(s), Ok(e)) => c.check(format!("2F1 hyperboloid M={big_m} h={h}"), rel(s, e), 1e-8),
                _ => c.check(format!("2F1 hyperboloid M={big_m} h={h} [error]"), f64::INFINITY, 1e-8),
            }
            if big_m > 1 {
                let (b, cc, z) = ((mf - 1.0) / 2.0, (mf + 1.0) / 2.0, -4.0 * h);
                match (hyp2f1(-0.5, b, cc, z), hyp2f1_euler(-0.5, b, cc, z)) {
                    (Ok(s), Ok(e)) => c.check(format!("2F1 paraboloid M={big_m} h={h}"), rel(s, e), 1e-8),
                    _ => c.check(format!("2F1 paraboloid M={big_m} h={h} [error]"), f64::INFINITY, 1e-8),
                }
            }
            let b2 = (3.0 - mf) / 2.0;
            let (z1, z2) = (-2.0 * h * h, -h * h);
            match (appell_f1(0.5, -0.5, b2, 1.5, z1, z2), appell_f1_integral(0.5, -0.5, b2, 1.5, z1, z2)) {
                (Ok(s), Ok(i)) => c.check(format!("F1 hyperboloid M={big_m} h={h}"), rel(s, i), 1e-8),
                _ => c.check(format!("F1 hyperboloid M={big_m} h={h} [error]"), f64::INFINITY, 1e-8),
            }
        }
    }
    // Γ(k + 1/2) = (2k)! √π / (4^k k!), Γ(1/2 − k) = (−4)^k k! √π / (2k)!
    let sp = PI.sqrt();
    for k in 0..=15i32 {
        let mut ratio = 1.0; // (2k)!/(4^k k!)
        for i in 1..=k {
            ratio *= (2 * i - 1) as f64 / 2.0;
        }
        let pos = sp * ratio;
        let neg = sp / ratio * if k % 2 == 0 { 1.0 } else { -1.0 };
        for (x, want) in [(k as f64 + 0.5, pos), (0.5 - k as f64, neg)] {
            match gamma(x) {
                Ok(v) => c.check(format!("gamma({x})"), ((v - want) / want).abs(), 1e-13),
                Err(e) => c.check(format!("gamma({x}) [{e}]"), f64::INFINITY, 1e-13),
            }
        }
    }
}

fn jets(c: &mut Cases, rng: &mut ChaCha8Rng) {
    // inverse_jet ∘ jet is the identity
    for i in 0..100 {
        let order = rng.gen_range(1..=8usize);
        let t0 = rng.gen_range(-1.0..1.0);
        let a: Vec<f64> = (0..5).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let slope = rng.gen_range(1.0..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let x = Expr::var(1);
        let e = Expr::float(a[0])
            .add(&Expr::float(slope).mul(&x))
            .add(&Expr::float(a[1]).mul(&x.mul(&x)))
            .add(&Expr::float(a[2]).mul(&Expr::float(1.0 + a[3]).mul(&x).sin()))
            .add(&Expr::float(a[4]).mul(&x.exp()));
        let label = format!("inverse #{i} order {order}");
        let dev = (|| -> Result<f64> {
            let j = jet_eval(&e, &[x.clone()], t0, order)?;
            let inv = inverse_jet(&j)?;
            let there = j.compose(&inv)?;
            let back = inv.compose(&j)?;
            let mut d: f64 = 0.0;
            for (k, (u, v)) in there.coeffs.iter().zip(&back.coeffs).enumerate() {
                let (wu, wv) = match k {
                    0 => (j.coeffs[0], t0),
                    1 => (1.0, 1.0),
                    _ => (0.0, 0.0),
                };
                d = d.max((u - wu).abs()).max((v - wv).abs());
            }
            Ok(d)
        })();
        match dev {
            Ok(d) => c.check(label, d, 1e-12),
            Err(err) => c.check(format!("{label} [{err}]"), f64::INFINITY, 1e-12),
        }
    }
    // ∫ δ^(j)(R² − |x̲|²) dx = A_m (m/2 − 1)_(j falling) R^(m−2−2j) / 2
    for m in 1..=5usize {
        for j in 0..=3usize {
            for r in [0.5, 1.0, 2.0] {
                let cx = ctx(m, 0);
                let x2 = (1..=m).fold(Expr::int(0), |acc, i| acc.add(&Expr::var(i).mul(&Expr::var(i))));
                let phase = Expr::float(r * r).sub(&x2);
                let mut d = DistributionExpansion::empty(cx, phase);
                d.add_delta(j, Grassmann::one(cx));
                let w = MixedClifford::scalar(Grassmann::one(cx));
                let q = m as f64 / 2.0 - 1.0;
                let falling: f64 = (0..j).map(|i| q - i as f64).product();
                let am = 2.0 * PI.powf(m as f64 / 2.0) / oracle_gamma(m as f64 / 2.0);
                let want = am * falling * r.powf(m as f64 - 2.0 - 2.0 * j as f64) / 2.0;
                let bx = 1.25 * r + 0.05;
                let o = Options::default().with_box(vec![(-bx, bx); m]);
                let v = integrate_distribution(&d, &w, &[], &o).map(|v| v.scalar());
                c.compare(format!("layer m={m} j={j} R={r}"), v, want, 1e-10 * (1.0 + want.abs()));
            }
        }
    }
}
