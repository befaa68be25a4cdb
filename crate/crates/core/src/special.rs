//! Gamma, hypergeometric functions and the closed-form volume/area catalog.

use crate::error::{Error, Result};
use crate::grassmann::Grassmann;
use crate::poly::Poly;
use crate::quad::tanh_sinh_01;
use std::f64::consts::PI;

const SERIES_CAP: usize = 1_000_000;

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

/// True when Γ has a pole at x (x a nonpositive integer).
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && is_integer(x)
}

/// Γ(x). Integers and half-integers use exact recurrences from Γ(1) and Γ(1/2).
pub fn gamma(x: f64) -> Result<f64> {
    if is_gamma_pole(x) {
        return Err(Error::Pole(x));
    }
    if is_integer(2.0 * x) && x.abs() < 170.0 {
        let (mut v, mut t) = if is_integer(x) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
        while t < x {
            v *= t;
            t += 1.0;
        }
        while t > x {
            t -= 1.0;
            v /= t;
        }
        return Ok(v);
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        0.0
    } else {
        1.0 / gamma(x).expect("not a pole")
    }
}

/// Rising factorial (q)_j = q(q+1)…(q+j−1).
pub fn pochhammer(q: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, k| acc * (q + k as f64))
}

/// Area of the unit sphere S^(m−1), 2π^(m/2)/Γ(m/2).
pub fn sphere_area(m: f64) -> f64 {
    2.0 * PI.powf(m / 2.0) * rgamma(m / 2.0)
}

fn nonpositive_integer(x: f64) -> bool {
    is_gamma_pole(x)
}

/// Gauss series Σ (a)_k(b)_k/((c)_k k!) z^k, summed until the terms are
/// below 1e−16 of the partial sum.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Parameter(format!("₂F₁ with c = {c}")));
    }
    let terminating = nonpositive_integer(a) || nonpositive_integer(b);
    if !terminating && z.abs() >= 1.0 {
        return Err(Error::Parameter(format!("₂F₁ series diverges at z = {z}")));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..SERIES_CAP {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 || (term.abs() < 1e-17 * sum.abs() && k > 2) {
            return Ok(sum);
        }
    }
    Err(Error::Parameter("₂F₁ series did not converge".into()))
}

/// Euler's integral Γ(c)/(Γ(b)Γ(c−b)) ∫₀¹ t^(b−1)(1−t)^(c−b−1)(1−zt)^(−a) dt, c > b > 0, z < 1.
pub fn hyp2f1_euler(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(c > b && b > 0.0) || z >= 1.0 {
        return Err(Error::Parameter(format!("Euler integral needs c > b > 0, z < 1 (b={b}, c={c}, z={z})")));
    }
    let pref = gamma(c)? / (gamma(b)? * gamma(c - b)?);
    let (v, _) = tanh_sinh_01(|t, u| Ok(t.powf(b - 1.0) * u.powf(c - b - 1.0) * (1.0 - z * t).powf(-a)), 1e-14)?;
    Ok(pref * v)
}

/// ₂F₁(a, b; c; z) for z < 1. Series near the origin, Pfaff's transformation
/// for z < −1/2, Euler's integral when the transformed series converges slowly.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Parameter(format!("₂F₁ with c = {c}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if nonpositive_integer(a) || nonpositive_integer(b) || z.abs() < 0.5 {
        return hyp2f1_series(a, b, c, z);
    }
    if z >= 1.0 {
        return Err(Error::Parameter(format!("₂F₁ outside z < 1: {z}")));
    }
    if z > 0.0 {
        if c > b && b > 0.0 {
            return hyp2f1_euler(a, b, c, z);
        }
        if c > a && a > 0.0 {
            return hyp2f1_euler(b, a, c, z);
        }
        return hyp2f1_series(a, b, c, z);
    }
    // Pfaff: (1−z)^(−a) ₂F₁(a, c−b; c; z/(z−1)), or the same with a, b swapped.
    let w = z / (z - 1.0);
    if nonpositive_integer(c - b) {
        return Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?);
    }
    if nonpositive_integer(c - a) {
        return Ok((1.0 - z).powf(-b) * hyp2f1_series(b, c - a, c, w)?);
    }
    if w <= 0.9 {
        return Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?);
    }
    if c > b && b > 0.0 {
        return hyp2f1_euler(a, b, c, z);
    }
    if c > a && a > 0.0 {
        return hyp2f1_euler(b, a, c, z);
    }
    Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?)
}

/// Appell double series Σ (a)_{j+k}(b1)_j(b2)_k/((c)_{j+k} j! k!) z1^j z2^k.
pub fn appell_f1_series(a: f64, b1: f64, b2: f64, c: f64, z1: f64, z2: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Parameter(format!("F₁ with c = {c}")));
    }
    if z1.abs() >= 1.0 || z2.abs() >= 1.0 {
        return Err(Error::Parameter(format!("F₁ double series diverges at ({z1}, {z2})")));
    }
    // Σ_j (a)_j(b1)_j/((c)_j j!) z1^j · ₂F₁(a+j, b2; c+j; z2)
    let mut sum = 0.0;
    let mut outer = 1.0;
    for j in 0..SERIES_CAP {
        let jf = j as f64;
        let inner = hyp2f1_series(a + jf, b2, c + jf, z2)?;
        let term = outer * inner;
        sum += term;
        if outer == 0.0 || (term.abs() < 1e-17 * sum.abs() && j > 2) {
            return Ok(sum);
        }
        outer *= (a + jf) * (b1 + jf) / ((c + jf) * (jf + 1.0)) * z1;
    }
    Err(Error::Parameter("F₁ series did not converge".into()))
}

/// Γ(c)/(Γ(a)Γ(c−a)) ∫₀¹ t^(a−1)(1−t)^(c−a−1)(1−z1 t)^(−b1)(1−z2 t)^(−b2) dt, c > a > 0.
pub fn appell_f1_integral(a: f64, b1: f64, b2: f64, c: f64, z1: f64, z2: f64) -> Result<f64> {
    if !(c > a && a > 0.0) || z1 >= 1.0 || z2 >= 1.0 {
        return Err(Error::Parameter(format!("F₁ integral needs c > a > 0 and z < 1 (a={a}, c={c})")));
    }
    let pref = gamma(c)? / (gamma(a)? * gamma(c - a)?);
    let (v, _) = tanh_sinh_01(
        |t, u| Ok(t.powf(a - 1.0) * u.powf(c - a - 1.0) * (1.0 - z1 * t).powf(-b1) * (1.0 - z2 * t).powf(-b2)),
        1e-14,
    )?;
    Ok(pref * v)
}

/// Appell F₁ for z1, z2 ≤ 0.
///
/// Uses the series near the origin, otherwise the transformation
/// F₁(a;b1,b2;c;x,y) = (1−x)^(−b1)(1−y)^(−b2) F₁(c−a;b1,b2;c;x/(x−1),y/(y−1)),
/// falling back to the integral representation when the transformed arguments approach 1.
pub fn appell_f1(a: f64, b1: f64, b2: f64, c: f64, z1: f64, z2: f64) -> Result<f64> {
    if nonpositive_integer(c) {
        return Err(Error::Parameter(format!("F₁ with c = {c}")));
    }
    if z1 > 0.0 || z2 > 0.0 {
        return Err(Error::Parameter(format!("F₁ implemented for z ≤ 0, got ({z1}, {z2})")));
    }
    if b2 == 0.0 {
        return hyp2f1(a, b1, c, z1);
    }
    if b1 == 0.0 {
        return hyp2f1(a, b2, c, z2);
    }
    if z1.abs().max(z2.abs()) < 0.5 {
        return appell_f1_series(a, b1, b2, c, z1, z2);
    }
    let (w1, w2) = (z1 / (z1 - 1.0), z2 / (z2 - 1.0));
    let pref = (1.0 - z1).powf(-b1) * (1.0 - z2).powf(-b2);
    if w1.max(w2) <= 0.9 {
        return Ok(pref * appell_f1_series(c - a, b1, b2, c, w1, w2)?);
    }
    if c > a && a > 0.0 {
        return appell_f1_integral(a, b1, b2, c, z1, z2);
    }
    Ok(pref * appell_f1_series(c - a, b1, b2, c, w1, w2)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Superball,
    Supersphere,
    Paraboloid,
    Hyperboloid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Volume,
    Area,
}

impl Shape {
    pub fn name(self) -> &'static str {
        match self {
            Shape::Superball => "superball",
            Shape::Supersphere => "supersphere",
            Shape::Paraboloid => "paraboloid",
            Shape::Hyperboloid => "hyperboloid",
        }
    }

    pub fn from_name(s: &str) -> Option<Shape> {
        Some(match s {
            "superball" | "ball" => Shape::Superball,
            "supersphere" | "sphere" => Shape::Supersphere,
            "paraboloid" => Shape::Paraboloid,
            "hyperboloid" => Shape::Hyperboloid,
            _ => return None,
        })
    }
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Volume => "volume",
            Kind::Area => "area",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        Some(match s {
            "volume" => Kind::Volume,
            "area" | "surface" => Kind::Area,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormValue {
    pub value: f64,
    pub formula: &'static str,
    pub m: usize,
    pub n: usize,
    pub param: f64,
}

/// M ∈ 2k − 2ℕ, i.e. M ≤ 2k − 2 and M ≡ 2k (mod 2), with ℕ = {1, 2, …}.
fn in_shifted_even(big_m: i64, k: i64) -> bool {
    big_m <= k - 2 && (big_m - k).rem_euclid(2) == 0
}

/// Closed-form volumes and areas. Superball/supersphere take the radius R,
/// paraboloid the height h, hyperboloid the half height h.
pub fn catalog(shape: Shape, kind: Kind, m: usize, n: usize, param: f64) -> Result<ClosedFormValue> {
    if m == 0 {
        return Err(Error::Parameter("m must be positive".into()));
    }
    if !(param > 0.0) {
        return Err(Error::Parameter(format!("shape parameter must be positive, got {param}")));
    }
    let big_m = m as i64 - 2 * n as i64;
    let mf = big_m as f64;
    let p = param;
    let (value, formula) = match (shape, kind) {
        (Shape::Superball, Kind::Volume) | (Shape::Supersphere, Kind::Volume) => {
            if in_shifted_even(big_m, 0) {
                (0.0, "superball-volume-zero")
            } else {
                (PI.powf(mf / 2.0) * rgamma(mf / 2.0 + 1.0) * p.powf(mf), "superball-volume")
            }
        }
        (Shape::Superball, Kind::Area) | (Shape::Supersphere, Kind::Area) => {
            if in_shifted_even(big_m, 2) {
                (0.0, "supersphere-area-zero")
            } else {
                (sphere_area(mf) * p.powf(mf - 1.0), "supersphere-area")
            }
        }
        (Shape::Paraboloid, _) | (Shape::Hyperboloid, _) if m < 2 => {
            return Err(Error::Parameter(format!("{} needs m ≥ 2", shape.name())));
        }
        (Shape::Paraboloid, Kind::Volume) => {
            if in_shifted_even(big_m, 1) {
                (0.0, "paraboloid-volume-zero")
            } else {
                (PI.powf((mf - 1.0) / 2.0) * rgamma((mf + 3.0) / 2.0) * p.powf((mf + 1.0) / 2.0), "paraboloid-volume")
            }
        }
        (Shape::Paraboloid, Kind::Area) => {
            if big_m <= 1 {
                return Err(Error::Parameter(format!(
                    "paraboloid area closed form converges only for M > 1 (M = {big_m})"
                )));
            }
            let f = hyp2f1(-0.5, (mf - 1.0) / 2.0, (mf + 1.0) / 2.0, -4.0 * p)?;
            (PI.powf((mf - 1.0) / 2.0) * rgamma((mf + 1.0) / 2.0) * p.powf((mf - 1.0) / 2.0) * f, "paraboloid-area")
        }
        (Shape::Hyperboloid, Kind::Volume) => {
            if in_shifted_even(big_m, 1) {
                (0.0, "hyperboloid-volume-zero")
            } else {
                let f = hyp2f1((1.0 - mf) / 2.0, 0.5, 1.5, -p * p)?;
                (2.0 * p * PI.powf((mf - 1.0) / 2.0) * rgamma((mf + 1.0) / 2.0) * f, "hyperboloid-volume")
            }
        }
        (Shape::Hyperboloid, Kind::Area) => {
            if in_shifted_even(big_m, 3) {
                (0.0, "hyperboloid-area-zero")
            } else {
                let f = appell_f1(0.5, -0.5, (3.0 - mf) / 2.0, 1.5, -2.0 * p * p, -p * p)?;
                (4.0 * p * PI.powf((mf - 1.0) / 2.0) * rgamma((mf - 1.0) / 2.0) * f, "hyperboloid-area")
            }
        }
    };
    Ok(ClosedFormValue { value, formula, m, n, param })
}

/// The paraboloid area expression continued to every M where it is finite.
/// At M = 1 it equals 1 for all h, which is what the full-space integral gives.
pub fn paraboloid_area_continued(m: usize, n: usize, h: f64) -> Result<f64> {
    let mf = m as f64 - 2.0 * n as f64;
    let f = hyp2f1(-0.5, (mf - 1.0) / 2.0, (mf + 1.0) / 2.0, -4.0 * h)?;
    Ok(PI.powf((mf - 1.0) / 2.0) * rgamma((mf + 1.0) / 2.0) * h.powf((mf - 1.0) / 2.0) * f)
}

/// Σ_j (−1)^j 2π^(M/2)/(4^j j! Γ(j+M/2)) (Δ^j P)(0), with terms at Γ poles dropped.
pub fn pizzetti(p: &Grassmann<Poly>) -> Result<f64> {
    let ctx = p.ctx();
    let mf = ctx.m as f64 - 2.0 * ctx.n as f64;
    let origin = vec![0.0; ctx.m];
    let mut cur = p.clone();
    let mut total = 0.0;
    let mut j = 0usize;
    while !cur.is_zero() {
        let at0 = cur.body().eval(&origin);
        if at0 != 0.0 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let denom = 4f64.powi(j as i32) * crate::ring::factorial_f64(j);
            total += sign * 2.0 * PI.powf(mf / 2.0) * rgamma(j as f64 + mf / 2.0) / denom * at0;
        }
        cur = crate::superfun::super_laplace(&cur)?;
        j += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gamma_values() {
        assert!(close(gamma(0.5).unwrap(), PI.sqrt(), 1e-15));
        assert!(close(gamma(-1.5).unwrap(), 4.0 * PI.sqrt() / 3.0, 1e-15));
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert_eq!(gamma(-2.0), Err(Error::Pole(-2.0)));
        assert_eq!(pochhammer(3.0, 4), 360.0);
        assert_eq!(pochhammer(-2.0, 0), 1.0);
        assert_eq!(rgamma(0.0), 0.0);
    }

    #[test]
    fn gauss_closed_forms() {
        let h: f64 = 1.0;
        assert!(close(hyp2f1(-1.0, 0.5, 1.5, -h * h).unwrap(), 1.0 + h * h / 3.0, 1e-14));
        let want = (5f64.sqrt() + 2f64.asinh() / 2.0) / 2.0;
        assert!(close(hyp2f1(-0.5, 0.5, 1.5, -4.0).unwrap(), want, 1e-12));
        assert!(close(hyp2f1_euler(-0.5, 0.5, 1.5, -4.0).unwrap(), want, 1e-12));
        assert_eq!(hyp2f1(0.3, 0.7, 1.1, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn appell_closed_forms() {
        let want = (2.0 * 3f64.sqrt() + 2f64.sqrt() * 2f64.sqrt().asinh()) / 4.0;
        assert!(close(appell_f1(0.5, -0.5, 0.0, 1.5, -2.0, -1.0).unwrap(), want, 1e-12));
        assert!(close(appell_f1_integral(0.5, -0.5, 0.0, 1.5, -2.0, -1.0).unwrap(), want, 1e-12));
        assert_eq!(appell_f1(0.5, 0.2, 0.3, 1.5, 0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn catalog_examples() {
        let v = catalog(Shape::Superball, Kind::Volume, 3, 1, 2.0).unwrap().value;
        assert!(close(v, 4.0, 1e-14));
        let a = catalog(Shape::Supersphere, Kind::Area, 4, 1, 1.0).unwrap().value;
        assert!(close(a, 2.0 * PI, 1e-14));
        let hv = catalog(Shape::Hyperboloid, Kind::Volume, 2, 0, 1.0).unwrap().value;
        assert!(close(hv, 2.0 * (2f64.sqrt() + 1f64.asinh()), 1e-12));
        assert_eq!(catalog(Shape::Superball, Kind::Volume, 2, 2, 1.0).unwrap().value, 0.0);
        assert_eq!(catalog(Shape::Supersphere, Kind::Area, 2, 1, 1.0).unwrap().value, 0.0);
        assert_eq!(catalog(Shape::Hyperboloid, Kind::Area, 3, 1, 1.0).unwrap().value, 0.0);
        assert!(catalog(Shape::Paraboloid, Kind::Area, 3, 1, 1.0).is_err());
        let pa = catalog(Shape::Paraboloid, Kind::Area, 2, 0, 1.0).unwrap().value;
        assert!(close(pa, 5f64.sqrt() + 2f64.asinh() / 2.0, 1e-12));
    }
}
