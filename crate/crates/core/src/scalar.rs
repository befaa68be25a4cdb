//! Real scalars that stay exact (rational) as long as the inputs are rational.

use crate::ring::Coeff;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Absolute tolerance used when at least one side of a comparison is floating point.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn int(k: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn float(x: f64) -> Self {
        Scalar::Float(x)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Integer value, if the scalar is an exact integer.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Scalar::Exact(r) if r.is_integer() => r.to_integer().to_i64(),
            _ => None,
        }
    }

    pub fn recip(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(r) if !r.is_zero() => Some(Scalar::Exact(r.recip())),
            Scalar::Float(x) if *x != 0.0 => Some(Scalar::Float(1.0 / x)),
            _ => None,
        }
    }

    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        o.recip().map(|r| self.mul(&r))
    }

    /// Integer power; exact for exact bases.
    pub fn powi(&self, k: i64) -> Option<Scalar> {
        match self {
            Scalar::Exact(r) => {
                if k < 0 && r.is_zero() {
                    return None;
                }
                Some(Scalar::Exact(num_traits::pow::Pow::pow(r, k as i32)))
            }
            Scalar::Float(x) => Some(Scalar::Float(x.powi(k as i32))),
        }
    }

    /// Real power. Stays exact when the base is 1 or the exponent is an integer,
    /// or when the base is a perfect square and the exponent a half-integer.
    pub fn powr(&self, p: &Scalar) -> Option<Scalar> {
        if let Some(k) = p.as_integer() {
            return self.powi(k);
        }
        if let (Scalar::Exact(b), Scalar::Exact(e)) = (self, p) {
            if b.is_one() {
                return Some(Scalar::int(1));
            }
            let two_e = e * BigRational::from_integer(BigInt::from(2));
            if two_e.is_integer() && b.is_positive() {
                if let Some(root) = exact_sqrt(b) {
                    return Scalar::Exact(root).powi(two_e.to_integer().to_i64()?);
                }
            }
        }
        let b = self.to_f64();
        if b < 0.0 {
            return None;
        }
        Some(Scalar::Float(b.powf(p.to_f64())))
    }
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

/// Best rational reading of a decimal literal such as `0.125`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let den = num_traits::pow::pow(BigInt::from(10), frac_part.len());
    Some(BigRational::new(num, den))
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::int(0)
    }
    fn one() -> Self {
        Scalar::int(1)
    }
    fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }
    fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Float(self.to_f64() + o.to_f64()),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => Scalar::Float(self.to_f64() * o.to_f64()),
        }
    }
    fn neg(&self) -> Self {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }
    fn from_rational(r: &BigRational) -> Self {
        Scalar::Exact(r.clone())
    }
    fn coeff_eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_f64() - o.to_f64()).abs() <= FLOAT_TOL,
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Self) -> bool {
        self.coeff_eq(o)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<i64> for Scalar {
    fn from(k: i64) -> Self {
        Scalar::int(k)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::ratio(2, 3);
        assert!(a.add(&b).is_exact());
        assert_eq!(a.add(&b), Scalar::int(1));
    }

    #[test]
    fn float_contaminates() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::float(0.5);
        assert!(!a.mul(&b).is_exact());
        assert!(a.mul(&b).coeff_eq(&Scalar::float(1.0 / 6.0)));
    }

    #[test]
    fn half_powers_of_squares() {
        let r = Scalar::ratio(9, 4).powr(&Scalar::ratio(-1, 2)).unwrap();
        assert_eq!(r.as_exact().cloned(), Some(BigRational::new(2.into(), 3.into())));
        assert!(Scalar::int(2).powr(&Scalar::ratio(1, 2)).unwrap().coeff_eq(&Scalar::float(2f64.sqrt())));
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(parse_decimal("0.125"), Some(BigRational::new(1.into(), 8.into())));
        assert_eq!(parse_decimal("12"), Some(BigRational::from_integer(12.into())));
    }
}
