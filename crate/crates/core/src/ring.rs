//! Coefficient rings shared by the Grassmann, distribution and Clifford layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::fmt::Debug;

pub trait Coeff: Clone + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    /// Equality in the ring's own sense: exact for rationals and polynomials,
    /// tolerance-based once floating point is involved.
    fn coeff_eq(&self, o: &Self) -> bool;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn from_int(k: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(k)))
    }
    fn scale(&self, r: &BigRational) -> Self {
        if r.is_one() {
            return self.clone();
        }
        self.mul(&Self::from_rational(r))
    }
}

/// Coefficients that are functions of the bosonic variables.
pub trait Bosonic: Coeff {
    /// Partial derivative in x_i (1-based).
    fn diff(&self, i: usize) -> Self;
    /// True when the value does not depend on any x_i.
    fn is_constant(&self) -> bool;
}

/// Division by a phase body, used to apply δ^(j)(g₀)·g₀ = −j·δ^(j−1)(g₀).
pub trait PhaseDivide: Coeff {
    /// Returns (q, r) with self = q·divisor + r and r reduced, when the ring supports it.
    fn divide_by(&self, divisor: &Self) -> Option<(Self, Self)>;
}

pub fn factorial(k: usize) -> BigRational {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

pub fn factorial_f64(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

pub fn binomial(n: usize, k: usize) -> BigRational {
    if k > n {
        return BigRational::from_integer(BigInt::from(0));
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}
