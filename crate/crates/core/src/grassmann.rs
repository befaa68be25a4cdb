//! The Grassmann algebra G_2n over a coefficient ring.
//!
//! Blades are bitmasks: generator x̀_i is bit i−1, stored in ascending order.

use crate::error::{Error, Result};
use crate::ring::{Bosonic, Coeff};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

pub type Blade = u32;

/// Default cap on n (2^16 blades).
pub const DEFAULT_MAX_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SuperContext {
    pub m: usize,
    pub n: usize,
}

impl SuperContext {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        Self::with_cap(m, n, DEFAULT_MAX_N)
    }

    pub fn with_cap(m: usize, n: usize, max_n: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Context("m must be at least 1".into()));
        }
        if n > max_n || n > 15 {
            return Err(Error::Context(format!("n = {n} exceeds the cap {max_n}")));
        }
        Ok(SuperContext { m, n })
    }

    /// Superdimension M = m − 2n.
    pub fn superdim(&self) -> i64 {
        self.m as i64 - 2 * self.n as i64
    }

    pub fn top_blade(&self) -> Blade {
        ((1u64 << (2 * self.n)) - 1) as Blade
    }

    pub fn check_same(&self, o: &SuperContext) -> Result<()> {
        if self == o {
            Ok(())
        } else {
            Err(Error::Context(format!("({},{}) vs ({},{})", self.m, self.n, o.m, o.n)))
        }
    }
}

pub fn grade(b: Blade) -> u32 {
    b.count_ones()
}

/// (−1)^|A|.
pub fn star_sign(b: Blade) -> i32 {
    if grade(b) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of x̀_A x̀_B after sorting, or None if the blades overlap.
pub fn blade_product_sign(a: Blade, b: Blade) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

pub fn blade_indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|i| b >> i & 1 == 1).map(|i| i + 1).collect()
}

pub fn blade_from_indices(idx: &[usize]) -> Blade {
    idx.iter().fold(0, |acc, &i| acc | 1 << (i - 1))
}

#[derive(Clone, Debug)]
pub struct Grassmann<C> {
    ctx: SuperContext,
    terms: BTreeMap<Blade, C>,
}

impl<C: Coeff> Grassmann<C> {
    pub fn zero(ctx: SuperContext) -> Self {
        Grassmann { ctx, terms: BTreeMap::new() }
    }

    pub fn scalar(ctx: SuperContext, c: C) -> Self {
        Self::term(ctx, 0, c)
    }

    pub fn one(ctx: SuperContext) -> Self {
        Self::scalar(ctx, C::one())
    }

    pub fn term(ctx: SuperContext, blade: Blade, c: C) -> Self {
        let mut g = Self::zero(ctx);
        if !c.is_zero() {
            g.terms.insert(blade, c);
        }
        g
    }

    /// The generator x̀_i, 1 ≤ i ≤ 2n.
    pub fn generator(ctx: SuperContext, i: usize) -> Result<Self> {
        if i == 0 || i > 2 * ctx.n {
            return Err(Error::Index { index: i, max: 2 * ctx.n });
        }
        Ok(Self::term(ctx, 1 << (i - 1), C::one()))
    }

    /// x̀² = Σ x̀_{2j−1} x̀_{2j}.
    pub fn xgrave_square(ctx: SuperContext) -> Self {
        let mut g = Self::zero(ctx);
        for j in 0..ctx.n {
            g.add_term(0b11 << (2 * j), C::one());
        }
        g
    }

    pub fn from_terms(ctx: SuperContext, it: impl IntoIterator<Item = (Blade, C)>) -> Self {
        let mut g = Self::zero(ctx);
        for (b, c) in it {
            g.add_term(b, c);
        }
        g
    }

    pub fn ctx(&self) -> SuperContext {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: Blade) -> C {
        self.terms.get(&b).cloned().unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Blade, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&b) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&b);
                }
            }
            None => {
                self.terms.insert(b, c);
            }
        }
    }

    pub fn body(&self) -> C {
        self.coeff(0)
    }

    pub fn nilpotent(&self) -> Self {
        let mut g = self.clone();
        g.terms.remove(&0);
        g
    }

    /// (body, nilpotent part).
    pub fn body_nil(&self) -> (C, Self) {
        (self.body(), self.nilpotent())
    }

    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|&b| grade(b) % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|&b| grade(b) % 2 == 1)
    }

    pub fn require_even(&self, what: &str) -> Result<()> {
        if self.is_even() {
            Ok(())
        } else {
            Err(Error::Parity(format!("{what} must be even")))
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.ctx, o.ctx, "Grassmann context mismatch");
        let mut g = self.clone();
        for (&b, c) in &o.terms {
            g.add_term(b, c.clone());
        }
        g
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.ctx, o.ctx, "Grassmann context mismatch");
        let mut g = Self::zero(self.ctx);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &o.terms {
                if let Some(s) = blade_product_sign(a, b) {
                    let c = ca.mul(cb);
                    g.add_term(a | b, if s < 0 { c.neg() } else { c });
                }
            }
        }
        g
    }

    /// Checked product.
    pub fn gproduct(&self, o: &Self) -> Result<Self> {
        self.ctx.check_same(&o.ctx)?;
        Ok(self.mul(o))
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.ctx.check_same(&o.ctx)?;
        Ok(self.add(o))
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|v| v.mul(c))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.map(|v| v.scale(r))
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&C::from_int(k))
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Self::from_terms(self.ctx, self.terms.iter().map(|(&b, c)| (b, f(c))))
    }

    pub fn try_map(&self, f: impl Fn(&C) -> Result<C>) -> Result<Self> {
        let mut g = Self::zero(self.ctx);
        for (&b, c) in &self.terms {
            g.add_term(b, f(c)?);
        }
        Ok(g)
    }

    /// Change the coefficient ring.
    pub fn convert<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Grassmann<D> {
        Grassmann::from_terms(self.ctx, self.terms.iter().map(|(&b, c)| (b, f(c))))
    }

    pub fn try_convert<D: Coeff>(&self, f: impl Fn(&C) -> Option<D>) -> Option<Grassmann<D>> {
        let mut g = Grassmann::zero(self.ctx);
        for (&b, c) in &self.terms {
            g.add_term(b, f(c)?);
        }
        Some(g)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.ctx);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// F* : blade coefficients times (−1)^|A|.
    pub fn star(&self) -> Self {
        Self::from_terms(
            self.ctx,
            self.terms.iter().map(|(&b, c)| (b, if star_sign(b) < 0 { c.neg() } else { c.clone() })),
        )
    }

    /// Left derivative ∂_{x̀_j}.
    pub fn fer_partial(&self, j: usize) -> Result<Self> {
        if j == 0 || j > 2 * self.ctx.n {
            return Err(Error::Index { index: j, max: 2 * self.ctx.n });
        }
        let bit = 1 << (j - 1);
        let mut g = Self::zero(self.ctx);
        for (&b, c) in &self.terms {
            if b & bit != 0 {
                let before = (b & (bit - 1)).count_ones();
                g.add_term(b & !bit, if before % 2 == 1 { c.neg() } else { c.clone() });
            }
        }
        Ok(g)
    }

    /// Right derivative F∂_{x̀_j} = −∂_{x̀_j}[F*].
    pub fn fer_partial_right(&self, j: usize) -> Result<Self> {
        Ok(self.star().fer_partial(j)?.neg())
    }

    /// Coefficient of x̀_1⋯x̀_2n.
    pub fn top_coeff(&self) -> C {
        self.coeff(self.ctx.top_blade())
    }

    /// ∫_B as (π^(−n), top coefficient); the product is the Berezin integral.
    pub fn berezin_parts(&self) -> (f64, C) {
        (PI.powi(-(self.ctx.n as i32)), self.top_coeff())
    }

    pub fn coeff_eq(&self, o: &Self) -> bool {
        if self.ctx != o.ctx {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter().all(|&b| self.coeff(b).coeff_eq(&o.coeff(b)))
    }
}

impl<C: Bosonic> Grassmann<C> {
    pub fn bos_partial(&self, i: usize) -> Result<Self> {
        if i == 0 || i > self.ctx.m {
            return Err(Error::Index { index: i, max: self.ctx.m });
        }
        Ok(self.map(|c| c.diff(i)))
    }
}

impl Grassmann<crate::scalar::Scalar> {
    /// π^(−n) × top coefficient.
    pub fn berezin(&self) -> f64 {
        let (f, c) = self.berezin_parts();
        f * c.to_f64()
    }
}

impl<C: Coeff> PartialEq for Grassmann<C> {
    fn eq(&self, o: &Self) -> bool {
        self.coeff_eq(o)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Grassmann<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (&b, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for i in blade_indices(b) {
                write!(f, "*q{i}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    type G = Grassmann<Scalar>;

    fn ctx(n: usize) -> SuperContext {
        SuperContext::new(1, n).unwrap()
    }

    fn q(n: usize, i: usize) -> G {
        G::generator(ctx(n), i).unwrap()
    }

    #[test]
    fn anticommute_and_nilpotent() {
        let p = q(1, 1).mul(&q(1, 2));
        assert_eq!(p, G::term(ctx(1), 0b11, Scalar::int(1)));
        assert_eq!(q(1, 2).mul(&q(1, 1)), p.neg());
        assert!(p.mul(&q(1, 1)).is_zero());
    }

    #[test]
    fn xgrave_power_is_factorial_top() {
        for n in 1..=3usize {
            let x2 = G::xgrave_square(ctx(n));
            let fact: i64 = (1..=n as i64).product();
            assert_eq!(x2.pow(n as u32), G::term(ctx(n), ctx(n).top_blade(), Scalar::int(fact)));
        }
    }

    #[test]
    fn berezin_values() {
        let c = ctx(1);
        let e = G::scalar(c, Scalar::int(5)).add(&G::term(c, 0b11, Scalar::int(3)));
        assert!((e.berezin() - 3.0 / PI).abs() < 1e-15);
        assert_eq!(G::one(c).berezin(), 0.0);
    }

    #[test]
    fn body_split_and_star() {
        let c = ctx(2);
        let e = G::scalar(c, Scalar::int(3)).add(&G::term(c, 0b11, Scalar::int(2)));
        let (b, nil) = e.body_nil();
        assert_eq!(b, Scalar::int(3));
        assert_eq!(nil, G::term(c, 0b11, Scalar::int(2)));
        assert_eq!(star_sign(0), 1);
        assert_eq!(star_sign(0b1), -1);
        assert_eq!(star_sign(0b11), 1);
    }

    #[test]
    fn fermionic_derivative_signs() {
        let p = q(1, 1).mul(&q(1, 2));
        assert_eq!(p.fer_partial(2).unwrap(), q(1, 1).neg());
        assert_eq!(p.fer_partial(1).unwrap(), q(1, 2));
    }

    #[test]
    fn context_mismatch_is_error() {
        assert!(matches!(q(1, 1).gproduct(&q(2, 1)), Err(Error::Context(_))));
    }
}
