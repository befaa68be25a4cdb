//! Exact multivariate polynomials over ℚ.
//!
//! Monomials are exponent vectors with trailing zeros trimmed, ordered by
//! graded lexicographic order, so the leading term is the last map entry.

use crate::ring::{Bosonic, Coeff, PhaseDivide};
use crate::scalar::rational_to_f64;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i];
        e[i - 1] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let len = self.0.len().max(o.0.len());
        let e = (0..len)
            .map(|i| self.0.get(i).unwrap_or(&0) + o.0.get(i).unwrap_or(&0))
            .collect();
        Monomial::new(e)
    }

    fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().enumerate().all(|(i, &e)| e <= o.0.get(i).copied().unwrap_or(0))
    }

    fn quotient(&self, d: &Monomial) -> Monomial {
        Monomial::new(
            self.0
                .iter()
                .enumerate()
                .map(|(i, &e)| e - d.0.get(i).copied().unwrap_or(0))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            let len = self.0.len().max(o.0.len());
            for i in 0..len {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = o.0.get(i).copied().unwrap_or(0);
                if a != b {
                    return a.cmp(&b);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(i: usize) -> Self {
        let mut p = Poly::default();
        p.terms.insert(Monomial::var(i), BigRational::one());
        p
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::default();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest variable index that occurs.
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = rational_to_f64(c);
                for (i, &e) in m.0.iter().enumerate() {
                    v *= x[i].powi(e as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut s = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                v *= num_traits::pow::Pow::pow(&x[i], e);
            }
            s += v;
        }
        s
    }

    /// Multivariate division by a single polynomial; the remainder is unique
    /// because a single generator is its own Gröbner basis.
    pub fn div_rem(&self, d: &Poly) -> Option<(Poly, Poly)> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut p = self.clone();
        let mut q = Poly::default();
        let mut r = Poly::default();
        while let Some((lm, lc)) = p.leading() {
            let (lm, lc) = (lm.clone(), lc.clone());
            if dm.divides(&lm) {
                let tm = lm.quotient(&dm);
                let tc = &lc / &dc;
                q.add_term(tm.clone(), tc.clone());
                let t = Poly::from_terms([(tm, tc)]);
                p = p.sub(&t.mul(d));
            } else {
                r.add_term(lm.clone(), lc);
                p.terms.remove(&lm);
            }
        }
        Some((q, r))
    }
}

impl Coeff for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
    fn mul(&self, o: &Self) -> Self {
        let mut p = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                p.add_term(m1.mul(m2), c1 * c2);
            }
        }
        p
    }
    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn from_rational(r: &BigRational) -> Self {
        Poly::constant(r.clone())
    }
    fn coeff_eq(&self, o: &Self) -> bool {
        self == o
    }
}

impl Bosonic for Poly {
    fn diff(&self, i: usize) -> Self {
        let mut p = Poly::default();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut ex = m.0.clone();
            ex[i - 1] -= 1;
            p.add_term(Monomial::new(ex), c * BigRational::from_integer(BigInt::from(e)));
        }
        p
    }

    fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }
}

impl PhaseDivide for Poly {
    fn divide_by(&self, divisor: &Self) -> Option<(Self, Self)> {
        if divisor.as_constant().is_some() {
            return None;
        }
        self.div_rem(divisor)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_integer() {
                write!(f, "{}", c.numer())?;
            } else {
                write!(f, "({}/{})", c.numer(), c.denom())?;
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn x(i: usize) -> Poly {
        Poly::var(i)
    }

    #[test]
    fn division_recovers_multiple() {
        let g = x(1).mul(&x(1)).add(&x(2).mul(&x(2))).sub(&Poly::one());
        let q = x(1).add(&Poly::from_int(3));
        let r = x(2);
        let p = q.mul(&g).add(&r);
        let (q2, r2) = p.div_rem(&g).unwrap();
        assert_eq!(q2.mul(&g).add(&r2), p);
        assert_eq!(p.sub(&r2).div_rem(&g).unwrap().1, Poly::zero());
    }

    #[test]
    fn derivative_and_eval() {
        let p = x(1).pow(3).scale(&rat(1, 2)).add(&x(2));
        assert_eq!(p.diff(1), x(1).pow(2).scale(&rat(3, 2)));
        assert!((p.eval(&[2.0, 1.0]) - 5.0).abs() < 1e-15);
    }
}
