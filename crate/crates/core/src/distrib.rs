//! Superdistributions H(±g) and δ^(k)(g) as finite expansions over the body g₀.
//!
//! An expansion is c_H·H(s·g₀) + Σ_j c_j·δ^(j)(g₀); the δ terms always refer
//! to g₀ itself, never to s·g₀.

use crate::error::{Error, Result};
use crate::grassmann::{Grassmann, SuperContext};
use crate::ring::{factorial, Bosonic, Coeff, PhaseDivide};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Extra δ-orders allowed beyond n.
pub const ORDER_BUDGET: usize = 8;

#[derive(Clone, Debug)]
pub struct DistributionExpansion<C: Coeff> {
    pub ctx: SuperContext,
    pub phase_body: C,
    pub phase_sign: i32,
    pub heaviside: Option<Grassmann<C>>,
    pub delta: BTreeMap<usize, Grassmann<C>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Bos(usize),
    Fer(usize),
}

fn split_phase<C: Bosonic>(g: &Grassmann<C>) -> Result<(C, Grassmann<C>)> {
    g.require_even("phase")?;
    let (g0, nil) = g.body_nil();
    if g0.is_constant() {
        return Err(Error::Parameter("phase body must depend on the bosonic variables".into()));
    }
    Ok((g0, nil))
}

impl<C: Bosonic> DistributionExpansion<C> {
    pub fn empty(ctx: SuperContext, phase_body: C) -> Self {
        DistributionExpansion { ctx, phase_body, phase_sign: 1, heaviside: None, delta: BTreeMap::new() }
    }

    fn max_order(&self) -> usize {
        self.ctx.n + ORDER_BUDGET
    }

    pub fn add_delta(&mut self, j: usize, c: Grassmann<C>) {
        if c.is_zero() {
            return;
        }
        let e = self.delta.entry(j).or_insert_with(|| Grassmann::zero(c.ctx()));
        *e = e.add(&c);
        if e.is_zero() {
            self.delta.remove(&j);
        }
    }

    /// δ^(k)(g) = Σ_j 𝐠^j/j!·δ^(k+j)(g₀).
    pub fn delta(g: &Grassmann<C>, k: usize) -> Result<Self> {
        let (g0, nil) = split_phase(g)?;
        let ctx = g.ctx();
        let mut d = Self::empty(ctx, g0);
        let mut power = Grassmann::one(ctx);
        for j in 0..=ctx.n {
            if power.is_zero() {
                break;
            }
            d.add_delta(k + j, power.scale_rational(&factorial(j).recip()));
            power = power.mul(&nil);
        }
        if d.delta.keys().any(|&j| j > d.max_order()) {
            return Err(Error::Degree(format!("δ order above {}", d.max_order())));
        }
        Ok(d)
    }

    /// H(s·g) = H(s·g₀) + Σ_{j≥1} s·𝐠^j/j!·δ^(j−1)(g₀).
    pub fn heaviside(g: &Grassmann<C>, sign: i32) -> Result<Self> {
        let (g0, nil) = split_phase(g)?;
        let ctx = g.ctx();
        let mut d = Self::empty(ctx, g0);
        d.phase_sign = sign.signum();
        d.heaviside = Some(Grassmann::one(ctx));
        let mut power = nil.clone();
        for j in 1..=ctx.n {
            if power.is_zero() {
                break;
            }
            d.add_delta(j - 1, power.scale_rational(&factorial(j).recip()).scale_int(sign.signum() as i64));
            power = power.mul(&nil);
        }
        Ok(d)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Grassmann<C>) -> Grassmann<C>) -> Self {
        let mut d = Self::empty(self.ctx, self.phase_body.clone());
        d.phase_sign = self.phase_sign;
        d.heaviside = self.heaviside.as_ref().map(&f).filter(|c| !c.is_zero());
        for (&j, c) in &self.delta {
            d.add_delta(j, f(c));
        }
        d
    }

    /// Coefficientwise product c·F, without reduction.
    pub fn multiply_raw(&self, f: &Grassmann<C>) -> Self {
        self.map_coeffs(|c| c.mul(f))
    }

    /// Coefficientwise F·c.
    pub fn multiply_left_raw(&self, f: &Grassmann<C>) -> Self {
        self.map_coeffs(|c| f.mul(c))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if !self.phase_body.coeff_eq(&o.phase_body) {
            return Err(Error::Unsupported("sum of expansions over different phases".into()));
        }
        let mut d = self.clone();
        match (&self.heaviside, &o.heaviside) {
            (Some(a), Some(b)) => {
                if self.phase_sign != o.phase_sign {
                    return Err(Error::Unsupported("sum of H(g₀) and H(−g₀) terms".into()));
                }
                d.heaviside = Some(a.add(b)).filter(|c| !c.is_zero());
            }
            (None, Some(b)) => {
                d.heaviside = Some(b.clone());
                d.phase_sign = o.phase_sign;
            }
            _ => {}
        }
        for (&j, c) in &o.delta {
            d.add_delta(j, c.clone());
        }
        Ok(d)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    /// δ^(j)(−g₀) = (−1)^j δ^(j)(g₀); H(s g₀) = H((−s)(−g₀)).
    pub fn negate_phase(&self) -> Self {
        let mut d = Self::empty(self.ctx, self.phase_body.neg());
        d.phase_sign = -self.phase_sign;
        d.heaviside = self.heaviside.clone();
        for (&j, c) in &self.delta {
            d.add_delta(j, if j % 2 == 1 { c.neg() } else { c.clone() });
        }
        d
    }

    /// Rewrite over the body g₀ when the current body is h₀·g₀ for a nonzero rational h₀:
    /// δ^(j)(h₀g₀) = h₀^(−(j+1)) δ^(j)(g₀) and H(s h₀ g₀) = H(s·sign(h₀)·g₀).
    pub fn rebase(&self, h0: &BigRational, g0: C) -> Result<Self> {
        if h0.is_zero() {
            return Err(Error::Refused("rebasing by a zero factor".into()));
        }
        if !self.phase_body.coeff_eq(&g0.scale(h0)) {
            return Err(Error::Parameter("phase body is not h₀·g₀".into()));
        }
        let mut d = Self::empty(self.ctx, g0);
        d.phase_sign = if h0.is_negative() { -self.phase_sign } else { self.phase_sign };
        d.heaviside = self.heaviside.clone();
        let inv = h0.recip();
        for (&j, c) in &self.delta {
            let f = num_traits::pow::Pow::pow(&inv, (j + 1) as u32);
            d.add_delta(j, c.scale_rational(&f));
        }
        Ok(d)
    }

    /// ∂ of the expansion in one direction (product and chain rules).
    pub fn diff(&self, dir: Direction) -> Result<Self> {
        let mut d = Self::empty(self.ctx, self.phase_body.clone());
        d.phase_sign = self.phase_sign;
        match dir {
            Direction::Fer(j) => {
                if let Some(h) = &self.heaviside {
                    d.heaviside = Some(h.fer_partial(j)?).filter(|c| !c.is_zero());
                }
                for (&k, c) in &self.delta {
                    d.add_delta(k, c.fer_partial(j)?);
                }
            }
            Direction::Bos(i) => {
                let dg0 = self.phase_body.diff(i);
                let dg0_sf = Grassmann::scalar(self.ctx, dg0);
                if let Some(h) = &self.heaviside {
                    d.heaviside = Some(h.bos_partial(i)?).filter(|c| !c.is_zero());
                    d.add_delta(0, h.mul(&dg0_sf).scale_int(self.phase_sign as i64));
                }
                for (&k, c) in &self.delta {
                    d.add_delta(k, c.bos_partial(i)?);
                    d.add_delta(k + 1, c.mul(&dg0_sf));
                }
                if d.delta.keys().any(|&k| k > d.max_order()) {
                    return Err(Error::Degree(format!("δ order above {}", d.max_order())));
                }
            }
        }
        Ok(d)
    }

    /// The super gradient ∂_x applied to the expansion, one expansion per
    /// supervector component (bosonic then fermionic).
    pub fn gradient(&self) -> Result<(Vec<Self>, Vec<Self>)> {
        let n = self.ctx.n;
        let bos = (1..=self.ctx.m).map(|i| self.diff(Direction::Bos(i)).map(|d| d.neg())).collect::<Result<Vec<_>>>()?;
        let mut fer = Vec::with_capacity(2 * n);
        for j in 1..=n {
            fer.push(self.diff(Direction::Fer(2 * j))?.map_coeffs(|c| c.scale_int(-2)));
            fer.push(self.diff(Direction::Fer(2 * j - 1))?.map_coeffs(|c| c.scale_int(2)));
        }
        Ok((bos, fer))
    }

    pub fn is_zero(&self) -> bool {
        self.heaviside.is_none() && self.delta.is_empty()
    }

    /// Structural equality of two expansions over the same phase.
    pub fn coeff_eq(&self, o: &Self) -> bool {
        if !self.phase_body.coeff_eq(&o.phase_body) {
            return false;
        }
        let h_eq = match (&self.heaviside, &o.heaviside) {
            (None, None) => true,
            (Some(a), Some(b)) => self.phase_sign == o.phase_sign && a.coeff_eq(b),
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
        };
        if !h_eq {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.delta.keys().chain(o.delta.keys()).collect();
        keys.into_iter().all(|j| {
            let z = Grassmann::zero(self.ctx);
            self.delta.get(j).unwrap_or(&z).coeff_eq(o.delta.get(j).unwrap_or(&z))
        })
    }
}

impl<C: Bosonic + PhaseDivide> DistributionExpansion<C> {
    /// Reduce every δ coefficient modulo g₀ using
    /// g₀·δ^(j)(g₀) = −j·δ^(j−1)(g₀) (so g₀·δ(g₀) = 0).
    ///
    /// Coefficients the ring cannot divide are left as they are.
    pub fn normalize(&self) -> Self {
        let mut pending = self.delta.clone();
        let mut d = Self::empty(self.ctx, self.phase_body.clone());
        d.phase_sign = self.phase_sign;
        d.heaviside = self.heaviside.clone().filter(|c| !c.is_zero());
        while let Some((&j, _)) = pending.iter().next_back() {
            let c = pending.remove(&j).expect("key exists");
            let mut rem = Grassmann::zero(self.ctx);
            let mut quo = Grassmann::zero(self.ctx);
            for (&b, v) in c.terms() {
                match v.divide_by(&self.phase_body) {
                    Some((q, r)) => {
                        rem.add_term(b, r);
                        quo.add_term(b, q);
                    }
                    None => rem.add_term(b, v.clone()),
                }
            }
            d.add_delta(j, rem);
            if j > 0 && !quo.is_zero() {
                let e = pending.entry(j - 1).or_insert_with(|| Grassmann::zero(self.ctx));
                *e = e.add(&quo.scale_int(-(j as i64)));
            }
        }
        d
    }

    /// d·F followed by the reduction rule δ^(j)·g₀^k = (−1)^k k! C(j,k) δ^(j−k).
    pub fn multiply(&self, f: &Grassmann<C>) -> Self {
        self.multiply_raw(f).normalize()
    }

    pub fn equivalent(&self, o: &Self) -> bool {
        self.normalize().coeff_eq(&o.normalize())
    }
}

/// δ(hg) as an expansion over g: δ(g)·h^(−1). The caller certifies h₀ > 0
/// on the support; a constant nonpositive body is refused.
pub fn scale_cancel_delta<C: Bosonic + crate::superfun::Analytic>(
    h: &Grassmann<C>,
    g: &Grassmann<C>,
) -> Result<DistributionExpansion<C>> {
    check_positive_body(h)?;
    let inv = crate::superfun::inverse_sf(h)?;
    Ok(DistributionExpansion::delta(g, 0)?.multiply_raw(&inv))
}

/// H(s·hg) = H(s·g) for h₀ > 0.
pub fn scale_cancel_heaviside<C: Bosonic>(h: &Grassmann<C>, g: &Grassmann<C>, sign: i32) -> Result<DistributionExpansion<C>> {
    check_positive_body(h)?;
    DistributionExpansion::heaviside(g, sign)
}

fn check_positive_body<C: Bosonic>(h: &Grassmann<C>) -> Result<()> {
    h.require_even("scale factor")?;
    let h0 = h.body();
    if h0.is_zero() {
        return Err(Error::Refused("scale factor has zero body".into()));
    }
    if h0.is_constant() && h0.coeff_eq(&h0.neg()) {
        return Err(Error::Refused("scale factor body vanishes".into()));
    }
    Ok(())
}

/// Prop-style constant helper: (−1)^k k! C(j,k).
pub fn reduction_factor(j: usize, k: usize) -> BigRational {
    if k > j {
        return BigRational::zero();
    }
    let s = if k % 2 == 0 { BigRational::one() } else { -BigRational::one() };
    s * factorial(k) * crate::ring::binomial(j, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::superfun::{parse_superfunction, to_poly_sf};

    type D = DistributionExpansion<Poly>;

    fn ctx(m: usize, n: usize) -> SuperContext {
        SuperContext::new(m, n).unwrap()
    }

    fn psf(text: &str, c: SuperContext) -> Grassmann<Poly> {
        to_poly_sf(&parse_superfunction(text, c).unwrap()).unwrap()
    }

    #[test]
    fn ball_expansions() {
        let c = ctx(3, 1);
        let g = psf("X2 + 4", c);
        let d = D::delta(&g, 0).unwrap();
        assert_eq!(d.delta.len(), 2);
        assert!(d.delta[&1].coeff_eq(&psf("q1*q2", c)));
        let h = D::heaviside(&g, 1).unwrap();
        assert!(h.heaviside.is_some());
        assert!(h.delta[&0].coeff_eq(&psf("q1*q2", c)));
    }

    #[test]
    fn phase_powers_reduce() {
        let c = ctx(2, 1);
        let g = psf("X2 + 1 + x1*q1*q2", c);
        let d0 = D::delta(&g, 0).unwrap();
        assert!(d0.multiply(&g).is_zero());
        let d1 = D::delta(&g, 1).unwrap();
        assert!(d1.multiply(&g).coeff_eq(&d0.neg().normalize()));
    }

    #[test]
    fn negation_rules() {
        let c = ctx(2, 1);
        let g = psf("x1^2 - x2 + q1*q2", c);
        let d1 = D::delta(&g, 1).unwrap();
        let n1 = D::delta(&g.neg(), 1).unwrap();
        assert!(n1.coeff_eq(&d1.negate_phase().neg()));
        assert!(d1.negate_phase().negate_phase().coeff_eq(&d1));
    }

    #[test]
    fn heaviside_gradient_is_minus_gradient_delta() {
        let c = ctx(2, 1);
        let g = psf("X2 + 1 + x1*q1*q2", c);
        let (bos, fer) = D::heaviside(&g, -1).unwrap().gradient().unwrap();
        let grad = crate::superfun::super_gradient(&g).unwrap();
        let d0 = D::delta(&g, 0).unwrap();
        for (lhs, comp) in bos.iter().zip(&grad.bos).chain(fer.iter().zip(&grad.fer)) {
            let rhs = d0.multiply_left_raw(&comp.neg());
            assert!(lhs.equivalent(&rhs));
        }
    }

    #[test]
    fn reduction_factor_values() {
        assert_eq!(reduction_factor(3, 1), BigRational::from_integer((-3).into()));
        assert_eq!(reduction_factor(2, 2), BigRational::from_integer(2.into()));
        assert!(reduction_factor(1, 2).is_zero());
    }
}
