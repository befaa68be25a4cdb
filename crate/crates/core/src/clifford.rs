//! The mixed algebra generated by orthogonal e_1..e_m and symplectic è_1..è_2n.
//!
//! e_j e_k + e_k e_j = −2δ_jk, e_j è_k = −è_k e_j, è_j è_k − è_k è_j = g_jk.
//! The symplectic part is Weyl-like, so words are kept normal ordered
//! (nondecreasing indices). A term is e_A·W with a Grassmann coefficient that
//! commutes with every generator.

use crate::error::{Error, Result};
use crate::grassmann::{Blade, Grassmann, SuperContext};
use crate::ring::{Bosonic, Coeff};
use crate::superfun::SuperVectorField;
use std::collections::BTreeMap;

pub const MAX_WORD_DEGREE: usize = 16;

pub type Word = Vec<u8>;

/// g_jk = è_jè_k − è_kè_j: +1 for (2l−1, 2l), −1 for (2l, 2l−1).
pub fn symplectic_form(j: u8, k: u8) -> i64 {
    if j % 2 == 1 && k == j + 1 {
        1
    } else if k % 2 == 1 && j == k + 1 {
        -1
    } else {
        0
    }
}

/// Normal form of a symplectic word as a sum of nondecreasing words.
pub fn normal_order(w: &[u8]) -> BTreeMap<Word, i64> {
    normal_order_by(w, &mut |descents: &[usize]| descents[0])
}

/// Normal ordering where `pick` chooses which descent to rewrite next.
pub fn normal_order_by(w: &[u8], pick: &mut dyn FnMut(&[usize]) -> usize) -> BTreeMap<Word, i64> {
    let mut out = BTreeMap::new();
    rewrite(w.to_vec(), 1, pick, &mut out);
    out.retain(|_, c| *c != 0);
    out
}

fn rewrite(w: Word, coeff: i64, pick: &mut dyn FnMut(&[usize]) -> usize, out: &mut BTreeMap<Word, i64>) {
    let descents: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]).collect();
    if descents.is_empty() {
        *out.entry(w).or_insert(0) += coeff;
        return;
    }
    let i = pick(&descents);
    let g = symplectic_form(w[i], w[i + 1]);
    if g != 0 {
        let mut shorter = w.clone();
        shorter.drain(i..i + 2);
        rewrite(shorter, coeff * g, pick, out);
    }
    let mut swapped = w;
    swapped.swap(i, i + 1);
    rewrite(swapped, coeff, pick, out);
}

/// Sign of e_A e_B with e_j² = −1.
pub fn orth_product_sign(a: Blade, b: Blade) -> i32 {
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> j >> 1).count_ones();
        rest &= rest - 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug)]
pub struct MixedClifford<C: Coeff> {
    ctx: SuperContext,
    terms: BTreeMap<(Blade, Word), Grassmann<C>>,
}

impl<C: Coeff> MixedClifford<C> {
    pub fn zero(ctx: SuperContext) -> Self {
        MixedClifford { ctx, terms: BTreeMap::new() }
    }

    pub fn scalar(c: Grassmann<C>) -> Self {
        Self::term(0, Vec::new(), c)
    }

    /// c·e_A·W, where W must already be normal ordered.
    pub fn term(blade: Blade, word: Word, c: Grassmann<C>) -> Self {
        let mut x = Self::zero(c.ctx());
        x.add_term(blade, word, c);
        x
    }

    /// e_j.
    pub fn e(ctx: SuperContext, j: usize) -> Self {
        Self::term(1 << (j - 1), Vec::new(), Grassmann::one(ctx))
    }

    /// è_j.
    pub fn egrave(ctx: SuperContext, j: usize) -> Self {
        Self::term(0, vec![j as u8], Grassmann::one(ctx))
    }

    /// Σ bos_j e_j + Σ fer_j è_j.
    pub fn embed(v: &SuperVectorField<C>) -> Self {
        let ctx = v.ctx();
        let mut x = Self::zero(ctx);
        for (j, c) in v.bos.iter().enumerate() {
            x.add_term(1 << j, Vec::new(), c.clone());
        }
        for (j, c) in v.fer.iter().enumerate() {
            x.add_term(0, vec![j as u8 + 1], c.clone());
        }
        x
    }

    pub fn ctx(&self) -> SuperContext {
        self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Blade, Word), &Grassmann<C>)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, blade: Blade, word: Word, c: Grassmann<C>) {
        if c.is_zero() {
            return;
        }
        let key = (blade, word);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn component(&self, blade: Blade, word: &[u8]) -> Grassmann<C> {
        self.terms.get(&(blade, word.to_vec())).cloned().unwrap_or_else(|| Grassmann::zero(self.ctx))
    }

    pub fn scalar_part(&self) -> Grassmann<C> {
        self.component(0, &[])
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut x = self.clone();
        for ((b, w), c) in &o.terms {
            x.add_term(*b, w.clone(), c.clone());
        }
        x
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn map(&self, f: impl Fn(&Grassmann<C>) -> Grassmann<C>) -> Self {
        let mut x = Self::zero(self.ctx);
        for ((b, w), c) in &self.terms {
            x.add_term(*b, w.clone(), f(c));
        }
        x
    }

    pub fn try_map(&self, f: impl Fn(&Grassmann<C>) -> Result<Grassmann<C>>) -> Result<Self> {
        let mut x = Self::zero(self.ctx);
        for ((b, w), c) in &self.terms {
            x.add_term(*b, w.clone(), f(c)?);
        }
        Ok(x)
    }

    pub fn convert<D: Coeff>(&self, f: impl Fn(&Grassmann<C>) -> Grassmann<D>) -> MixedClifford<D> {
        let mut x = MixedClifford::zero(self.ctx);
        for ((b, w), c) in &self.terms {
            x.add_term(*b, w.clone(), f(c));
        }
        x
    }

    /// Multiply every coefficient on the left by a superfunction.
    pub fn scale_left(&self, a: &Grassmann<C>) -> Self {
        self.map(|c| a.mul(c))
    }

    pub fn scale_right(&self, a: &Grassmann<C>) -> Self {
        self.map(|c| c.mul(a))
    }

    /// The product, normal ordering the symplectic words.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut x = Self::zero(self.ctx);
        let mut cache: BTreeMap<Word, BTreeMap<Word, i64>> = BTreeMap::new();
        for ((ba, wa), ca) in &self.terms {
            for ((bb, wb), cb) in &o.terms {
                let deg = wa.len() + wb.len();
                if deg > MAX_WORD_DEGREE {
                    return Err(Error::Degree(format!("symplectic word degree {deg} > {MAX_WORD_DEGREE}")));
                }
                let c = ca.mul(cb);
                if c.is_zero() {
                    continue;
                }
                let mut sign = orth_product_sign(*ba, *bb);
                if (bb.count_ones() as usize * wa.len()) % 2 == 1 {
                    sign = -sign;
                }
                let joined: Word = wa.iter().chain(wb).copied().collect();
                let nf = cache.entry(joined.clone()).or_insert_with(|| normal_order(&joined));
                for (w, k) in nf.iter() {
                    x.add_term(ba ^ bb, w.clone(), c.scale_int(sign as i64 * k));
                }
            }
        }
        Ok(x)
    }

    pub fn coeff_eq(&self, o: &Self) -> bool {
        let keys: std::collections::BTreeSet<_> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter().all(|(b, w)| self.component(*b, w).coeff_eq(&o.component(*b, w)))
    }
}

impl<C: Bosonic> MixedClifford<C> {
    /// ∂_x F = ∂_x̀ F − ∂_x̲ F with generators multiplied on the left.
    pub fn dirac_left(&self) -> Result<Self> {
        let ctx = self.ctx;
        let mut out = Self::zero(ctx);
        for j in 1..=ctx.m {
            let d = self.try_map(|c| c.bos_partial(j))?;
            out = out.sub(&Self::e(ctx, j).mul(&d)?);
        }
        for j in 1..=ctx.n {
            let d_odd = self.try_map(|c| c.fer_partial(2 * j - 1))?;
            let d_even = self.try_map(|c| c.fer_partial(2 * j))?;
            let a = Self::egrave(ctx, 2 * j).mul(&d_odd)?;
            let b = Self::egrave(ctx, 2 * j - 1).mul(&d_even)?;
            out = out.add(&a.sub(&b).map(|c| c.scale_int(2)));
        }
        Ok(out)
    }

    /// F ∂_x = −F ∂_x̀ − F ∂_x̲ with generators on the right and right fermionic
    /// derivatives F∂_{x̀_j} = −∂_{x̀_j}[F*].
    pub fn dirac_right(&self) -> Result<Self> {
        let ctx = self.ctx;
        let mut out = Self::zero(ctx);
        for j in 1..=ctx.m {
            let d = self.try_map(|c| c.bos_partial(j))?;
            out = out.sub(&d.mul(&Self::e(ctx, j))?);
        }
        for j in 1..=ctx.n {
            let d_odd = self.try_map(|c| c.fer_partial_right(2 * j - 1))?;
            let d_even = self.try_map(|c| c.fer_partial_right(2 * j))?;
            let a = d_odd.mul(&Self::egrave(ctx, 2 * j))?;
            let b = d_even.mul(&Self::egrave(ctx, 2 * j - 1))?;
            out = out.sub(&a.sub(&b).map(|c| c.scale_int(2)));
        }
        Ok(out)
    }
}

impl<C: Coeff> PartialEq for MixedClifford<C> {
    fn eq(&self, o: &Self) -> bool {
        self.coeff_eq(o)
    }
}

/// Apply the Dirac operator to a superfunction on the given side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

pub fn dirac_apply<C: Bosonic>(f: &MixedClifford<C>, side: Side) -> Result<MixedClifford<C>> {
    match side {
        Side::Left => f.dirac_left(),
        Side::Right => f.dirac_right(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::superfun::{parse_superfunction, super_gradient, x_square, SuperVectorField};

    type MC = MixedClifford<Expr>;

    fn ctx(m: usize, n: usize) -> SuperContext {
        SuperContext::new(m, n).unwrap()
    }

    fn num(c: SuperContext, k: i64) -> MC {
        MC::scalar(Grassmann::scalar(c, Expr::int(k)))
    }

    #[test]
    fn generator_relations() {
        let c = ctx(2, 1);
        assert_eq!(MC::e(c, 1).mul(&MC::e(c, 1)).unwrap(), num(c, -1));
        let e12 = MC::e(c, 1).mul(&MC::e(c, 2)).unwrap();
        assert_eq!(e12, MC::e(c, 2).mul(&MC::e(c, 1)).unwrap().neg());
        let comm = MC::egrave(c, 1).mul(&MC::egrave(c, 2)).unwrap().sub(&MC::egrave(c, 2).mul(&MC::egrave(c, 1)).unwrap());
        assert_eq!(comm, num(c, 1));
        let mixed = MC::e(c, 1).mul(&MC::egrave(c, 2)).unwrap().add(&MC::egrave(c, 2).mul(&MC::e(c, 1)).unwrap());
        assert!(mixed.is_zero());
    }

    #[test]
    fn square_of_coordinates() {
        for (m, n) in [(1, 1), (2, 2), (3, 1)] {
            let c = ctx(m, n);
            let x = MC::embed(&SuperVectorField::coordinates(c));
            let sq = x.mul(&x).unwrap();
            assert_eq!(sq, MC::scalar(x_square(c)));
        }
    }

    #[test]
    fn dirac_on_x_gives_superdimension() {
        for (m, n) in [(1, 0), (2, 1), (3, 2), (1, 2)] {
            let c = ctx(m, n);
            let x = MC::embed(&SuperVectorField::coordinates(c));
            assert_eq!(x.dirac_left().unwrap(), num(c, c.superdim()));
            assert_eq!(x.dirac_right().unwrap(), num(c, c.superdim()));
        }
    }

    #[test]
    fn dirac_of_scalar_is_gradient_and_squares_to_laplacian() {
        let c = ctx(3, 1);
        let g = parse_superfunction("X2 + 4", c).unwrap();
        let dg = MC::scalar(g.clone()).dirac_left().unwrap();
        assert_eq!(dg, MC::embed(&super_gradient(&g).unwrap()));
        let ddg = dg.dirac_left().unwrap();
        assert_eq!(ddg, num(c, 2 * c.superdim()));
    }

    #[test]
    fn word_degree_cap() {
        let c = ctx(1, 1);
        let mut x = MC::egrave(c, 1);
        for _ in 0..4 {
            x = x.mul(&x).unwrap();
        }
        assert!(matches!(x.mul(&MC::egrave(c, 1)), Err(Error::Degree(_))));
    }
}
