//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] of order K holds c_0..c_K with f(t0 + s) = Σ c_k s^k + O(s^(K+1)).

use super::tape::{Tape, Value};
use super::{Expr, Func};
use crate::error::{Error, Result};

pub const MAX_JET_ORDER: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity s ↦ t0 + s.
    pub fn variable(t0: f64, order: usize) -> Jet {
        let mut j = Jet::constant(t0, order);
        if order >= 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the center: k!·c_k.
    pub fn derivative(&self, k: usize) -> f64 {
        let f: f64 = (1..=k).map(|i| i as f64).product();
        self.c[k] * f
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet {
        Jet { c: self.c.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let k = self.c.len().min(o.c.len());
        let mut c = vec![0.0; k];
        for (i, a) in self.c.iter().enumerate().take(k) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(k - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        let b0 = o.c[0];
        if b0 == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let k = self.c.len();
        let mut q = vec![0.0; k];
        for n in 0..k {
            let mut s = self.c[n];
            for i in 1..=n {
                s -= o.c[i] * q[n - i];
            }
            q[n] = s / b0;
        }
        Ok(Jet { c: q })
    }

    pub fn powi(&self, k: i64) -> Result<Jet> {
        if k < 0 {
            let p = self.powi(-k)?;
            return Jet::constant(1.0, self.order()).div(&p);
        }
        let mut acc = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// u^p for real p: k·u0·v_k = Σ_{i=1..k} ((p+1)i − k)·u_i·v_{k−i}.
    pub fn powr(&self, p: f64) -> Result<Jet> {
        let u0 = self.c[0];
        if u0 <= 0.0 {
            return Err(Error::Domain(format!("{u0}^{p} in a jet")));
        }
        let k = self.c.len();
        let mut v = vec![0.0; k];
        v[0] = u0.powf(p);
        for n in 1..k {
            let mut s = 0.0;
            for i in 1..=n {
                s += ((p + 1.0) * i as f64 - n as f64) * self.c[i] * v[n - i];
            }
            v[n] = s / (n as f64 * u0);
        }
        Ok(Jet { c: v })
    }

    pub fn exp(&self) -> Jet {
        let k = self.c.len();
        let mut v = vec![0.0; k];
        v[0] = self.c[0].exp();
        for n in 1..k {
            let mut s = 0.0;
            for i in 1..=n {
                s += i as f64 * self.c[i] * v[n - i];
            }
            v[n] = s / n as f64;
        }
        Jet { c: v }
    }

    pub fn log(&self) -> Result<Jet> {
        let u0 = self.c[0];
        if u0 <= 0.0 {
            return Err(Error::Domain(format!("log of {u0} in a jet")));
        }
        let k = self.c.len();
        let mut v = vec![0.0; k];
        v[0] = u0.ln();
        for n in 1..k {
            let mut s = 0.0;
            for i in 1..n {
                s += i as f64 * v[i] * self.c[n - i];
            }
            v[n] = (self.c[n] - s / n as f64) / u0;
        }
        Ok(Jet { c: v })
    }

    pub fn sin_cos(&self) -> (Jet, Jet) {
        let k = self.c.len();
        let mut s = vec![0.0; k];
        let mut c = vec![0.0; k];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for n in 1..k {
            let (mut a, mut b) = (0.0, 0.0);
            for i in 1..=n {
                let w = i as f64 * self.c[i];
                a += w * c[n - i];
                b += w * s[n - i];
            }
            s[n] = a / n as f64;
            c[n] = -b / n as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn asinh(&self) -> Result<Jet> {
        let w = Jet::constant(1.0, self.order()).add(&self.mul(self)).powr(-0.5)?;
        let k = self.c.len();
        let mut v = vec![0.0; k];
        v[0] = self.c[0].asinh();
        for n in 1..k {
            let mut s = 0.0;
            for i in 1..=n {
                s += i as f64 * self.c[i] * w.c[n - i];
            }
            v[n] = s / n as f64;
        }
        Ok(Jet { c: v })
    }

    pub fn apply(&self, f: Func) -> Result<Jet> {
        match f {
            Func::Exp => Ok(self.exp()),
            Func::Log => self.log(),
            Func::Sqrt => self.powr(0.5),
            Func::Sin => Ok(self.sin_cos().0),
            Func::Cos => Ok(self.sin_cos().1),
            Func::Asinh => self.asinh(),
            Func::Abs => {
                let u0 = self.c[0];
                if u0 == 0.0 {
                    Err(Error::Domain("abs is not smooth at 0".into()))
                } else {
                    Ok(self.scale(u0.signum()))
                }
            }
        }
    }

    /// self ∘ inner, where self is centered at inner.c[0]. Only c_1.. of inner matter.
    pub fn compose(&self, inner: &Jet) -> Jet {
        let k = self.c.len().min(inner.c.len());
        let mut d = inner.clone();
        d.c.truncate(k);
        d.c[0] = 0.0;
        let mut acc = Jet::constant(self.c[k - 1], k - 1);
        for i in (0..k - 1).rev() {
            acc = acc.mul(&d);
            acc.c[0] += self.c[i];
        }
        acc
    }
}

impl Value for Jet {
    fn constant_like(v: f64, like: &Self) -> Self {
        Jet::constant(v, like.order())
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn powi(&self, k: i64) -> Result<Self> {
        Jet::powi(self, k)
    }
    fn powr(&self, p: f64) -> Result<Self> {
        Jet::powr(self, p)
    }
    fn func(&self, f: Func) -> Result<Self> {
        self.apply(f)
    }
}

/// Truncated Taylor expansion of a scalar function about `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSeries {
    pub center: f64,
    pub coeffs: Vec<f64>,
}

impl JetSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn jet(&self) -> Jet {
        Jet { c: self.coeffs.clone() }
    }

    /// self ∘ inner. The inner series must take the value `self.center` at its own center.
    pub fn compose(&self, inner: &JetSeries) -> Result<JetSeries> {
        if (inner.coeffs[0] - self.center).abs() > 1e-12 * (1.0 + self.center.abs()) {
            return Err(Error::Domain(format!(
                "inner jet value {} does not match outer center {}",
                inner.coeffs[0], self.center
            )));
        }
        Ok(JetSeries { center: inner.center, coeffs: self.jet().compose(&inner.jet()).c })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = t - self.center;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }
}

/// Taylor coefficients of t ↦ e(path(t)) at t0. The path gives each x_i as
/// an expression in t, which is written as variable 1 (`x1`).
pub fn jet_eval(e: &Expr, path: &[Expr], t0: f64, order: usize) -> Result<JetSeries> {
    if order > MAX_JET_ORDER {
        return Err(Error::Parameter(format!("jet order {order} exceeds {MAX_JET_ORDER}")));
    }
    let t = Jet::variable(t0, order);
    let path_tape = Tape::compile(path);
    let inputs = path_tape.eval_values(std::slice::from_ref(&t))?;
    let c = jet_eval_with(e, &inputs)?;
    Ok(JetSeries { center: t0, coeffs: c.c })
}

/// Evaluate e with jet-valued inputs for x_1..x_m.
pub fn jet_eval_with(e: &Expr, inputs: &[Jet]) -> Result<Jet> {
    let tape = Tape::compile(std::slice::from_ref(e));
    Ok(tape.eval_values(inputs)?.remove(0))
}

/// Local inverse of a jet with c_1 ≠ 0, centered at c_0 with value `center`.
pub fn inverse_jet(j: &JetSeries) -> Result<JetSeries> {
    let a = &j.coeffs;
    let k = a.len() - 1;
    if a.len() < 2 || a[1] == 0.0 {
        return Err(Error::NonInvertibleJet);
    }
    let mut shifted = Jet { c: a.clone() };
    shifted.c[0] = 0.0;
    let ident = Jet::variable(0.0, k);
    let mut b = ident.scale(1.0 / a[1]);
    for _ in 1..k {
        let r = ident.sub(&shifted.compose(&b));
        b = b.add(&r.scale(1.0 / a[1]));
        b.c[0] = 0.0;
    }
    let mut coeffs = b.c;
    coeffs[0] = j.center;
    Ok(JetSeries { center: a[0], coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn square_and_exp() {
        let s = jet_eval(&parse("x1^2").unwrap(), &[parse("x1").unwrap()], 1.0, 2).unwrap();
        assert_eq!(s.coeffs, vec![1.0, 2.0, 1.0]);
        let s = jet_eval(&parse("exp(x1)").unwrap(), &[parse("x1").unwrap()], 0.0, 3).unwrap();
        for (a, b) in s.coeffs.iter().zip([1.0, 1.0, 0.5, 1.0 / 6.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_of_linear() {
        let j = JetSeries { center: 0.0, coeffs: vec![0.0, 2.0, 0.0, 0.0] };
        let inv = inverse_jet(&j).unwrap();
        assert_eq!(inv.coeffs, vec![0.0, 0.5, 0.0, 0.0]);
        let id = JetSeries { center: 0.0, coeffs: vec![0.0, 1.0, 0.0] };
        assert_eq!(inverse_jet(&id).unwrap().coeffs, vec![0.0, 1.0, 0.0]);
        let flat = JetSeries { center: 0.0, coeffs: vec![1.0, 0.0, 1.0] };
        assert_eq!(inverse_jet(&flat), Err(Error::NonInvertibleJet));
    }

    #[test]
    fn inverse_of_circle_phase() {
        let r = 1.3;
        let g = jet_eval(&parse("1.69 - x1^2").unwrap(), &[parse("x1").unwrap()], r, 8).unwrap();
        let inv = inverse_jet(&g).unwrap();
        let round = inv.compose(&g).unwrap();
        assert!((round.coeffs[0] - r).abs() < 1e-12);
        assert!((round.coeffs[1] - 1.0).abs() < 1e-12);
        for c in &round.coeffs[2..] {
            assert!(c.abs() < 1e-12);
        }
    }
}
