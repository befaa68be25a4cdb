//! Superfunctions F(x) = Σ_A F_A(x̲) x̀_A and the differential operators on them.

use crate::error::{Error, Result};
use crate::expr::{parse_raw, Expr, Func, Jet, RawExpr, Tape};
use crate::grassmann::{Grassmann, SuperContext};
use crate::poly::Poly;
use crate::ring::{Bosonic, Coeff};
use crate::scalar::Scalar;
use num_rational::BigRational;

pub type SuperFunction = Grassmann<Expr>;

/// One-variable analytic primitives usable in [`compose`].
#[derive(Clone, Debug)]
pub enum AnalyticFn {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Asinh,
    Power(Scalar),
}

impl AnalyticFn {
    fn from_func(f: Func) -> Option<AnalyticFn> {
        Some(match f {
            Func::Exp => AnalyticFn::Exp,
            Func::Log => AnalyticFn::Log,
            Func::Sqrt => AnalyticFn::Sqrt,
            Func::Sin => AnalyticFn::Sin,
            Func::Cos => AnalyticFn::Cos,
            Func::Asinh => AnalyticFn::Asinh,
            Func::Abs => return None,
        })
    }
}

/// p(p−1)⋯(p−k+1), exact when p is.
pub fn falling(p: &Scalar, k: usize) -> Scalar {
    let mut acc = Scalar::int(1);
    for i in 0..k {
        acc = acc.mul(&p.sub(&Scalar::int(i as i64)));
    }
    acc
}

fn factorial_i64(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Rings in which f^(k)(a₀) can be formed.
pub trait Analytic: Coeff {
    fn analytic_derivative(f: &AnalyticFn, k: usize, a0: &Self) -> Result<Self>;
}

impl Analytic for Expr {
    fn analytic_derivative(f: &AnalyticFn, k: usize, a0: &Self) -> Result<Self> {
        Ok(match f {
            AnalyticFn::Exp => a0.exp(),
            AnalyticFn::Log if k == 0 => a0.log(),
            AnalyticFn::Log => {
                let c = if k % 2 == 1 { 1 } else { -1 } * factorial_i64(k - 1);
                Expr::int(c).mul(&a0.powi(-(k as i64)))
            }
            AnalyticFn::Sqrt => return Self::analytic_derivative(&AnalyticFn::Power(Scalar::ratio(1, 2)), k, a0),
            AnalyticFn::Power(p) => {
                let c = falling(p, k);
                if c.is_zero() {
                    Expr::int(0)
                } else {
                    Expr::constant(c).mul(&a0.powr(p.sub(&Scalar::int(k as i64))))
                }
            }
            AnalyticFn::Sin => match k % 4 {
                0 => a0.sin(),
                1 => a0.cos(),
                2 => a0.sin().neg(),
                _ => a0.cos().neg(),
            },
            AnalyticFn::Cos => match k % 4 {
                0 => a0.cos(),
                1 => a0.sin().neg(),
                2 => a0.cos().neg(),
                _ => a0.sin(),
            },
            AnalyticFn::Asinh => {
                let mut d = Expr::var(1).asinh();
                for _ in 0..k {
                    d = d.diff(1);
                }
                d.substitute(1, a0)
            }
        })
    }
}

impl Analytic for Scalar {
    fn analytic_derivative(f: &AnalyticFn, k: usize, a0: &Self) -> Result<Self> {
        match f {
            AnalyticFn::Power(p) => {
                let c = falling(p, k);
                if c.is_zero() {
                    return Ok(Scalar::int(0));
                }
                let v = a0
                    .powr(&p.sub(&Scalar::int(k as i64)))
                    .ok_or_else(|| Error::Domain(format!("power of nonpositive body {a0}")))?;
                Ok(c.mul(&v))
            }
            AnalyticFn::Sqrt => Self::analytic_derivative(&AnalyticFn::Power(Scalar::ratio(1, 2)), k, a0),
            AnalyticFn::Log if k >= 1 => {
                let c = if k % 2 == 1 { 1 } else { -1 } * factorial_i64(k - 1);
                let v = a0.powi(-(k as i64)).ok_or_else(|| Error::Domain("log at 0".into()))?;
                if a0.to_f64() <= 0.0 {
                    return Err(Error::Domain(format!("log of {a0}")));
                }
                Ok(Scalar::int(c).mul(&v))
            }
            _ => {
                let func = match f {
                    AnalyticFn::Exp => Func::Exp,
                    AnalyticFn::Log => Func::Log,
                    AnalyticFn::Sin => Func::Sin,
                    AnalyticFn::Cos => Func::Cos,
                    _ => Func::Asinh,
                };
                if k == 0 {
                    if let Some(v) = Expr::func(func, &Expr::constant(a0.clone())).as_const() {
                        if v.is_exact() {
                            return Ok(v.clone());
                        }
                    }
                }
                let j = Jet::variable(a0.to_f64(), k).apply(func)?;
                Ok(Scalar::Float(j.derivative(k)))
            }
        }
    }
}

impl Analytic for Poly {
    fn analytic_derivative(f: &AnalyticFn, k: usize, a0: &Self) -> Result<Self> {
        if let AnalyticFn::Power(p) = f {
            if let Some(e) = p.as_integer().filter(|&e| e >= 0) {
                if k as i64 > e {
                    return Ok(Poly::zero());
                }
                let c = falling(p, k);
                return Ok(a0.pow((e - k as i64) as u32).scale(c.as_exact().expect("integer exponent")));
            }
        }
        if let Some(c) = a0.as_constant() {
            if let Scalar::Exact(v) = Scalar::analytic_derivative(f, k, &Scalar::Exact(c))? {
                return Ok(Poly::constant(v));
            }
        }
        Err(Error::Unsupported(format!("{f:?} of a non-constant polynomial body is not a polynomial")))
    }
}

/// f(a) = Σ_j 𝐚^j/j!·f^(j)(a₀) for even a; the sum stops by nilpotency.
pub fn compose<C: Analytic>(f: &AnalyticFn, a: &Grassmann<C>) -> Result<Grassmann<C>> {
    a.require_even("argument of an analytic function")?;
    let ctx = a.ctx();
    let (a0, nil) = a.body_nil();
    let mut out = Grassmann::zero(ctx);
    let mut power = Grassmann::one(ctx);
    let mut fact = BigRational::from_integer(1.into());
    for j in 0..=ctx.n {
        if power.is_zero() {
            break;
        }
        if j > 0 {
            fact *= BigRational::from_integer((j as i64).into());
        }
        let d = C::analytic_derivative(f, j, &a0)?;
        if !d.is_zero() {
            out = out.add(&power.scale(&d).scale_rational(&fact.recip()));
        }
        power = power.mul(&nil);
    }
    Ok(out)
}

/// a^p through the Taylor expansion about a₀.
pub fn power_sf<C: Analytic>(a: &Grassmann<C>, p: Scalar) -> Result<Grassmann<C>> {
    compose(&AnalyticFn::Power(p), a)
}

/// 1/h = h₀^(−1)·Σ_j (−𝐡/h₀)^j.
pub fn inverse_sf<C: Analytic>(h: &Grassmann<C>) -> Result<Grassmann<C>> {
    power_sf(h, Scalar::int(-1))
}

/// A supervector w = Σ w_j e_j + Σ ẁ_j è_j with Grassmann-valued components.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperVectorField<C: Coeff> {
    pub bos: Vec<Grassmann<C>>,
    pub fer: Vec<Grassmann<C>>,
}

impl<C: Coeff> SuperVectorField<C> {
    pub fn zero(ctx: SuperContext) -> Self {
        SuperVectorField { bos: vec![Grassmann::zero(ctx); ctx.m], fer: vec![Grassmann::zero(ctx); 2 * ctx.n] }
    }

    pub fn ctx(&self) -> SuperContext {
        self.bos[0].ctx()
    }

    pub fn add(&self, o: &Self) -> Self {
        SuperVectorField {
            bos: self.bos.iter().zip(&o.bos).map(|(a, b)| a.add(b)).collect(),
            fer: self.fer.iter().zip(&o.fer).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// Left multiplication of every component by a superfunction.
    pub fn scale(&self, a: &Grassmann<C>) -> Self {
        SuperVectorField {
            bos: self.bos.iter().map(|c| a.mul(c)).collect(),
            fer: self.fer.iter().map(|c| a.mul(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        SuperVectorField {
            bos: self.bos.iter().map(|c| c.neg()).collect(),
            fer: self.fer.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Even bosonic and odd fermionic components.
    pub fn is_admissible(&self) -> bool {
        self.bos.iter().all(|c| c.is_even()) && self.fer.iter().all(|c| c.is_odd())
    }
}

impl SuperVectorField<Expr> {
    /// The coordinate supervector x = Σ x_j e_j + Σ x̀_j è_j.
    pub fn coordinates(ctx: SuperContext) -> Self {
        SuperVectorField {
            bos: (1..=ctx.m).map(|j| Grassmann::scalar(ctx, Expr::var(j))).collect(),
            fer: (1..=2 * ctx.n).map(|j| Grassmann::generator(ctx, j).expect("index in range")).collect(),
        }
    }
}

/// w² = −Σ w_j² + Σ ẁ_{2j−1}ẁ_{2j}.
pub fn vsquare<C: Coeff>(v: &SuperVectorField<C>) -> Result<Grassmann<C>> {
    if !v.is_admissible() {
        return Err(Error::Parity("supervector needs even bosonic and odd fermionic components".into()));
    }
    let ctx = v.ctx();
    let mut s = Grassmann::zero(ctx);
    for w in &v.bos {
        s = s.sub(&w.mul(w));
    }
    for j in 0..ctx.n {
        s = s.add(&v.fer[2 * j].mul(&v.fer[2 * j + 1]));
    }
    Ok(s)
}

/// |w| = (−w²)^(1/2).
pub fn modulus_sf<C: Analytic>(v: &SuperVectorField<C>) -> Result<Grassmann<C>> {
    power_sf(&vsquare(v)?.neg(), Scalar::ratio(1, 2))
}

/// ∂_x[g] for even g: bos_j = −∂_j g, fer_{2j} = 2∂_{x̀_{2j−1}} g, fer_{2j−1} = −2∂_{x̀_{2j}} g.
pub fn super_gradient<C: Bosonic>(g: &Grassmann<C>) -> Result<SuperVectorField<C>> {
    g.require_even("phase")?;
    let ctx = g.ctx();
    let bos = (1..=ctx.m).map(|j| g.bos_partial(j).map(|d| d.neg())).collect::<Result<Vec<_>>>()?;
    let mut fer = vec![Grassmann::zero(ctx); 2 * ctx.n];
    for j in 1..=ctx.n {
        fer[2 * j - 1] = g.fer_partial(2 * j - 1)?.scale_int(2);
        fer[2 * j - 2] = g.fer_partial(2 * j)?.scale_int(-2);
    }
    Ok(SuperVectorField { bos, fer })
}

/// ΔF = 4Σ ∂_{x̀_{2j−1}}∂_{x̀_{2j}} F − Σ ∂²_{x_j} F.
pub fn super_laplace<C: Bosonic>(f: &Grassmann<C>) -> Result<Grassmann<C>> {
    let ctx = f.ctx();
    let mut out = Grassmann::zero(ctx);
    for j in 1..=ctx.n {
        out = out.add(&f.fer_partial(2 * j)?.fer_partial(2 * j - 1)?.scale_int(4));
    }
    for j in 1..=ctx.m {
        out = out.sub(&f.bos_partial(j)?.bos_partial(j)?);
    }
    Ok(out)
}

/// The supervector square x² = −|x̲|² + x̀² in a given context.
pub fn x_square(ctx: SuperContext) -> SuperFunction {
    vsquare(&SuperVectorField::coordinates(ctx)).expect("coordinates are admissible")
}

/// |x| = (|x̲|² − x̀²)^(1/2).
pub fn abs_x(ctx: SuperContext) -> Result<SuperFunction> {
    modulus_sf(&SuperVectorField::coordinates(ctx))
}

/// Numeric Grassmann value at a bosonic point.
pub fn eval_at(f: &SuperFunction, x: &[f64]) -> Result<Grassmann<Scalar>> {
    let blades: Vec<_> = f.terms().map(|(&b, _)| b).collect();
    let exprs: Vec<_> = f.terms().map(|(_, c)| c.clone()).collect();
    let vals = Tape::compile(&exprs).eval(x)?;
    Ok(Grassmann::from_terms(f.ctx(), blades.into_iter().zip(vals).map(|(b, v)| (b, Scalar::Float(v)))))
}

/// Convert to exact polynomial coefficients when every coefficient is a polynomial.
pub fn to_poly_sf(f: &SuperFunction) -> Option<Grassmann<Poly>> {
    f.try_convert(|c| c.to_poly())
}

pub fn from_poly_sf(f: &Grassmann<Poly>) -> SuperFunction {
    f.convert(Expr::from_poly)
}

/// Parse a superfunction literal: the scalar grammar plus q1..q2n, `X2` (= x²) and `ABSX` (= |x|).
pub fn parse_superfunction(text: &str, ctx: SuperContext) -> Result<SuperFunction> {
    lower_super(&parse_raw(text)?, ctx)
}

fn constant_of(f: &SuperFunction) -> Option<Scalar> {
    if f.len() > 1 || f.terms().any(|(&b, _)| b != 0) {
        return None;
    }
    if f.is_zero() {
        return Some(Scalar::int(0));
    }
    f.body().as_const().cloned()
}

fn lower_super(raw: &RawExpr, ctx: SuperContext) -> Result<SuperFunction> {
    let rec = |e: &RawExpr| lower_super(e, ctx);
    Ok(match raw {
        RawExpr::Num(s) => Grassmann::scalar(ctx, Expr::constant(s.clone())),
        RawExpr::Ident(name, _) => {
            if name == "X2" {
                x_square(ctx)
            } else if name == "ABSX" {
                abs_x(ctx)?
            } else if let Some(i) = crate::expr::parse::var_index(name) {
                if i > ctx.m {
                    return Err(Error::UnknownIdent(format!("{name} (m = {})", ctx.m)));
                }
                Grassmann::scalar(ctx, Expr::var(i))
            } else if let Some(i) = name.strip_prefix('q').and_then(|d| d.parse::<usize>().ok()) {
                if i == 0 || i > 2 * ctx.n {
                    return Err(Error::UnknownIdent(format!("{name} (n = {})", ctx.n)));
                }
                Grassmann::generator(ctx, i)?
            } else {
                return Err(Error::UnknownIdent(name.clone()));
            }
        }
        RawExpr::Call(name, a, _) => {
            let f = Func::from_name(name).ok_or_else(|| Error::UnknownIdent(name.clone()))?;
            let arg = rec(a)?;
            match AnalyticFn::from_func(f) {
                Some(af) => compose(&af, &arg)?,
                None => {
                    if arg.terms().any(|(&b, _)| b != 0) {
                        return Err(Error::Unsupported(
                            "abs takes a bosonic argument; use ABSX for the supervector modulus".into(),
                        ));
                    }
                    Grassmann::scalar(ctx, arg.body().abs())
                }
            }
        }
        RawExpr::Add(a, b) => rec(a)?.add(&rec(b)?),
        RawExpr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        RawExpr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        RawExpr::Div(a, b) => {
            let den = rec(b)?;
            let num = rec(a)?;
            match constant_of(&den) {
                Some(c) => {
                    let inv = c.recip().ok_or_else(|| Error::Domain("division by zero".into()))?;
                    num.scale(&Expr::constant(inv))
                }
                None => num.mul(&inverse_sf(&den)?),
            }
        }
        RawExpr::Neg(a) => rec(a)?.neg(),
        RawExpr::Pow(a, b, at) => {
            let p = constant_of(&rec(b)?).ok_or(Error::Syntax { pos: *at, msg: "exponent must be a constant".into() })?;
            let base = rec(a)?;
            match p.as_integer() {
                Some(k) if k >= 0 => base.pow(k as u32),
                _ => power_sf(&base, p)?,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::SuperContext;

    fn ctx(m: usize, n: usize) -> SuperContext {
        SuperContext::new(m, n).unwrap()
    }

    fn sf(text: &str, c: SuperContext) -> SuperFunction {
        parse_superfunction(text, c).unwrap()
    }

    #[test]
    fn nilpotent_square_vanishes() {
        let c = ctx(1, 1);
        assert!(sf("(x1 + q1*q2)*(x1 - q1*q2)", c).coeff_eq(&sf("x1^2", c)));
        assert!(sf("q1*q2 + q2*q1", c).is_zero());
    }

    #[test]
    fn exp_and_sqrt_truncate() {
        let c = ctx(1, 1);
        assert!(sf("exp(q1*q2)", c).coeff_eq(&sf("1 + q1*q2", c)));
        let r = sf("sqrt(1 + q1*q2)", c);
        assert!(r.coeff_eq(&sf("1 + 1/2*q1*q2", c)));
        assert!(r.mul(&r).coeff_eq(&sf("1 + q1*q2", c)));
    }

    #[test]
    fn laplacian_conventions() {
        for (m, n) in [(1, 0), (2, 1), (3, 1), (3, 2), (5, 3)] {
            let c = ctx(m, n);
            let want = Expr::int(2 * c.superdim());
            assert!(super_laplace(&x_square(c)).unwrap().coeff_eq(&Grassmann::scalar(c, want)));
        }
        let c = ctx(2, 1);
        assert!(super_laplace(&sf("x1^2", c)).unwrap().coeff_eq(&sf("-2", c)));
        assert!(super_laplace(&sf("q1*q2", c)).unwrap().coeff_eq(&sf("-4", c)));
    }

    #[test]
    fn gradient_of_ball_phase() {
        let c = ctx(3, 1);
        let g = sf("X2 + 4", c);
        let grad = super_gradient(&g).unwrap();
        let want = SuperVectorField::coordinates(c);
        for (a, b) in grad.bos.iter().zip(&want.bos).chain(grad.fer.iter().zip(&want.fer)) {
            assert!(a.coeff_eq(&b.scale_int(2)));
        }
    }

    #[test]
    fn paraboloid_gradient_square() {
        let c = ctx(3, 1);
        let g = sf("-(q1*q2 - x1^2 - x2^2) - x3", c);
        let grad = super_gradient(&g).unwrap();
        let sq = vsquare(&grad).unwrap();
        assert!(sq.coeff_eq(&sf("4*(q1*q2 - x1^2 - x2^2) - 1", c)));
    }

    #[test]
    fn modulus_matches_series() {
        let c = ctx(2, 1);
        let m = abs_x(c).unwrap();
        let want = sf("(x1^2 + x2^2)^(1/2) - 1/2*q1*q2*(x1^2 + x2^2)^(-1/2)", c);
        assert!(m.coeff_eq(&want));
        assert!(m.mul(&m).add(&x_square(c)).coeff_eq(&Grassmann::zero(c)));
    }

    #[test]
    fn dirac_components_of_x_parse() {
        let c = ctx(1, 1);
        assert!(matches!(parse_superfunction("q3", c), Err(Error::UnknownIdent(_))));
        assert!(matches!(parse_superfunction("abs(q1*q2)", c), Err(Error::Unsupported(_))));
    }
}
