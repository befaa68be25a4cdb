//! Fundamental solutions of the Dirac operator, and the Stokes and
//! Cauchy–Pompeiu identities as numeric checks.
//!
//! φ_j solves ∂_x̲ φ_{j+1} = φ_j with ∂_x̲ φ_1 = δ, where ∂_x̲ = Σ e_j ∂_j and
//! e_j² = −1. Even members are scalar kernels r^p (a log r + b), odd members
//! are x̲ r^p (a log r + b).

use crate::clifford::MixedClifford;
use crate::distrib::DistributionExpansion;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::grassmann::{Grassmann, SuperContext};
use crate::integrate::{integrate_distribution, CliffordResult, Options};
use crate::scalar::Scalar;
use crate::special::sphere_area;
use crate::superfun::{eval_at, SuperFunction};

/// c-weighted radial kernel r^power (log_coeff·log r + coeff), times x̲ when `vector`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialKernel {
    pub vector: bool,
    pub power: i32,
    pub coeff: f64,
    pub log_coeff: f64,
}

impl RadialKernel {
    pub fn has_log(&self) -> bool {
        self.log_coeff != 0.0
    }

    /// The radial profile at r > 0.
    pub fn profile(&self, r: f64) -> f64 {
        r.powi(self.power) * (self.log_coeff * r.ln() + self.coeff)
    }

    /// Value at x̲ ≠ 0: (scalar part, vector part).
    pub fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let p = self.profile(r);
        if self.vector {
            (0.0, x.iter().map(|v| v * p).collect())
        } else {
            (p, vec![0.0; x.len()])
        }
    }

    /// The profile as an expression in r² = `r2`.
    fn profile_expr(&self, r2: &Expr) -> Expr {
        let pow = if self.power == 0 { Expr::int(1) } else { r2.powr(Scalar::ratio(self.power as i64, 2)) };
        let mut inner = Expr::float(self.coeff);
        if self.has_log() {
            inner = inner.add(&Expr::float(0.5 * self.log_coeff).mul(&r2.log()));
        }
        pow.mul(&inner)
    }

    /// The kernel at x̲ − y̲ as a Clifford-valued superfunction.
    pub fn to_mixed(&self, ctx: SuperContext, y: &[f64]) -> MixedClifford<Expr> {
        let d: Vec<Expr> = (0..ctx.m).map(|i| Expr::var(i + 1).sub(&Expr::float(y.get(i).copied().unwrap_or(0.0)))).collect();
        let r2 = d.iter().fold(Expr::int(0), |acc, v| acc.add(&v.mul(v)));
        let prof = self.profile_expr(&r2);
        if !self.vector {
            return MixedClifford::scalar(Grassmann::scalar(ctx, prof));
        }
        let mut out = MixedClifford::zero(ctx);
        for (j, dj) in d.iter().enumerate() {
            out.add_term(1 << j, Vec::new(), Grassmann::scalar(ctx, dj.mul(&prof)));
        }
        out
    }

    /// ∂_x̲ of the kernel, away from the origin.
    pub fn dirac(&self, m: usize) -> RadialKernel {
        let q = self.power as f64;
        let (a, b) = (self.log_coeff, self.coeff);
        if self.vector {
            // ∂(x̲ f) = −m f − r f'
            let s = m as f64 + q;
            RadialKernel { vector: false, power: self.power, coeff: -s * b - a, log_coeff: -s * a }
        } else {
            // ∂f = x̲ f'/r
            RadialKernel { vector: true, power: self.power - 2, coeff: q * b + a, log_coeff: q * a }
        }
    }
}

/// φ_1, …, φ_jmax in dimension m.
pub fn phi_family(m: usize, jmax: usize) -> Result<Vec<RadialKernel>> {
    if m < 2 {
        return Err(Error::Unsupported(format!("kernels need m ≥ 2, got {m}")));
    }
    let am = sphere_area(m as f64);
    let mf = m as f64;
    let mut evens: Vec<RadialKernel> = Vec::new();
    // φ_2
    let mut cur = if m == 2 {
        RadialKernel { vector: false, power: 0, coeff: 0.0, log_coeff: -1.0 / (2.0 * std::f64::consts::PI) }
    } else {
        RadialKernel { vector: false, power: 2 - m as i32, coeff: 1.0 / ((mf - 2.0) * am), log_coeff: 0.0 }
    };
    evens.push(cur.clone());
    while 2 * evens.len() < jmax {
        let q = cur.power + 2;
        let qf = q as f64;
        let k = qf * (qf + mf - 2.0);
        let e = 2.0 * qf + mf - 2.0;
        let (a, b) = (cur.log_coeff, cur.coeff);
        let next = if k != 0.0 {
            let a2 = -a / k;
            RadialKernel { vector: false, power: q, coeff: -(b + e * a2) / k, log_coeff: a2 }
        } else if a == 0.0 && e != 0.0 {
            RadialKernel { vector: false, power: q, coeff: 0.0, log_coeff: -b / e }
        } else {
            return Err(Error::Unsupported(format!("φ_{} in dimension {m} needs a log² kernel", 2 * evens.len() + 2)));
        };
        evens.push(next.clone());
        cur = next;
    }
    let mut out = Vec::new();
    for j in 1..=jmax {
        if j % 2 == 0 {
            out.push(evens[j / 2 - 1].clone());
        } else if j == 1 {
            out.push(RadialKernel { vector: true, power: -(m as i32), coeff: -1.0 / am, log_coeff: 0.0 });
        } else {
            out.push(evens[(j + 1) / 2 - 1].dirac(m));
        }
    }
    Ok(out)
}

/// One term c·φ_j·x̀^k of ν₁.
#[derive(Clone, Debug, PartialEq)]
pub struct NuTerm {
    pub coeff: f64,
    pub j: usize,
    pub kernel: RadialKernel,
    pub xgrave_power: usize,
}

/// ν₁ in R^{m|2n}: the fundamental solution of the super Dirac operator.
#[derive(Clone, Debug)]
pub struct SuperCauchyKernel {
    pub ctx: SuperContext,
    pub terms: Vec<NuTerm>,
}

fn fact(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn nu1(m: usize, n: usize) -> Result<SuperCauchyKernel> {
    let ctx = SuperContext::new(m, n)?;
    let phi = phi_family(m, 2 * n + 1)?;
    let pn = std::f64::consts::PI.powi(n as i32);
    let mut terms = Vec::new();
    for k in 0..n {
        terms.push(NuTerm {
            coeff: pn * 2f64.powi(2 * k as i32 + 1) * fact(k) / fact(n - k - 1),
            j: 2 * k + 2,
            kernel: phi[2 * k + 1].clone(),
            xgrave_power: 2 * n - 2 * k - 1,
        });
    }
    for k in 0..=n {
        terms.push(NuTerm {
            coeff: -pn * 4f64.powi(k as i32) * fact(k) / fact(n - k),
            j: 2 * k + 1,
            kernel: phi[2 * k].clone(),
            xgrave_power: 2 * n - 2 * k,
        });
    }
    Ok(SuperCauchyKernel { ctx, terms })
}

/// x̀ = Σ è_j x̀_j raised to the k-th power.
pub fn xgrave_power(ctx: SuperContext, k: usize) -> Result<MixedClifford<Expr>> {
    let sq = Grassmann::<Expr>::xgrave_square(ctx).pow((k / 2) as u32);
    let mut out = MixedClifford::scalar(sq);
    if k % 2 == 1 {
        let mut v = MixedClifford::zero(ctx);
        for j in 1..=2 * ctx.n {
            v.add_term(0, vec![j as u8], Grassmann::generator(ctx, j)?);
        }
        out = v.mul(&out)?;
    }
    Ok(out)
}

impl SuperCauchyKernel {
    /// ν₁(x − y) with the fermionic part of y set to zero.
    pub fn to_mixed(&self, y: &[f64]) -> Result<MixedClifford<Expr>> {
        let mut out = MixedClifford::zero(self.ctx);
        for t in &self.terms {
            let c = Grassmann::scalar(self.ctx, Expr::float(t.coeff));
            let k = t.kernel.to_mixed(self.ctx, y).scale_left(&c);
            out = out.add(&k.mul(&xgrave_power(self.ctx, t.xgrave_power)?)?);
        }
        Ok(out)
    }
}

/// δ(x) = δ(x̲)(πⁿ/n!) x̀^{2n}: pairs a superfunction with its value at (y̲, 0).
#[derive(Clone, Copy, Debug)]
pub struct SuperDiracDelta {
    pub ctx: SuperContext,
}

pub fn super_dirac_delta(m: usize, n: usize) -> Result<SuperDiracDelta> {
    Ok(SuperDiracDelta { ctx: SuperContext::new(m, n)? })
}

impl SuperDiracDelta {
    /// The Grassmann factor (πⁿ/n!) x̀^{2n}.
    pub fn factor(&self) -> Grassmann<Scalar> {
        let n = self.ctx.n;
        let s = Grassmann::<Scalar>::xgrave_square(self.ctx).pow(n as u32);
        s.scale(&Scalar::float(std::f64::consts::PI.powi(n as i32) / fact(n)))
    }

    /// ⟨δ(x − y), G⟩ with ỳ = 0.
    pub fn pair(&self, g: &SuperFunction, y: &[f64]) -> Result<f64> {
        let v = eval_at(g, y)?;
        let prod = self.factor().mul(&v);
        let top = prod.top_coeff().to_f64();
        Ok(top * std::f64::consts::PI.powi(-(self.ctx.n as i32)))
    }
}

fn combine(a: &CliffordResult, b: &CliffordResult, sign: f64) -> CliffordResult {
    let mut out = a.clone();
    for (k, v) in &b.components {
        *out.components.entry(k.clone()).or_insert(0.0) += sign * v;
    }
    out.error_estimate = a.error_estimate + b.error_estimate;
    out.task_count = a.task_count + b.task_count;
    if a.backend != b.backend {
        out.backend = format!("{}+{}", a.backend, b.backend);
    }
    out
}

/// Both sides of the Stokes identity over {g < 0}.
#[derive(Clone, Debug)]
pub struct StokesReport {
    pub lhs: CliffordResult,
    pub rhs: CliffordResult,
    pub deviation: f64,
}

/// ∫H(−g)[(F∂_x)G + F(∂_x G)] against ∫F δ(g) ∂_x[g] G.
pub fn stokes_check(
    f: &MixedClifford<Expr>,
    g_fun: &MixedClifford<Expr>,
    g: &SuperFunction,
    opts: &Options,
) -> Result<StokesReport> {
    let body = f.dirac_right()?.mul(g_fun)?.add(&f.mul(&g_fun.dirac_left()?)?);
    let lhs = integrate_distribution(&DistributionExpansion::heaviside(g, -1)?, &body, &[], opts)?;
    let dg = MixedClifford::scalar(g.clone()).dirac_left()?;
    let surf = f.mul(&dg)?.mul(g_fun)?;
    let rhs = integrate_distribution(&DistributionExpansion::delta(g, 0)?, &surf, &[], opts)?;
    let deviation = lhs.max_deviation(&rhs);
    Ok(StokesReport { lhs, rhs, deviation })
}

/// ∫ν₁(x−y)δ(g)(∂_x g)G − ∫ν₁(x−y)H(−g)(∂_x G), with ỳ = 0.
/// Equals G(y̲, 0) for y̲ inside {g₀ < 0} and 0 outside.
pub fn cauchy_pompeiu(g_fun: &SuperFunction, g: &SuperFunction, y: &[f64], opts: &Options) -> Result<CliffordResult> {
    let ctx = g.ctx();
    ctx.check_same(&g_fun.ctx())?;
    if y.len() != ctx.m {
        return Err(Error::Parameter(format!("point has {} coordinates, expected {}", y.len(), ctx.m)));
    }
    let g0 = eval_at(g, y)?.body().to_f64();
    if !(g0.abs() > 1e-9) {
        return Err(Error::Refused("the point lies on the surface".into()));
    }
    let nu = nu1(ctx.m, ctx.n)?.to_mixed(y)?;
    let gm = MixedClifford::scalar(g_fun.clone());
    let dg = MixedClifford::scalar(g.clone()).dirac_left()?;
    let surf = nu.mul(&dg)?.mul(&gm)?;
    let s = integrate_distribution(&DistributionExpansion::delta(g, 0)?, &surf, &[], opts)?;
    let vol = nu.mul(&gm.dirac_left()?)?;
    let mut vopts = opts.clone();
    if g0 < 0.0 {
        vopts.singular_point = Some(y.to_vec());
    }
    let v = integrate_distribution(&DistributionExpansion::heaviside(g, -1)?, &vol, &[], &vopts)?;
    Ok(combine(&s, &v, -1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superfun::parse_superfunction;

    #[test]
    fn term_counts() {
        for n in 0..3 {
            assert_eq!(nu1(3, n).unwrap().terms.len(), 2 * n + 1);
        }
        let t = nu1(3, 1).unwrap().terms;
        assert_eq!((t[0].j, t[0].xgrave_power), (2, 1));
        assert!((t[0].coeff - 2.0 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn n0_is_minus_phi1() {
        let nu = nu1(3, 0).unwrap();
        let phi = phi_family(3, 1).unwrap();
        assert_eq!(nu.terms.len(), 1);
        assert_eq!(nu.terms[0].kernel, phi[0]);
        assert_eq!(nu.terms[0].coeff, -1.0);
    }

    #[test]
    fn xgrave_square_is_scalar() {
        let ctx = SuperContext::new(2, 2).unwrap();
        let x1 = xgrave_power(ctx, 1).unwrap();
        let x2 = x1.mul(&x1).unwrap();
        assert!(x2.coeff_eq(&xgrave_power(ctx, 2).unwrap()));
    }

    #[test]
    fn delta_pairing() {
        let ctx = SuperContext::new(2, 1).unwrap();
        let d = super_dirac_delta(2, 1).unwrap();
        let one = parse_superfunction("1", ctx).unwrap();
        assert!((d.pair(&one, &[0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let g = parse_superfunction("x1 + q1*q2*x2", ctx).unwrap();
        assert!((d.pair(&g, &[0.3, 0.7]).unwrap() - 0.3).abs() < 1e-15);
    }
}
