//! Berezin reduction of super-integrals to real integrals, and their numeric evaluation.
//!
//! A distribution expansion times a (Clifford-valued) weight becomes, per
//! δ-order and per Clifford component, one real integrand. Tasks sharing a
//! phase and kind are evaluated together on one compiled tape.

mod axial;
mod geom;
mod grid;
mod jetsolve;
mod levelset;
mod radial;

pub use geom::{detect_symmetry, line_roots, Symmetry};

use crate::clifford::{MixedClifford, Word};
use crate::distrib::DistributionExpansion;
use crate::error::{Error, Result};
use crate::expr::{Expr, Node, Tape};
use crate::grassmann::{Blade, Grassmann, SuperContext};
use crate::poly::Poly;
use crate::special::{Kind as SpecialKind, Shape};
use crate::superfun::{from_poly_sf, modulus_sf, super_gradient, x_square, SuperFunction};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

/// Which distribution multiplies the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// H(s·g₀): the region s·g₀ > 0.
    Heaviside(i32),
    /// δ^(j)(g₀).
    Delta(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Backend {
    Radial,
    Axial,
    Levelset,
    Grid,
    Polar,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Radial => "radial",
            Backend::Axial => "axial",
            Backend::Levelset => "levelset",
            Backend::Grid => "grid",
            Backend::Polar => "polar",
        }
    }

    pub fn from_name(s: &str) -> Option<Backend> {
        Some(match s {
            "radial" => Backend::Radial,
            "axial" => Backend::Axial,
            "levelset" => Backend::Levelset,
            "grid" => Backend::Grid,
            "polar" => Backend::Polar,
            _ => return None,
        })
    }
}

/// Clifford component label (orthogonal blade, symplectic word).
pub type Component = (Blade, Word);

/// One real integral ∫ integrand · kind(phase) · Π H(−c) dV.
#[derive(Clone, Debug)]
pub struct BosonicTask {
    pub component: Component,
    pub integrand: Expr,
    pub phase: Expr,
    pub kind: Kind,
    /// Region c < 0 for each entry.
    pub constraints: Vec<Expr>,
    pub symmetry: Symmetry,
    pub m: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Absolute accuracy goal; backend default when unset.
    pub tol: Option<f64>,
    /// Forced backend. Heaviside-only (grid) or δ-only (levelset) requests
    /// leave the other task kind on the automatic choice.
    pub backend: Option<Backend>,
    pub domain_box: Option<Vec<(f64, f64)>>,
    /// A point where the integrand is singular; Heaviside tasks containing it
    /// are integrated in polar coordinates about it.
    pub singular_point: Option<Vec<f64>>,
}

impl Options {
    pub fn with_backend(mut self, b: Backend) -> Self {
        self.backend = Some(b);
        self
    }

    pub fn with_box(mut self, b: Vec<(f64, f64)>) -> Self {
        self.domain_box = Some(b);
        self
    }

    pub fn with_tol(mut self, t: f64) -> Self {
        self.tol = Some(t);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub backend: String,
    pub task_count: usize,
}

/// Clifford-valued integral: one real number per component.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordResult {
    pub components: BTreeMap<Component, f64>,
    pub error_estimate: f64,
    pub backend: String,
    pub task_count: usize,
}

impl CliffordResult {
    pub fn component(&self, blade: Blade, word: &[u8]) -> f64 {
        self.components.get(&(blade, word.to_vec())).copied().unwrap_or(0.0)
    }

    pub fn scalar(&self) -> f64 {
        self.component(0, &[])
    }

    pub fn max_abs(&self) -> f64 {
        self.components.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest componentwise difference.
    pub fn max_deviation(&self, o: &CliffordResult) -> f64 {
        let keys: BTreeSet<_> = self.components.keys().chain(o.components.keys()).collect();
        keys.into_iter()
            .map(|k| (self.components.get(k).copied().unwrap_or(0.0) - o.components.get(k).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn into_scalar(self) -> IntegralResult {
        IntegralResult {
            value: self.scalar(),
            error_estimate: self.error_estimate,
            backend: self.backend,
            task_count: self.task_count,
        }
    }
}

/// Multiply the expansion by the weight and take the Berezin integral blade-wise.
pub fn berezin_reduce(
    d: &DistributionExpansion<Expr>,
    w: &MixedClifford<Expr>,
    constraints: &[Expr],
) -> Result<Vec<BosonicTask>> {
    let ctx = d.ctx;
    ctx.check_same(&w.ctx())?;
    let factor = Expr::float(PI.powi(-(ctx.n as i32)));
    let symmetry = detect_symmetry(ctx.m, &d.phase_body, constraints);
    let mut terms: Vec<(Kind, &Grassmann<Expr>)> = Vec::new();
    if let Some(h) = &d.heaviside {
        terms.push((Kind::Heaviside(d.phase_sign), h));
    }
    for (&j, c) in &d.delta {
        terms.push((Kind::Delta(j), c));
    }
    let mut tasks = Vec::new();
    for (kind, c) in terms {
        if c.is_zero() {
            continue;
        }
        for (key, wa) in w.terms() {
            let top = c.mul(wa).top_coeff();
            if top.is_const_zero() {
                continue;
            }
            tasks.push(BosonicTask {
                component: key.clone(),
                integrand: factor.mul(&top),
                phase: d.phase_body.clone(),
                kind,
                constraints: constraints.to_vec(),
                symmetry,
                m: ctx.m,
            });
        }
    }
    Ok(tasks)
}

/// Shared data for one evaluation: several integrands on one region.
pub(crate) struct Problem<'a> {
    pub m: usize,
    pub phase: &'a Expr,
    pub constraints: &'a [Expr],
    pub integrands: &'a [Expr],
    pub tol: f64,
    pub bbox: &'a [(f64, f64)],
}

pub(crate) struct Outcome {
    pub values: Vec<f64>,
    pub error: f64,
}

impl Problem<'_> {
    /// Largest total degree when every integrand is a polynomial.
    pub fn poly_degree(&self) -> Option<usize> {
        let mut d = 0;
        for e in self.integrands {
            d = d.max(expr_degree(e)?);
        }
        Some(d)
    }

    pub fn radius(&self) -> f64 {
        self.bbox.iter().map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt()
    }
}

/// Total degree if `e` is a polynomial, float constants allowed.
fn expr_degree(e: &Expr) -> Option<usize> {
    match e.node() {
        Node::Const(..) => Some(0),
        Node::Var(_) => Some(1),
        Node::Add(a, b) | Node::Sub(a, b) => Some(expr_degree(a)?.max(expr_degree(b)?)),
        Node::Mul(a, b) => Some(expr_degree(a)? + expr_degree(b)?),
        Node::Div(a, b) => match expr_degree(b)? {
            0 => expr_degree(a),
            _ => None,
        },
        Node::Neg(a) => expr_degree(a),
        Node::PowI(a, k) if *k >= 0 => Some(expr_degree(a)? * *k as usize),
        Node::PowI(a, _) => match expr_degree(a)? {
            0 => Some(0),
            _ => None,
        },
        Node::PowR(a, _) | Node::Func(_, a) => match expr_degree(a)? {
            0 => Some(0),
            _ => None,
        },
    }
}

/// Run `f` at increasing resolution levels until two successive results agree.
pub(crate) fn converge(levels: &[usize], tol: f64, mut f: impl FnMut(usize) -> Result<Vec<f64>>) -> Result<Outcome> {
    let mut prev: Option<Vec<f64>> = None;
    let mut diff = f64::INFINITY;
    for &l in levels {
        let v = f(l)?;
        if let Some(p) = &prev {
            diff = p.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            if diff <= tol * scale {
                return Ok(Outcome { values: v, error: diff });
            }
        }
        prev = Some(v);
    }
    Ok(Outcome { values: prev.expect("at least one level"), error: diff })
}

/// Sum per-node vectors in index order.
pub(crate) fn ordered_sum(parts: Vec<Vec<f64>>, dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for p in parts {
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc
}

fn default_tol(b: Backend) -> f64 {
    match b {
        Backend::Radial | Backend::Axial | Backend::Polar => 1e-11,
        Backend::Levelset => 1e-9,
        Backend::Grid => 1e-8,
    }
}

fn infer_box(m: usize, phase: &Expr, constraints: &[Expr], kind: Kind, sym: Symmetry) -> Result<Vec<(f64, f64)>> {
    let mut all = vec![phase.clone()];
    all.extend(constraints.iter().cloned());
    let tape = Tape::compile(&all);
    let nc = constraints.len();
    if sym == Symmetry::Radial && nc == 0 {
        let r = geom::radial_extent(&tape, m, kind)?;
        return Ok(vec![(-r, r); m]);
    }
    let pred_at = |x: &[f64]| -> bool {
        match tape.eval(x) {
            Ok(v) => geom::in_region(kind, v[0], &v[1..=nc]),
            Err(_) => false,
        }
    };
    if sym != Symmetry::Generic && m >= 2 {
        let b = geom::sampled_box(2, &[true, false], |sz| {
            let mut x = vec![0.0; m];
            x[0] = sz[0];
            x[m - 1] = sz[1];
            pred_at(&x)
        })?;
        let mut out = vec![(-b[0].1, b[0].1); m - 1];
        out.push(b[1]);
        return Ok(out);
    }
    geom::sampled_box(m, &vec![false; m], pred_at)
}

/// Error when sampled points of the box faces lie in the relevant set.
fn check_faces(m: usize, phase: &Expr, constraints: &[Expr], kind: Kind, bbox: &[(f64, f64)]) -> Result<()> {
    let k: usize = match m {
        1..=3 => 17,
        4 => 9,
        _ => 5,
    };
    let mut all = vec![phase.clone()];
    all.extend(constraints.iter().cloned());
    let tape = Tape::compile(&all);
    let mut x = vec![0.0; m];
    let (mut seen_neg, mut seen_pos) = (false, false);
    for d in 0..m {
        for end in [bbox[d].0, bbox[d].1] {
            for idx in 0..k.pow(m as u32 - 1) {
                let mut rest = idx;
                for (e, slot) in x.iter_mut().enumerate() {
                    if e == d {
                        *slot = end;
                        continue;
                    }
                    let (a, b) = bbox[e];
                    *slot = a + (b - a) * (rest % k) as f64 / (k - 1) as f64;
                    rest /= k;
                }
                let Ok(v) = tape.eval(&x) else { continue };
                let hit = match kind {
                    Kind::Heaviside(_) => geom::in_region(kind, v[0], &v[1..]),
                    // the surface crosses the face when g changes sign on it
                    Kind::Delta(_) => {
                        if v[1..].iter().all(|&c| c < 0.0) {
                            seen_neg |= v[0] <= 0.0;
                            seen_pos |= v[0] >= 0.0;
                        }
                        seen_neg && seen_pos
                    }
                };
                if hit {
                    return Err(Error::Domain("region reaches the box boundary".into()));
                }
            }
            (seen_neg, seen_pos) = (false, false);
        }
    }
    Ok(())
}

fn region_contains(m: usize, phase: &Expr, constraints: &[Expr], kind: Kind, y: &[f64]) -> Result<bool> {
    if y.len() != m {
        return Err(Error::Parameter(format!("point has {} coordinates, expected {m}", y.len())));
    }
    let g = phase.eval(y)?;
    let cs = constraints.iter().map(|c| c.eval(y)).collect::<Result<Vec<_>>>()?;
    Ok(geom::in_region(kind, g, &cs))
}

fn evaluate_group(
    m: usize,
    phase: &Expr,
    constraints: &[Expr],
    kind: Kind,
    sym: Symmetry,
    integrands: &[Expr],
    opts: &Options,
) -> Result<(Outcome, Backend)> {
    let bbox = match &opts.domain_box {
        Some(b) => {
            if b.len() != m {
                return Err(Error::Parameter(format!("box has {} intervals, expected {m}", b.len())));
            }
            b.clone()
        }
        None => infer_box(m, phase, constraints, kind, sym)?,
    };
    let polar = match (&opts.singular_point, kind) {
        (Some(y), Kind::Heaviside(_)) => region_contains(m, phase, constraints, kind, y)?,
        _ => false,
    };
    let choice = if polar {
        Backend::Polar
    } else {
        choose(m, kind, sym, constraints.is_empty(), opts.backend)?
    };
    let p = Problem {
        m,
        phase,
        constraints,
        integrands,
        tol: opts.tol.unwrap_or_else(|| default_tol(choice)),
        bbox: &bbox,
    };
    if opts.domain_box.is_some() && matches!(choice, Backend::Radial | Backend::Axial) {
        // these backends only read the box extent, so check the faces here
        check_faces(m, phase, constraints, kind, &bbox)?;
    }
    let run = |b: Backend| -> Result<Outcome> {
        match (b, kind) {
            (Backend::Polar, Kind::Heaviside(s)) => grid::polar(&p, opts.singular_point.as_deref().expect("checked"), s),
            (Backend::Radial, Kind::Delta(j)) => radial::layer(&p, j),
            (Backend::Radial, Kind::Heaviside(s)) => radial::volume(&p, s),
            (Backend::Axial, Kind::Delta(j)) => axial::layer(&p, j),
            (Backend::Axial, Kind::Heaviside(s)) => axial::volume(&p, s),
            (Backend::Levelset, Kind::Delta(j)) => levelset::layer(&p, j),
            (Backend::Grid, Kind::Heaviside(s)) => grid::volume(&p, s),
            _ => Err(Error::Unsupported(format!("backend {} for this task kind", b.name()))),
        }
    };
    match run(choice) {
        Err(Error::Unsupported(msg)) if choice == Backend::Axial && opts.backend.is_none() => {
            let fallback = generic_backend(m, kind).ok_or(Error::Unsupported(msg))?;
            let p2 = Problem { tol: opts.tol.unwrap_or_else(|| default_tol(fallback)), ..p };
            let out = match (fallback, kind) {
                (Backend::Levelset, Kind::Delta(j)) => levelset::layer(&p2, j)?,
                (_, Kind::Heaviside(s)) => grid::volume(&p2, s)?,
                _ => unreachable!("generic_backend pairs kinds"),
            };
            Ok((out, fallback))
        }
        r => Ok((r?, choice)),
    }
}

fn generic_backend(m: usize, kind: Kind) -> Option<Backend> {
    match kind {
        Kind::Delta(j) if (m == 2 || m == 3) && j <= 2 => Some(Backend::Levelset),
        Kind::Delta(_) => None,
        Kind::Heaviside(_) => Some(Backend::Grid),
    }
}

fn choose(m: usize, kind: Kind, sym: Symmetry, unconstrained: bool, forced: Option<Backend>) -> Result<Backend> {
    let auto = || -> Result<Backend> {
        if sym == Symmetry::Radial && unconstrained {
            return Ok(Backend::Radial);
        }
        if sym != Symmetry::Generic && m >= 2 {
            return Ok(Backend::Axial);
        }
        generic_backend(m, kind).ok_or_else(|| {
            Error::Unsupported(format!("δ-derivative tasks without symmetry need m ∈ {{2,3}} and order ≤ 2 (m = {m}, {kind:?})"))
        })
    };
    match (forced, kind) {
        (None, _) => auto(),
        (Some(Backend::Radial), _) => {
            if sym == Symmetry::Radial && unconstrained {
                Ok(Backend::Radial)
            } else {
                Err(Error::Unsupported("radial backend needs a radial phase and no constraints".into()))
            }
        }
        (Some(Backend::Axial), _) => {
            if sym != Symmetry::Generic && m >= 2 {
                Ok(Backend::Axial)
            } else {
                Err(Error::Unsupported("axial backend needs a phase and constraints symmetric about the x_m axis".into()))
            }
        }
        (Some(Backend::Grid), Kind::Heaviside(_)) => Ok(Backend::Grid),
        (Some(Backend::Levelset), Kind::Delta(j)) => {
            if (m == 2 || m == 3) && j <= 2 {
                Ok(Backend::Levelset)
            } else {
                Err(Error::Unsupported("levelset backend handles m ∈ {2,3} and δ-order ≤ 2".into()))
            }
        }
        (Some(Backend::Polar), _) => Err(Error::Unsupported("polar integration is selected through a singular point".into())),
        _ => auto(),
    }
}

/// Evaluate tasks, grouping those that share phase, kind and constraints.
pub fn evaluate(tasks: &[BosonicTask], opts: &Options) -> Result<CliffordResult> {
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, t) in tasks.iter().enumerate() {
        let slot = groups.iter_mut().find(|(r, _)| {
            let r = &tasks[*r];
            r.kind == t.kind
                && r.m == t.m
                && r.phase.same_as(&t.phase)
                && r.constraints.len() == t.constraints.len()
                && r.constraints.iter().zip(&t.constraints).all(|(a, b)| a.same_as(b))
        });
        match slot {
            Some((_, v)) => v.push(i),
            None => groups.push((i, vec![i])),
        }
    }
    let mut components: BTreeMap<Component, f64> = BTreeMap::new();
    let mut error = 0.0;
    let mut names = BTreeSet::new();
    for (rep, members) in &groups {
        let r = &tasks[*rep];
        let integrands: Vec<Expr> = members.iter().map(|&i| tasks[i].integrand.clone()).collect();
        let (out, backend) = evaluate_group(r.m, &r.phase, &r.constraints, r.kind, r.symmetry, &integrands, opts)?;
        for (&i, v) in members.iter().zip(&out.values) {
            if !v.is_finite() {
                return Err(Error::Quadrature("non-finite integral value".into()));
            }
            *components.entry(tasks[i].component.clone()).or_insert(0.0) += v;
        }
        error += out.error;
        names.insert(backend.name());
    }
    Ok(CliffordResult {
        components,
        error_estimate: error,
        backend: if names.is_empty() { "none".into() } else { names.into_iter().collect::<Vec<_>>().join("+") },
        task_count: tasks.len(),
    })
}

/// ∫ d · w with bosonic constraints (region c < 0).
pub fn integrate_distribution(
    d: &DistributionExpansion<Expr>,
    w: &MixedClifford<Expr>,
    constraints: &[Expr],
    opts: &Options,
) -> Result<CliffordResult> {
    let tasks = berezin_reduce(d, w, constraints)?;
    let mut r = evaluate(&tasks, opts)?;
    // components whose tasks all vanished symbolically are reported as zero
    for (k, _) in w.terms() {
        r.components.entry(k.clone()).or_insert(0.0);
    }
    Ok(r)
}

/// ∫ H(−g) Π H(−c_i) F.
pub fn domain_integral(g: &SuperFunction, f: &SuperFunction, constraints: &[Expr], opts: &Options) -> Result<IntegralResult> {
    let d = DistributionExpansion::heaviside(g, -1)?;
    Ok(integrate_distribution(&d, &MixedClifford::scalar(f.clone()), constraints, opts)?.into_scalar())
}

/// Non-oriented ∫ δ(g)|∂_x[g]| Π H(−c_i) F.
pub fn surface_integral(g: &SuperFunction, f: &SuperFunction, constraints: &[Expr], opts: &Options) -> Result<IntegralResult> {
    let d = DistributionExpansion::delta(g, 0)?;
    let weight = modulus_sf(&super_gradient(g)?)?.mul(f);
    Ok(integrate_distribution(&d, &MixedClifford::scalar(weight), constraints, opts)?.into_scalar())
}

/// Oriented −∫ δ(g) ∂_x[g] F, componentwise.
pub fn oriented_surface_integral(
    g: &SuperFunction,
    f: &MixedClifford<Expr>,
    constraints: &[Expr],
    opts: &Options,
) -> Result<CliffordResult> {
    let d = DistributionExpansion::delta(g, 0)?;
    let dg = MixedClifford::scalar(g.clone()).dirac_left()?;
    let w = dg.neg().mul(f)?;
    integrate_distribution(&d, &w, constraints, opts)
}

/// The superball phase −x² − R².
pub fn superball_phase(ctx: SuperContext, r: f64) -> SuperFunction {
    let c = Grassmann::scalar(ctx, Expr::float(r * r));
    x_square(ctx).neg().sub(&c)
}

/// Phase, constraints and a bounding box for a catalog shape.
#[derive(Clone, Debug)]
pub struct ShapeSetup {
    pub phase: SuperFunction,
    pub constraints: Vec<Expr>,
    pub domain_box: Vec<(f64, f64)>,
}

/// Superball/supersphere of radius `param`, super-paraboloid of height `param`
/// (x̂² < x_m < h), super-hyperboloid of half height `param` (x̂² < 1 + x_m², |x_m| < h).
pub fn shape_setup(shape: Shape, ctx: SuperContext, param: f64) -> Result<ShapeSetup> {
    let m = ctx.m;
    if !(param > 0.0) {
        return Err(Error::Parameter(format!("shape parameter must be positive, got {param}")));
    }
    let xm = || Grassmann::scalar(ctx, Expr::var(m));
    // x̂² = x² + x_m²
    let xhat2 = || x_square(ctx).add(&xm().mul(&xm()));
    Ok(match shape {
        Shape::Superball | Shape::Supersphere => {
            let r = 1.25 * param + 0.05;
            ShapeSetup { phase: superball_phase(ctx, param), constraints: vec![], domain_box: vec![(-r, r); m] }
        }
        Shape::Paraboloid => {
            if m < 2 {
                return Err(Error::Parameter("the paraboloid needs m ≥ 2".into()));
            }
            let s = 1.3 * param.sqrt() + 0.05;
            let mut b = vec![(-s, s); m - 1];
            b.push((-0.25 * param - 0.05, 1.25 * param + 0.05));
            ShapeSetup {
                phase: xhat2().neg().sub(&xm()),
                constraints: vec![Expr::var(m).sub(&Expr::float(param))],
                domain_box: b,
            }
        }
        Shape::Hyperboloid => {
            if m < 2 {
                return Err(Error::Parameter("the hyperboloid needs m ≥ 2".into()));
            }
            let s = 1.3 * (1.0 + param * param).sqrt() + 0.05;
            let mut b = vec![(-s, s); m - 1];
            b.push((-1.25 * param - 0.05, 1.25 * param + 0.05));
            let one = Grassmann::one(ctx);
            ShapeSetup {
                phase: xhat2().neg().sub(&xm().mul(&xm())).sub(&one),
                constraints: vec![
                    Expr::var(m).sub(&Expr::float(param)),
                    Expr::var(m).neg().sub(&Expr::float(param)),
                ],
                domain_box: b,
            }
        }
    })
}

/// Engine value for a catalog entry.
pub fn shape_integral(shape: Shape, kind: SpecialKind, ctx: SuperContext, param: f64, opts: &Options) -> Result<IntegralResult> {
    let setup = shape_setup(shape, ctx, param)?;
    let opts = Options { domain_box: opts.domain_box.clone().or(Some(setup.domain_box.clone())), ..opts.clone() };
    let one = Grassmann::one(ctx);
    match kind {
        SpecialKind::Volume => domain_integral(&setup.phase, &one, &setup.constraints, &opts),
        SpecialKind::Area => surface_integral(&setup.phase, &one, &setup.constraints, &opts),
    }
}

/// (Pizzetti series, engine integral over the unit supersphere).
pub fn pizzetti_compare(p: &Grassmann<Poly>, opts: &Options) -> Result<(f64, f64)> {
    let series = crate::special::pizzetti(p)?;
    let g = superball_phase(p.ctx(), 1.0);
    let engine = surface_integral(&g, &from_poly_sf(p), &[], opts)?.value;
    Ok((series, engine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::superfun::parse_superfunction;

    #[test]
    fn ball_volume_task_shape() {
        let ctx = SuperContext::new(3, 1).unwrap();
        let g = superball_phase(ctx, 1.0);
        let d = DistributionExpansion::heaviside(&g, -1).unwrap();
        let one = MixedClifford::scalar(Grassmann::one(ctx));
        let tasks = berezin_reduce(&d, &one, &[]).unwrap();
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].kind, Kind::Delta(0));
        assert_eq!(tasks[0].symmetry, Symmetry::Radial);
        let r = evaluate(&tasks, &Options::default()).unwrap();
        assert!((r.scalar() - 2.0).abs() < 1e-10, "{}", r.scalar());
    }

    #[test]
    fn classical_disc_and_circle() {
        let ctx = SuperContext::new(2, 0).unwrap();
        let g = parse_superfunction("x1^2 + x2^2 - 1", ctx).unwrap();
        let one = Grassmann::one(ctx);
        let v = domain_integral(&g, &one, &[], &Options::default()).unwrap();
        assert!((v.value - PI).abs() < 1e-10);
        let s = surface_integral(&g, &one, &[], &Options::default()).unwrap();
        assert!((s.value - 2.0 * PI).abs() < 1e-10);
    }
}
