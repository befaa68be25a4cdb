//! Problem description: flags merged over an optional key=value file.

use clap::Args;
use std::collections::BTreeMap;
use std::path::PathBuf;
use superint::expr::{self, Expr};
use superint::grassmann::SuperContext;
use superint::integrate::{shape_setup, superball_phase, Backend, Options};
use superint::special::{catalog, ClosedFormValue, Kind, Shape};
use superint::superfun::{eval_at, parse_superfunction, SuperFunction};
use superint::{Error, Result};

#[derive(Args, Debug, Clone, Default)]
pub struct ProblemArgs {
    /// Problem file with key=value lines; flags override its entries.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Phase superfunction g; the region is g < 0.
    #[arg(long, allow_hyphen_values = true)]
    pub phase: Option<String>,
    /// Bosonic constraint c, restricting to c < 0. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub constraint: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub integrand: Option<String>,
    #[arg(long, value_parser = ["radial", "axial", "levelset", "grid"])]
    pub backend: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// `lo:hi` for every coordinate, or one `lo:hi` per coordinate separated by commas.
    #[arg(long = "box", allow_hyphen_values = true)]
    pub domain_box: Option<String>,
    /// Named parameter, e.g. R=2, h=1, y=0.2,0.1. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub param: Vec<String>,
    /// Symmetry axis; it is swapped with the last coordinate.
    #[arg(long)]
    pub axis: Option<String>,
}

/// A parsed problem.
pub struct Problem {
    pub ctx: SuperContext,
    pub phase: Option<SuperFunction>,
    pub constraints: Vec<Expr>,
    pub integrand: SuperFunction,
    pub extra: BTreeMap<String, String>,
    pub params: BTreeMap<String, String>,
    pub opts: Options,
    pub tol: Option<f64>,
    pub axis: Option<usize>,
}

fn spec(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

fn read_file(path: &PathBuf) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| spec(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, val) = line.split_once('=').ok_or_else(|| spec(format!("{}:{}: expected key=value", path.display(), k + 1)))?;
        out.push((key.trim().to_string(), val.trim().to_string()));
    }
    Ok(out)
}

fn parse_box(text: &str, m: usize) -> Result<Vec<(f64, f64)>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let mut out = Vec::new();
    for p in &parts {
        let (lo, hi) = p.split_once(':').ok_or_else(|| spec(format!("box interval `{p}` is not lo:hi")))?;
        let lo: f64 = lo.trim().parse().map_err(|_| spec(format!("bad box bound `{lo}`")))?;
        let hi: f64 = hi.trim().parse().map_err(|_| spec(format!("bad box bound `{hi}`")))?;
        if !(lo < hi) {
            return Err(spec(format!("empty box interval {lo}:{hi}")));
        }
        out.push((lo, hi));
    }
    match out.len() {
        1 => Ok(vec![out[0]; m]),
        k if k == m => Ok(out),
        k => Err(spec(format!("box has {k} intervals, expected 1 or {m}"))),
    }
}

fn parse_axis(text: &str, m: usize) -> Result<usize> {
    let k: usize = text.trim().trim_start_matches('x').parse().map_err(|_| spec(format!("bad axis `{text}`")))?;
    if k == 0 || k > m {
        return Err(spec(format!("axis x{k} outside x1..x{m}")));
    }
    Ok(k)
}

/// Exchange x_k and x_m in an expression.
fn swap_expr(e: &Expr, k: usize, m: usize) -> Expr {
    if k == m {
        return e.clone();
    }
    e.rebuild(&|j| {
        if j == k {
            Some(Expr::var(m))
        } else if j == m {
            Some(Expr::var(k))
        } else {
            None
        }
    })
}

fn swap_sf(f: &SuperFunction, k: usize, m: usize) -> SuperFunction {
    f.map(|c| swap_expr(c, k, m))
}

impl Problem {
    pub fn load(a: &ProblemArgs) -> Result<Problem> {
        let mut file = Vec::new();
        if let Some(p) = &a.file {
            file = read_file(p)?;
        }
        let get = |key: &str| file.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let all = |key: &str| file.iter().filter(|(k, _)| k == key).map(|(_, v)| v.clone()).collect::<Vec<_>>();
        let num = |flag: Option<usize>, key: &str| -> Result<Option<usize>> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => get(key).map(|s| s.parse().map_err(|_| spec(format!("bad value for {key}: `{s}`")))).transpose(),
            }
        };
        let m = num(a.m, "m")?.ok_or_else(|| spec("--m is required"))?;
        let n = num(a.n, "n")?.unwrap_or(0);
        let ctx = SuperContext::new(m, n)?;
        let axis = a.axis.clone().or_else(|| get("axis")).map(|s| parse_axis(&s, m)).transpose()?;
        let sw = |f: SuperFunction| match axis {
            Some(k) => swap_sf(&f, k, m),
            None => f,
        };
        let phase = a.phase.clone().or_else(|| get("phase")).map(|t| parse_superfunction(&t, ctx)).transpose()?.map(sw);
        if let Some(g) = &phase {
            g.require_even("the phase")?;
        }
        let ctexts = if a.constraint.is_empty() { all("constraint") } else { a.constraint.clone() };
        let mut constraints = Vec::new();
        for t in &ctexts {
            let c = expr::parse(t).map_err(|e| spec(format!("constraint `{t}` must be a bosonic expression: {e}")))?;
            let v = c.max_var();
            if v > m {
                return Err(spec(format!("constraint `{t}` uses x{v} but m = {m}")));
            }
            constraints.push(match axis {
                Some(k) => swap_expr(&c, k, m),
                None => c,
            });
        }
        let itext = a.integrand.clone().or_else(|| get("integrand")).unwrap_or_else(|| "1".into());
        let integrand = sw(parse_superfunction(&itext, ctx)?);
        let mut params = BTreeMap::new();
        let ptexts = if a.param.is_empty() { all("param") } else { a.param.clone() };
        for p in ptexts {
            let (k, v) = p.split_once('=').ok_or_else(|| spec(format!("parameter `{p}` is not k=v")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut opts = Options::default();
        if let Some(b) = a.backend.clone().or_else(|| get("backend")) {
            opts.backend = Some(Backend::from_name(&b).ok_or_else(|| spec(format!("unknown backend `{b}`")))?);
        }
        let tol = match a.tol {
            Some(t) => Some(t),
            None => get("tol").map(|s| s.parse::<f64>().map_err(|_| spec(format!("bad tol `{s}`")))).transpose()?,
        };
        if let Some(t) = tol {
            if !(t > 0.0) {
                return Err(spec("--tol must be positive"));
            }
            opts.tol = Some(t);
        }
        if let Some(b) = a.domain_box.clone().or_else(|| get("box")) {
            let mut b = parse_box(&b, m)?;
            if let Some(k) = axis {
                b.swap(k - 1, m - 1);
            }
            opts.domain_box = Some(b);
        }
        let mut extra = BTreeMap::new();
        for key in ["right", "shape", "kind"] {
            if let Some(v) = get(key) {
                extra.insert(key.to_string(), v);
            }
        }
        Ok(Problem { ctx, phase, constraints, integrand, extra, params, opts, tol, axis })
    }

    pub fn param_f64(&self, keys: &[&str], default: f64) -> Result<f64> {
        for k in keys {
            if let Some(v) = self.params.get(*k) {
                return v.parse().map_err(|_| spec(format!("parameter {k} = `{v}` is not a number")));
            }
        }
        Ok(default)
    }

    /// The point y̲ from `--param y=a,b,…` (origin when absent), in engine coordinates.
    pub fn point(&self) -> Result<Vec<f64>> {
        let m = self.ctx.m;
        let mut y = match self.params.get("y") {
            None => vec![0.0; m],
            Some(s) => s
                .split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| spec(format!("bad coordinate `{v}` in y"))))
                .collect::<Result<Vec<_>>>()?,
        };
        if y.len() != m {
            return Err(spec(format!("y has {} coordinates, expected {m}", y.len())));
        }
        if let Some(k) = self.axis {
            y.swap(k - 1, m - 1);
        }
        Ok(y)
    }

    /// The phase, or the superball phase of radius R when none is given.
    pub fn phase_or_ball(&self) -> Result<SuperFunction> {
        match &self.phase {
            Some(g) => Ok(g.clone()),
            None => Ok(superball_phase(self.ctx, self.param_f64(&["R", "r"], 1.0)?)),
        }
    }

    pub fn require_phase(&self) -> Result<&SuperFunction> {
        self.phase.as_ref().ok_or_else(|| spec("--phase is required"))
    }
}

/// Deterministic probe points in [−0.9, 0.9]^m.
fn probes(m: usize) -> Vec<Vec<f64>> {
    (0..6).map(|k| (0..m).map(|i| 0.9 * (((k * 7 + i * 3 + 1) as f64) * 0.618_034).fract() * 2.0 - 0.9).collect()).collect()
}

fn same_sf(a: &SuperFunction, b: &SuperFunction) -> bool {
    let d = a.sub(b);
    probes(a.ctx().m).iter().all(|x| match eval_at(&d, x) {
        Ok(v) => v.terms().all(|(_, c)| c.to_f64().abs() < 1e-12),
        Err(_) => false,
    })
}

fn same_expr(a: &Expr, b: &Expr, m: usize) -> bool {
    probes(m).iter().all(|x| match (a.eval(x), b.eval(x)) {
        (Ok(u), Ok(v)) => (u - v).abs() < 1e-12,
        _ => false,
    })
}

fn same_constraints(a: &[Expr], b: &[Expr], m: usize) -> bool {
    a.len() == b.len()
        && (a.iter().zip(b).all(|(x, y)| same_expr(x, y, m)) || a.iter().zip(b.iter().rev()).all(|(x, y)| same_expr(x, y, m)))
}

/// The catalog entry the problem describes, if any (integrand 1 only).
pub fn match_catalog(p: &Problem, g: &SuperFunction, kind: Kind) -> Option<(Shape, f64, ClosedFormValue)> {
    let ctx = p.ctx;
    let one = superint::grassmann::Grassmann::one(ctx);
    if !same_sf(&p.integrand, &one) {
        return None;
    }
    let origin = vec![0.0; ctx.m];
    let mut candidates = Vec::new();
    if p.constraints.is_empty() {
        let r2 = -eval_at(g, &origin).ok()?.body().to_f64();
        if r2 > 0.0 {
            candidates.push((Shape::Superball, r2.sqrt()));
        }
    } else if let Ok(c0) = p.constraints[0].eval(&origin) {
        let shape = if p.constraints.len() == 1 { Shape::Paraboloid } else { Shape::Hyperboloid };
        if -c0 > 0.0 {
            candidates.push((shape, -c0));
        }
    }
    for (shape, param) in candidates {
        let Ok(setup) = shape_setup(shape, ctx, param) else { continue };
        if same_sf(g, &setup.phase) && same_constraints(&p.constraints, &setup.constraints, ctx.m) {
            if let Ok(cf) = catalog(shape, kind, ctx.m, ctx.n, param) {
                return Some((shape, param, cf));
            }
        }
    }
    None
}
