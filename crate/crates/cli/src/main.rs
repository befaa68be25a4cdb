//! `superint`: integrals over superspace domains and surfaces from the command line.
//!
//! Exit codes: 0 success, 2 a result outside its tolerance, 3 an invalid
//! problem or an engine error.

mod problem;
mod report;

use clap::{Parser, Subcommand};
use problem::{match_catalog, Problem, ProblemArgs};
use report::{components, render, Format};
use serde_json::{json, Map, Value};
use std::process::ExitCode;
use superint::clifford::MixedClifford;
use superint::greenkernel::{cauchy_pompeiu, stokes_check};
use superint::integrate::{domain_integral, oriented_surface_integral, pizzetti_compare, shape_integral, surface_integral, Options};
use superint::special::{catalog, Kind, Shape};
use superint::superfun::{eval_at, parse_superfunction, to_poly_sf};
use superint::verify::{run_suite, suite_id, DEFAULT_SEED, SUITES};
use superint::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "superint", version, about = "Integration over domains and surfaces in superspace R^{m|2n}")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Human-readable table instead of JSON/CSV.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SUPERINT_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// ∫ H(−g) F over the region g < 0.
    Volume(ProblemArgs),
    /// ∫ δ(g) |∂g| F over the surface g = 0.
    Surface {
        #[command(flatten)]
        p: ProblemArgs,
        /// Oriented surface integral −∫ δ(g) ∂g F, reported per Clifford component.
        #[arg(long)]
        oriented: bool,
    },
    /// Pizzetti series of a polynomial against the engine integral over the unit supersphere.
    Pizzetti(ProblemArgs),
    /// Both sides of the Stokes identity for F (--integrand) and G (--right).
    Stokes {
        #[command(flatten)]
        p: ProblemArgs,
        #[arg(long, allow_hyphen_values = true)]
        right: Option<String>,
    },
    /// Cauchy–Pompeiu representation of G (--integrand) at the point --param y=….
    CauchyPompeiu(ProblemArgs),
    /// Closed-form volume or area of a catalog shape.
    Catalog {
        /// superball, supersphere, paraboloid or hyperboloid
        shape: String,
        /// volume or area
        kind: String,
        #[command(flatten)]
        p: ProblemArgs,
        /// Also evaluate the engine and report the deviation.
        #[arg(long)]
        engine: bool,
    },
    /// Run verification suites: all, a suite name, or a criterion number.
    Verify {
        #[arg(default_value = "all")]
        which: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// A finished report and whether it met its tolerance.
struct Outcome {
    report: Value,
    ok: bool,
}

fn base(cmd: &str, p: &Problem) -> Map<String, Value> {
    let mut r = Map::new();
    r.insert("schema".into(), json!(1));
    r.insert("command".into(), json!(cmd));
    r.insert("m".into(), json!(p.ctx.m));
    r.insert("n".into(), json!(p.ctx.n));
    r.insert("M".into(), json!(p.ctx.superdim()));
    r
}

/// Fills value/closed_form/deviation/status; `check` is the tolerance for the deviation.
fn finish(mut r: Map<String, Value>, value: f64, error: f64, backend: &str, closed: Option<f64>, check: f64) -> Outcome {
    let deviation = closed.map(|c| (value - c).abs());
    let ok = deviation.map_or(true, |d| d <= check);
    r.insert("value".into(), json!(value));
    r.insert("error_estimate".into(), json!(error));
    r.insert("backend".into(), json!(backend));
    r.insert("closed_form".into(), json!(closed));
    r.insert("deviation".into(), json!(deviation));
    r.insert("tolerance".into(), json!(check));
    r.insert("status".into(), json!(if ok { "ok" } else { "tolerance" }));
    Outcome { report: Value::Object(r), ok }
}

fn volume(a: &ProblemArgs) -> Result<Outcome> {
    let p = Problem::load(a)?;
    let g = p.require_phase()?;
    let res = domain_integral(g, &p.integrand, &p.constraints, &p.opts)?;
    let mut r = base("volume", &p);
    let cat = match_catalog(&p, g, Kind::Volume);
    if let Some((shape, param, _)) = &cat {
        r.insert("shape".into(), json!(shape.name()));
        r.insert("param".into(), json!(param));
    }
    Ok(finish(r, res.value, res.error_estimate, &res.backend, cat.map(|c| c.2.value), p.tol.unwrap_or(1e-6)))
}

fn surface(a: &ProblemArgs, oriented: bool) -> Result<Outcome> {
    let p = Problem::load(a)?;
    let g = p.require_phase()?;
    let mut r = base("surface", &p);
    if oriented {
        let res = oriented_surface_integral(g, &MixedClifford::scalar(p.integrand.clone()), &p.constraints, &p.opts)?;
        r.insert("oriented".into(), json!(true));
        r.insert("components".into(), components(&res));
        return Ok(finish(r, res.scalar(), res.error_estimate, &res.backend, None, p.tol.unwrap_or(1e-6)));
    }
    let res = surface_integral(g, &p.integrand, &p.constraints, &p.opts)?;
    let cat = match_catalog(&p, g, Kind::Area);
    if let Some((shape, param, _)) = &cat {
        r.insert("shape".into(), json!(shape.name()));
        r.insert("param".into(), json!(param));
    }
    Ok(finish(r, res.value, res.error_estimate, &res.backend, cat.map(|c| c.2.value), p.tol.unwrap_or(1e-6)))
}

fn pizzetti(a: &ProblemArgs) -> Result<Outcome> {
    let p = Problem::load(a)?;
    let poly = to_poly_sf(&p.integrand).ok_or_else(|| Error::Parameter("the Pizzetti formula needs a polynomial integrand".into()))?;
    let (series, engine) = pizzetti_compare(&poly, &p.opts)?;
    let r = base("pizzetti", &p);
    Ok(finish(r, engine, 0.0, "pizzetti", Some(series), p.tol.unwrap_or(1e-7) * (1.0 + series.abs())))
}

fn stokes(a: &ProblemArgs, right: Option<String>) -> Result<Outcome> {
    let p = Problem::load(a)?;
    let g = p.phase_or_ball()?;
    let text = right.or_else(|| p.extra.get("right").cloned()).unwrap_or_else(|| "1".into());
    let gf = parse_superfunction(&text, p.ctx)?;
    let rep = stokes_check(&MixedClifford::scalar(p.integrand.clone()), &MixedClifford::scalar(gf), &g, &p.opts)?;
    let mut r = base("stokes", &p);
    r.insert("lhs".into(), components(&rep.lhs));
    r.insert("rhs".into(), components(&rep.rhs));
    let check = p.tol.unwrap_or(1e-4);
    r.insert("value".into(), json!(rep.deviation));
    r.insert("error_estimate".into(), json!(rep.lhs.error_estimate + rep.rhs.error_estimate));
    r.insert("backend".into(), json!(format!("{}|{}", rep.lhs.backend, rep.rhs.backend)));
    r.insert("closed_form".into(), Value::Null);
    r.insert("deviation".into(), json!(rep.deviation));
    r.insert("tolerance".into(), json!(check));
    let ok = rep.deviation <= check;
    r.insert("status".into(), json!(if ok { "ok" } else { "tolerance" }));
    Ok(Outcome { report: Value::Object(r), ok })
}

fn cp(a: &ProblemArgs) -> Result<Outcome> {
    let p = Problem::load(a)?;
    let g = p.phase_or_ball()?;
    let y = p.point()?;
    let res = cauchy_pompeiu(&p.integrand, &g, &y, &p.opts)?;
    let inside = eval_at(&g, &y)?.body().to_f64() < 0.0;
    let want = if inside { eval_at(&p.integrand, &y)?.body().to_f64() } else { 0.0 };
    let mut r = base("cauchy-pompeiu", &p);
    r.insert("inside".into(), json!(inside));
    r.insert("components".into(), components(&res));
    let check = p.tol.unwrap_or(1e-3) * (1.0 + want.abs());
    // the non-scalar components should vanish as well
    let others = res.components.iter().filter(|(k, _)| k.0 != 0 || !k.1.is_empty()).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let mut out = finish(r, res.scalar(), res.error_estimate, &res.backend, Some(want), check);
    if others > check {
        out.ok = false;
        out.report["status"] = json!("tolerance");
    }
    Ok(out)
}

fn catalog_cmd(shape: &str, kind: &str, a: &ProblemArgs, engine: bool) -> Result<Outcome> {
    let sh = Shape::from_name(shape).ok_or_else(|| Error::Parameter(format!("unknown shape `{shape}`")))?;
    let k = Kind::from_name(kind).ok_or_else(|| Error::Parameter(format!("unknown kind `{kind}`")))?;
    let p = Problem::load(a)?;
    let param = p.param_f64(&["R", "r", "h"], 1.0)?;
    let cf = catalog(sh, k, p.ctx.m, p.ctx.n, param)?;
    let mut r = base("catalog", &p);
    r.insert("shape".into(), json!(sh.name()));
    r.insert("kind".into(), json!(k.name()));
    r.insert("param".into(), json!(param));
    r.insert("formula".into(), json!(cf.formula));
    if engine {
        let opts = Options { ..p.opts.clone() };
        let res = shape_integral(sh, k, p.ctx, param, &opts)?;
        return Ok(finish(r, res.value, res.error_estimate, &res.backend, Some(cf.value), p.tol.unwrap_or(1e-6)));
    }
    Ok(finish(r, cf.value, 0.0, "closed-form", Some(cf.value), 0.0))
}

fn verify(which: &str, seed: u64) -> Result<Outcome> {
    let ids: Vec<usize> = if which == "all" {
        SUITES.iter().map(|s| s.0).collect()
    } else {
        vec![suite_id(which).ok_or_else(|| Error::Parameter(format!("unknown suite `{which}`")))?]
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut ok = true;
    for id in ids {
        let s = run_suite(id, seed);
        ok &= s.passed();
        let worst = s.worst();
        for f in s.failures().take(5) {
            failures.push(json!(format!("criterion {} {}: dev {:.3e} tol {:.0e}", s.id, f.label, f.deviation, f.tolerance)));
        }
        rows.push(json!({
            "criterion": s.id,
            "suite": s.name,
            "status": if s.passed() { "PASS" } else { "FAIL" },
            "cases": s.cases.len(),
            "failed": s.failures().count(),
            "worst_case": worst.map(|w| w.label.clone()),
            "worst_deviation": worst.map(|w| w.deviation),
            "worst_tolerance": worst.map(|w| w.tolerance),
            "seconds": s.seconds,
            "line": s.line(),
        }));
    }
    let report = json!({
        "schema": 1,
        "command": "verify",
        "seed": seed,
        "status": if ok { "ok" } else { "tolerance" },
        "rows": rows,
        "failures": failures,
    });
    Ok(Outcome { report, ok })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::Volume(a) => volume(a),
        Cmd::Surface { p, oriented } => surface(p, *oriented),
        Cmd::Pizzetti(a) => pizzetti(a),
        Cmd::Stokes { p, right } => stokes(p, right.clone()),
        Cmd::CauchyPompeiu(a) => cp(a),
        Cmd::Catalog { shape, kind, p, engine } => catalog_cmd(shape, kind, p, *engine),
        Cmd::Verify { which, seed } => verify(which, *seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(3);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(out) => {
            println!("{}", render(&out.report, cli.format, cli.pretty));
            ExitCode::from(if out.ok { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
