//! Radial phases g₀(x̲) = G(|x̲|).
//!
//! δ^(j): the layer function L(τ) = ∫ δ(g₀ − τ) f dV equals
//! Σ_k |r_k'(τ)| r_k(τ)^(m−1) ∫_S f(r_k(τ)ω) dω over the simple roots r_k of G,
//! and ∫ δ^(j)(g₀) f = (−1)^j L^(j)(0). The roots r_k(τ) come from inverting
//! the Taylor jet of G, so the derivatives are exact up to rounding.

use super::geom::line_roots;
use super::jetsolve::{derivative, truncate};
use super::{converge, ordered_sum, Outcome, Problem};
use crate::error::{Error, Result};
use crate::expr::{inverse_jet, Jet, JetSeries, Tape};
use crate::quad::{gauss_legendre, SphereRule};
use rayon::prelude::*;

fn degree_cap(m: usize) -> usize {
    match m {
        1 | 2 => 1024,
        3 => 128,
        4 => 48,
        _ => 24,
    }
}

fn degree_levels(m: usize, start: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let cap = degree_cap(m);
    let mut d = start.min(cap / 2);
    while d <= cap {
        v.push(d);
        d *= 2;
    }
    v
}

fn on_axis(m: usize, r: f64) -> Vec<f64> {
    let mut x = vec![0.0; m];
    x[0] = r;
    x
}

/// Simple roots of G on (0, rmax], with the gradient check.
fn roots(p: &Problem, tape: &Tape) -> Result<(Vec<f64>, f64)> {
    let rmax = p.radius();
    let m = p.m;
    let ev = |r: f64, k: usize| tape.eval(&on_axis(m, r)).map(|v| v[k]).unwrap_or(f64::NAN);
    // G alone, since G' may be singular at the origin (G = |x| − R)
    let gonly = Tape::compile(&[p.phase.clone()]);
    let g = |r: f64| gonly.eval(&on_axis(m, r)).map(|v| v[0]).unwrap_or(f64::NAN);
    let rs = line_roots(&mut |r| g(r), &mut |r| ev(r, 1), 0.0, rmax, 2000)?;
    for &r in &rs {
        let d = ev(r, 1);
        if r <= 0.0 || !(d.abs() >= 1e-8) {
            return Err(Error::Domain(format!("vanishing gradient of the phase at the root r = {r}")));
        }
    }
    Ok((rs, rmax))
}

pub(super) fn layer(p: &Problem, j: usize) -> Result<Outcome> {
    let m = p.m;
    let gtape = Tape::compile(&[p.phase.clone(), p.phase.diff(1)]);
    let (rs, _) = roots(p, &gtape)?;
    let k = j + 1;
    // per root: r(τ) truncated to order j, and |r'(τ)| r^(m−1)
    let mut branches = Vec::new();
    for &r0 in &rs {
        let mut inputs = vec![Jet::constant(0.0, k); m];
        inputs[0] = Jet::variable(r0, k);
        let g = gtape.eval_values(&inputs)?.remove(0);
        let inv = inverse_jet(&JetSeries { center: r0, coeffs: g.c })?;
        let rj = Jet { c: inv.coeffs };
        let dr = derivative(&rj);
        let rt = truncate(&rj, j);
        let w = dr.scale(dr.value().signum()).mul(&rt.powi(m as i64 - 1)?);
        branches.push((rt, w));
    }
    let ftape = Tape::compile(p.integrands);
    let nf = p.integrands.len();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    let run = |deg: usize| -> Result<Vec<f64>> {
        let rule = SphereRule::new(m, deg)?;
        let mut total = vec![0.0; nf];
        for (rt, w) in &branches {
            let parts = rule
                .points
                .par_iter()
                .zip(&rule.weights)
                .map(|(om, wt)| -> Result<Vec<f64>> {
                    let x: Vec<Jet> = om.iter().map(|c| rt.scale(*c)).collect();
                    let vals = ftape.eval_values(&x)?;
                    Ok(vals.iter().map(|f| wt * f.mul(w).c[j]).collect())
                })
                .collect::<Result<Vec<_>>>()?;
            for (t, v) in total.iter_mut().zip(ordered_sum(parts, nf)) {
                *t += v;
            }
        }
        Ok(total.into_iter().map(|v| sign * fact * v).collect())
    };
    match p.poly_degree() {
        Some(d) => Ok(Outcome { values: run(d.max(1))?, error: 0.0 }),
        None => converge(&degree_levels(m, 16), p.tol, run),
    }
}

pub(super) fn volume(p: &Problem, sign: i32) -> Result<Outcome> {
    let m = p.m;
    let gtape = Tape::compile(&[p.phase.clone(), p.phase.diff(1)]);
    let (rs, rmax) = roots(p, &gtape)?;
    let mut pts = vec![0.0];
    pts.extend(rs.iter().copied());
    pts.push(rmax);
    let mut intervals = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        let g = gtape.eval(&on_axis(m, mid))?[0];
        if sign as f64 * g > 0.0 {
            if i + 2 == pts.len() {
                return Err(Error::Domain("region is not compact within the box".into()));
            }
            intervals.push((w[0], w[1]));
        }
    }
    let ftape = Tape::compile(p.integrands);
    let nf = p.integrands.len();
    let run = |nr: usize, deg: usize| -> Result<Vec<f64>> {
        let rule = SphereRule::new(m, deg)?;
        let gl = gauss_legendre(nr);
        let mut nodes = Vec::new();
        for &(a, b) in &intervals {
            let h = 0.5 * (b - a);
            for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                let r = a + h * (t + 1.0);
                nodes.push((r, h * w * r.powi(m as i32 - 1)));
            }
        }
        let parts = nodes
            .par_iter()
            .map(|&(r, wr)| -> Result<Vec<f64>> {
                let mut acc = vec![0.0; nf];
                let mut buf = Vec::new();
                let mut out = vec![0.0; nf];
                let mut x = vec![0.0; m];
                for (om, wo) in rule.points.iter().zip(&rule.weights) {
                    for (xi, oi) in x.iter_mut().zip(om) {
                        *xi = r * oi;
                    }
                    ftape.eval_into(&x, &mut buf, &mut out)?;
                    for (a, v) in acc.iter_mut().zip(&out) {
                        *a += wr * wo * v;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ordered_sum(parts, nf))
    };
    match p.poly_degree() {
        Some(d) => Ok(Outcome { values: run((d + m + 1) / 2 + 1, d.max(1))?, error: 0.0 }),
        None => {
            let levels = degree_levels(m, 16);
            converge(&levels, p.tol, |deg| run(deg.min(256), deg))
        }
    }
}
