//! Cartesian iterated integration of Heaviside tasks, and polar integration
//! about a singular point.
//!
//! The grid backend nests adaptive Gauss–Kronrod rules over the box; the
//! innermost coordinate is split exactly at the roots of the phase and
//! constraints, so the integrand seen by each rule is smooth.

use super::geom::{in_region, line_roots};
use super::{converge, ordered_sum, Kind, Outcome, Problem};
use crate::error::{Error, Result};
use crate::expr::Tape;
use crate::quad::{adaptive_vec, gauss_legendre, Rule, SphereRule};
use rayon::prelude::*;

/// `geo` outputs g, ∂_m g, then (c_i, ∂_m c_i); `ftape` the integrands.
struct Lines<'a> {
    p: &'a Problem<'a>,
    geo: Tape,
    ftape: Tape,
    kind: Kind,
    gl: Rule,
}

impl Lines<'_> {
    fn intervals(&self, x: &[f64]) -> Result<Vec<(f64, f64)>> {
        let m = self.p.m;
        let nc = self.p.constraints.len();
        let (a, b) = self.p.bbox[m - 1];
        let at = |t: f64, k: usize| -> f64 {
            let mut xx = x.to_vec();
            xx[m - 1] = t;
            self.geo.eval(&xx).map(|v| v[k]).unwrap_or(f64::NAN)
        };
        let mut pts = vec![a, b];
        for f in 0..=nc {
            pts.extend(line_roots(&mut |t| at(t, 2 * f), &mut |t| at(t, 2 * f + 1), a, b, 32)?);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut out = Vec::new();
        for (k, w) in pts.windows(2).enumerate() {
            if w[1] <= w[0] {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            let g = at(mid, 0);
            let cs: Vec<f64> = (0..nc).map(|i| at(mid, 2 + 2 * i)).collect();
            if in_region(self.kind, g, &cs) {
                if k == 0 || k + 2 == pts.len() {
                    return Err(Error::Domain("region reaches the box boundary".into()));
                }
                out.push((w[0], w[1]));
            }
        }
        Ok(out)
    }

    fn innermost(&self, prefix: &[f64]) -> Result<Vec<f64>> {
        let m = self.p.m;
        let nf = self.p.integrands.len();
        let mut x = prefix.to_vec();
        x.push(0.0);
        let mut acc = vec![0.0; nf];
        let mut buf = Vec::new();
        let mut out = vec![0.0; nf];
        for (a, b) in self.intervals(&x)? {
            let h = 0.5 * (b - a);
            for (t, w) in self.gl.nodes.iter().zip(&self.gl.weights) {
                x[m - 1] = a + h * (t + 1.0);
                self.ftape.eval_into(&x, &mut buf, &mut out)?;
                for k in 0..nf {
                    acc[k] += h * w * out[k];
                }
            }
        }
        Ok(acc)
    }

    fn level(&self, k: usize, prefix: &mut Vec<f64>, tol: f64) -> Result<Vec<f64>> {
        let m = self.p.m;
        if k == m - 1 {
            return self.innermost(prefix);
        }
        let (a, b) = self.p.bbox[k];
        if k == m - 2 {
            return self.penultimate(prefix, a, b, tol);
        }
        let nf = self.p.integrands.len();
        let inner_tol = 0.1 * tol / (b - a);
        let (v, _) = adaptive_vec(
            |t| {
                let mut pre = prefix.clone();
                pre.push(t);
                self.level(k + 1, &mut pre, inner_tol)
            },
            a,
            b,
            nf,
            tol,
            1e-13,
        )?;
        Ok(v)
    }

    /// The coordinate before the innermost one. The slice support is located
    /// by scanning and bisection; each support piece is integrated through
    /// t = t₁ + (t₂ − t₁)(3s² − 2s³), which smooths the square-root behavior
    /// of the chord length at its ends.
    fn penultimate(&self, prefix: &[f64], a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
        const SCAN: usize = 128;
        let nf = self.p.integrands.len();
        let inner_tol = 0.1 * tol / (b - a);
        let mut x = prefix.to_vec();
        x.push(0.0);
        x.push(0.0);
        let k = x.len() - 2;
        let mut hit = |t: f64| -> Result<bool> {
            x[k] = t;
            Ok(!self.intervals(&x)?.is_empty())
        };
        let ts: Vec<f64> = (0..=SCAN).map(|i| a + (b - a) * i as f64 / SCAN as f64).collect();
        let mut flags = Vec::with_capacity(ts.len());
        for &t in &ts {
            flags.push(hit(t)?);
        }
        let mut ends = Vec::new();
        for i in 0..SCAN {
            if flags[i] != flags[i + 1] {
                let (mut lo, mut hi) = (ts[i], ts[i + 1]);
                while hi - lo > 1e-15 * (1.0 + lo.abs()) {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if hit(mid)? == flags[i] {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                ends.push(if flags[i] { lo } else { hi });
            }
        }
        if flags[0] || flags[SCAN] {
            return Err(Error::Domain("region reaches the box boundary".into()));
        }
        if ends.is_empty() {
            // nothing seen by the scan
            return Ok(vec![0.0; nf]);
        }
        let mut acc = vec![0.0; nf];
        for w in ends.chunks(2) {
            let (t1, t2) = (w[0], w[1]);
            let len = t2 - t1;
            let (v, _) = adaptive_vec(
                |s| {
                    let mut pre = prefix.to_vec();
                    pre.push(t1 + len * s * s * (3.0 - 2.0 * s));
                    let jac = 6.0 * len * s * (1.0 - s);
                    Ok(self.innermost(&pre)?.into_iter().map(|v| v * jac).collect())
                },
                0.0,
                1.0,
                nf,
                inner_tol.max(1e-15) * (b - a) / len.max(1e-300),
                1e-13,
            )?;
            for (a, v) in acc.iter_mut().zip(v) {
                *a += v;
            }
        }
        Ok(acc)
    }
}

pub(super) fn volume(p: &Problem, sign: i32) -> Result<Outcome> {
    let m = p.m;
    let xm = m;
    let mut outs = vec![p.phase.clone(), p.phase.diff(xm)];
    for c in p.constraints {
        outs.push(c.clone());
        outs.push(c.diff(xm));
    }
    let n_in = match p.poly_degree() {
        Some(d) => d / 2 + 2,
        None => 16,
    };
    let lines = Lines { p, geo: Tape::compile(&outs), ftape: Tape::compile(p.integrands), kind: Kind::Heaviside(sign), gl: gauss_legendre(n_in) };
    let nf = p.integrands.len();
    if m == 1 {
        return Ok(Outcome { values: lines.innermost(&[])?, error: 0.0 });
    }
    // static partition of the outermost coordinate
    let parts = 8;
    let (a, b) = p.bbox[0];
    let tol = p.tol / parts as f64;
    let results = (0..parts)
        .into_par_iter()
        .map(|i| -> Result<(Vec<f64>, f64)> {
            let lo = a + (b - a) * i as f64 / parts as f64;
            let hi = a + (b - a) * (i + 1) as f64 / parts as f64;
            let inner_tol = 0.1 * tol / (b - a);
            adaptive_vec(|t| lines.level(1, &mut vec![t], inner_tol), lo, hi, nf, tol, 1e-13)
        })
        .collect::<Result<Vec<_>>>()?;
    let err = results.iter().map(|r| r.1).sum();
    Ok(Outcome { values: ordered_sum(results.into_iter().map(|r| r.0).collect(), nf), error: err })
}

/// Heaviside task in polar coordinates about y (inside the region).
pub(super) fn polar(p: &Problem, y: &[f64], sign: i32) -> Result<Outcome> {
    let m = p.m;
    let nc = p.constraints.len();
    let nf = p.integrands.len();
    let stride = m + 1;
    let mut outs = Vec::new();
    for e in std::iter::once(p.phase).chain(p.constraints.iter()) {
        outs.push(e.clone());
        for i in 1..=m {
            outs.push(e.diff(i));
        }
    }
    // the integrand may be singular at y, so it gets its own tape
    let tape = Tape::compile(&outs);
    let ftape = Tape::compile(p.integrands);
    let kind = Kind::Heaviside(sign);
    let mut rho_max: f64 = 0.0;
    for mask in 0..(1usize << m) {
        let d2: f64 = (0..m)
            .map(|d| {
                let c = if mask >> d & 1 == 1 { p.bbox[d].1 } else { p.bbox[d].0 };
                (c - y[d]).powi(2)
            })
            .sum();
        rho_max = rho_max.max(d2.sqrt());
    }
    let ray = |om: &[f64], gl: &Rule| -> Result<Vec<f64>> {
        let pt = |r: f64| -> Vec<f64> { y.iter().zip(om).map(|(a, b)| a + r * b).collect() };
        let at = |r: f64| tape.eval(&pt(r)).unwrap_or_else(|_| vec![f64::NAN; outs.len()]);
        let mut pts = vec![0.0, rho_max];
        for f in 0..=nc {
            let base = f * stride;
            let rs = line_roots(
                &mut |r| at(r)[base],
                &mut |r| {
                    let v = at(r);
                    (0..m).map(|i| v[base + 1 + i] * om[i]).sum()
                },
                0.0,
                rho_max,
                48,
            )?;
            pts.extend(rs);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut acc = vec![0.0; nf];
        let add = |a: f64, b: f64, acc: &mut Vec<f64>| -> Result<()> {
            let h = 0.5 * (b - a);
            for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                let r = a + h * (t + 1.0);
                let v = ftape.eval(&pt(r))?;
                let wr = h * w * r.powi(m as i32 - 1);
                for k in 0..nf {
                    acc[k] += wr * v[k];
                }
            }
            Ok(())
        };
        for (k, w) in pts.windows(2).enumerate() {
            if w[1] <= w[0] {
                continue;
            }
            let v = at(0.5 * (w[0] + w[1]));
            let cs: Vec<f64> = (0..nc).map(|i| v[(i + 1) * stride]).collect();
            if !in_region(kind, v[0], &cs) {
                continue;
            }
            if k + 2 == pts.len() {
                return Err(Error::Domain("region reaches the box boundary".into()));
            }
            if w[0] == 0.0 {
                // graded pieces toward the singular point
                let levels = 14;
                let mut hi = w[1];
                for _ in 0..levels {
                    add(0.5 * hi, hi, &mut acc)?;
                    hi *= 0.5;
                }
                add(0.0, hi, &mut acc)?;
            } else {
                add(w[0], w[1], &mut acc)?;
            }
        }
        Ok(acc)
    };
    let (degs, ns): (&[usize], &[usize]) = if m <= 2 {
        (&[32, 64, 128, 256, 512], &[8, 12, 16, 20, 24])
    } else {
        (&[16, 32, 64, 96, 128], &[8, 12, 16, 20, 24])
    };
    converge(&[0, 1, 2, 3, 4], p.tol, |level| {
        let rule = SphereRule::new(m, degs[level])?;
        let gl = gauss_legendre(ns[level]);
        let parts = rule
            .points
            .par_iter()
            .zip(&rule.weights)
            .map(|(om, wo)| Ok(ray(om, &gl)?.into_iter().map(|v| v * wo).collect()))
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(ordered_sum(parts, nf))
    })
}
