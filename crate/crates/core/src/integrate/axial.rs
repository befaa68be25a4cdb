//! Phases and constraints symmetric about the x_m axis, written in (s, z) = (|x̂|, x_m).
//!
//! δ^(j): the layer function L(τ) = ∫ δ(g₀ − τ) f dV is parametrized along
//! the curve G(s, z) = τ, either as z(s, τ) or s(z, τ), with interval ends
//! (constraint crossings) continued as jets in τ. Integrating over the whole
//! space this way keeps contributions from where the curve meets the axis.

use super::geom::{in_region, line_roots};
use super::jetsolve::{newton1, newton2};
use super::{converge, ordered_sum, Kind, Outcome, Problem};
use crate::error::{Error, Result};
use crate::expr::{Expr, Jet, Tape};
use crate::quad::{adaptive_vec, brent, gauss_legendre, SphereRule};
use rayon::prelude::*;

/// G, G_s, G_z, then C_i, C_i,s, C_i,z for each constraint; variables x1 = s, x2 = z.
struct Plane {
    tape: Tape,
    nc: usize,
}

impl Plane {
    fn new(p: &Problem) -> Plane {
        let m = p.m;
        let sub = move |i: usize| {
            Some(if i == 1 {
                Expr::var(1)
            } else if i == m {
                Expr::var(2)
            } else {
                Expr::int(0)
            })
        };
        let mut outs = Vec::new();
        for e in std::iter::once(p.phase).chain(p.constraints.iter()) {
            let e2 = e.rebuild(&sub);
            outs.push(e2.diff(1));
            outs.push(e2.diff(2));
            outs.insert(outs.len() - 2, e2);
        }
        Plane { tape: Tape::compile(&outs), nc: p.constraints.len() }
    }

    fn eval(&self, s: f64, z: f64) -> Vec<f64> {
        self.tape.eval(&[s, z]).unwrap_or_else(|_| vec![f64::NAN; 3 * (self.nc + 1)])
    }

    fn eval_jet(&self, s: &Jet, z: &Jet) -> Result<Vec<Jet>> {
        self.tape.eval_values(&[s.clone(), z.clone()])
    }
}

fn ranges(p: &Problem) -> (f64, (f64, f64)) {
    let m = p.m;
    let smax = p.bbox[..m - 1].iter().map(|(a, b)| a.abs().max(b.abs()).powi(2)).sum::<f64>().sqrt();
    (smax, p.bbox[m - 1])
}

fn sphere_levels(m: usize) -> &'static [usize] {
    if m <= 2 {
        &[1, 1, 1, 1, 1]
    } else {
        &[8, 16, 32, 64, 64]
    }
}

const GL_LEVELS: [usize; 5] = [16, 32, 64, 128, 256];

#[derive(Clone, Copy, Debug)]
enum End {
    /// Fixed outer coordinate (the axis s = 0).
    Fixed(f64),
    /// Constraint i vanishes at (outer, inner).
    Constraint(usize, f64, f64),
}

struct Piece {
    a: End,
    b: End,
    /// (outer, inner) samples along the branch, for initial guesses.
    guide: Vec<(f64, f64)>,
}

struct Curve<'a> {
    plane: &'a Plane,
    outer_is_s: bool,
}

impl Curve<'_> {
    fn sz(&self, o: f64, i: f64) -> (f64, f64) {
        if self.outer_is_s {
            (o, i)
        } else {
            (i, o)
        }
    }

    fn sz_jet(&self, o: &Jet, i: &Jet) -> (Jet, Jet) {
        if self.outer_is_s {
            (o.clone(), i.clone())
        } else {
            (i.clone(), o.clone())
        }
    }

    /// Offsets of ∂_outer and ∂_inner within each (value, ∂s, ∂z) triple.
    fn d_outer(&self) -> usize {
        if self.outer_is_s {
            1
        } else {
            2
        }
    }

    fn d_inner(&self) -> usize {
        3 - self.d_outer()
    }

    fn eval(&self, o: f64, i: f64) -> Vec<f64> {
        let (s, z) = self.sz(o, i);
        self.plane.eval(s, z)
    }

    fn eval_jet(&self, o: &Jet, i: &Jet) -> Result<Vec<Jet>> {
        let (s, z) = self.sz_jet(o, i);
        self.plane.eval_jet(&s, &z)
    }

    /// The inner coordinate on the curve G = 0 at outer value o, from a guess.
    fn inner_at(&self, o: f64, guess: f64) -> Result<f64> {
        let mut v = guess;
        for _ in 0..50 {
            let e = self.eval(o, v);
            let step = e[0] / e[self.d_inner()];
            if !step.is_finite() {
                break;
            }
            v -= step;
            if step.abs() <= 1e-15 * (1.0 + v.abs()) {
                return Ok(v);
            }
        }
        let e = self.eval(o, v);
        if e[0].abs() <= 1e-12 * (1.0 + e[self.d_inner()].abs()) {
            return Ok(v);
        }
        Err(Error::Domain("lost the level curve while following a branch".into()))
    }
}

fn interp(guide: &[(f64, f64)], o: f64) -> f64 {
    match guide.iter().position(|g| g.0 >= o) {
        Some(0) => guide[0].1,
        None => guide.last().expect("nonempty guide").1,
        Some(k) => {
            let (a, b) = (guide[k - 1], guide[k]);
            a.1 + (b.1 - a.1) * (o - a.0) / (b.0 - a.0)
        }
    }
}

/// Active pieces of the level curve G = 0 inside the constraints.
fn pieces(curve: &Curve, outer: (f64, f64), inner: (f64, f64), scale: f64) -> Result<Vec<Piece>> {
    let n = 240;
    let nc = curve.plane.nc;
    let di = curve.d_inner();
    let os: Vec<f64> = (0..=n).map(|k| outer.0 + (outer.1 - outer.0) * k as f64 / n as f64).collect();
    let mut roots = Vec::with_capacity(os.len());
    for &o in &os {
        let rs = line_roots(&mut |v| curve.eval(o, v)[0], &mut |v| curve.eval(o, v)[di], inner.0, inner.1, 200)?;
        for &r in &rs {
            let e = curve.eval(o, r);
            let grad = (e[1] * e[1] + e[2] * e[2]).sqrt();
            if !(e[di].abs() > 1e-8 * grad.max(1e-300)) {
                return Err(Error::Unsupported("level curve is not a graph in this direction".into()));
            }
            if !curve.outer_is_s && r < 1e-7 * scale {
                return Err(Error::Unsupported("level curve meets the axis".into()));
            }
        }
        roots.push(rs);
    }
    let active = |o: f64, v: f64| {
        let e = curve.eval(o, v);
        (0..nc).all(|i| e[3 + 3 * i] < 0.0)
    };
    let mut out = Vec::new();
    let mut k0 = 0;
    while k0 <= n {
        let c = roots[k0].len();
        let mut k1 = k0;
        while k1 < n && roots[k1 + 1].len() == c {
            k1 += 1;
        }
        for b in 0..c {
            let guide_all: Vec<(f64, f64)> = (k0..=k1).map(|k| (os[k], roots[k][b])).collect();
            let act: Vec<bool> = (k0..=k1).map(|k| active(os[k], roots[k][b])).collect();
            let mut k = 0;
            while k < act.len() {
                if !act[k] {
                    k += 1;
                    continue;
                }
                let ka = k;
                while k + 1 < act.len() && act[k + 1] {
                    k += 1;
                }
                let kb = k;
                k += 1;
                let left = if ka == 0 {
                    if k0 == 0 && curve.outer_is_s {
                        End::Fixed(outer.0)
                    } else if k0 == 0 {
                        return Err(Error::Domain("surface reaches the box boundary".into()));
                    } else {
                        return Err(Error::Unsupported("level curve folds inside the region".into()));
                    }
                } else {
                    crossing(curve, &guide_all, ka - 1, ka)?
                };
                let right = if kb + 1 == act.len() {
                    if k1 == n {
                        return Err(Error::Domain("surface reaches the box boundary".into()));
                    }
                    return Err(Error::Unsupported("level curve folds inside the region".into()));
                } else {
                    crossing(curve, &guide_all, kb, kb + 1)?
                };
                let lo = ka.saturating_sub(1);
                let hi = (kb + 1).min(guide_all.len() - 1);
                out.push(Piece { a: left, b: right, guide: guide_all[lo..=hi].to_vec() });
            }
        }
        k0 = k1 + 1;
    }
    Ok(out)
}

/// Where the active set changes between two branch samples.
fn crossing(curve: &Curve, guide: &[(f64, f64)], k_out: usize, k_in: usize) -> Result<End> {
    let nc = curve.plane.nc;
    let (oa, va) = guide[k_out];
    let (ob, vb) = guide[k_in];
    let ea = curve.eval(oa, va);
    let eb = curve.eval(ob, vb);
    let i = (0..nc)
        .find(|&i| (ea[3 + 3 * i] >= 0.0) != (eb[3 + 3 * i] >= 0.0))
        .ok_or_else(|| Error::Domain("constraint crossing not bracketed".into()))?;
    let phi = |o: f64| -> f64 {
        let guess = va + (vb - va) * (o - oa) / (ob - oa);
        match curve.inner_at(o, guess) {
            Ok(v) => curve.eval(o, v)[3 + 3 * i],
            Err(_) => f64::NAN,
        }
    };
    let o = brent(phi, oa, ob, 1e-15 * (1.0 + oa.abs().max(ob.abs())))?;
    let v = curve.inner_at(o, va + (vb - va) * (o - oa) / (ob - oa))?;
    Ok(End::Constraint(i, o, v))
}

fn end_jet(curve: &Curve, e: End, j: usize) -> Result<Jet> {
    match e {
        End::Fixed(o) => Ok(Jet::constant(o, j)),
        End::Constraint(i, o, v) => {
            let tau = Jet::variable(0.0, j);
            let (a, _) = newton2(j, (o, v), |a, b| {
                let e = curve.eval_jet(a, b)?;
                let c = 3 + 3 * i;
                let (dout, din) = (curve.d_outer(), curve.d_inner());
                Ok(([e[0].sub(&tau), e[c].clone()], [[e[dout].clone(), e[din].clone()], [e[c + dout].clone(), e[c + din].clone()]]))
            })?;
            Ok(a)
        }
    }
}

fn layer_dir(p: &Problem, j: usize, outer_is_s: bool) -> Result<Outcome> {
    let plane = Plane::new(p);
    let curve = Curve { plane: &plane, outer_is_s };
    let (smax, (zlo, zhi)) = ranges(p);
    let (outer, inner) = if outer_is_s { ((0.0, smax), (zlo, zhi)) } else { ((zlo, zhi), (0.0, smax)) };
    let ps = pieces(&curve, outer, inner, smax)?;
    let ends: Vec<(Jet, Jet)> =
        ps.iter().map(|pc| Ok((end_jet(&curve, pc.a, j)?, end_jet(&curve, pc.b, j)?))).collect::<Result<_>>()?;
    let m = p.m;
    let ftape = Tape::compile(p.integrands);
    let nf = p.integrands.len();
    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    let tau = Jet::variable(0.0, j);
    let di = curve.d_inner();
    let run = |level: usize| -> Result<Vec<f64>> {
        let gl = gauss_legendre(GL_LEVELS[level]);
        let rule = SphereRule::new(m - 1, sphere_levels(m)[level])?;
        let nodes: Vec<(usize, f64, f64)> = (0..ps.len())
            .flat_map(|k| gl.nodes.iter().zip(&gl.weights).map(move |(t, w)| (k, 0.5 * (t + 1.0), 0.5 * w)))
            .collect();
        let parts = nodes
            .par_iter()
            .map(|&(k, u, wu)| -> Result<Vec<f64>> {
                let (a, b) = &ends[k];
                let len = b.sub(a);
                let o = a.add(&len.scale(u));
                let v0 = curve.inner_at(o.value(), interp(&ps[k].guide, o.value()))?;
                let v = newton1(j, v0, |v| {
                    let e = curve.eval_jet(&o, v)?;
                    Ok((e[0].sub(&tau), e[di].clone()))
                })?;
                let e = curve.eval_jet(&o, &v)?;
                let gi = &e[di];
                let (s, z) = curve.sz_jet(&o, &v);
                let w = len.scale(wu * gi.value().signum()).mul(&s.powi(m as i64 - 2)?).div(gi)?;
                let mut acc = vec![0.0; nf];
                for (om, wo) in rule.points.iter().zip(&rule.weights) {
                    let mut x: Vec<Jet> = om.iter().map(|c| s.scale(*c)).collect();
                    x.push(z.clone());
                    let vals = ftape.eval_values(&x)?;
                    for (acc, f) in acc.iter_mut().zip(&vals) {
                        *acc += wo * f.mul(&w).c[j];
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ordered_sum(parts, nf).into_iter().map(|v| sign * fact * v).collect())
    };
    converge(&[0, 1, 2, 3, 4], p.tol, run)
}

pub(super) fn layer(p: &Problem, j: usize) -> Result<Outcome> {
    match layer_dir(p, j, true) {
        Err(Error::Unsupported(_)) => layer_dir(p, j, false),
        r => r,
    }
}

pub(super) fn volume(p: &Problem, sign: i32) -> Result<Outcome> {
    let plane = Plane::new(p);
    let (smax, (zlo, zhi)) = ranges(p);
    let m = p.m;
    let nc = plane.nc;
    let kind = Kind::Heaviside(sign);
    let ftape = Tape::compile(p.integrands);
    let nf = p.integrands.len();
    let (ns, deg) = match p.poly_degree() {
        Some(d) => ((d + m) / 2 + 2, d.max(1)),
        None => (24, 32),
    };
    let gl = gauss_legendre(ns);
    let rule = SphereRule::new(m - 1, if m <= 2 { 1 } else { deg })?;
    let intervals = |z: f64| -> Result<Vec<(f64, f64)>> {
        let mut pts = vec![0.0, smax];
        for f in 0..=nc {
            let b = 3 * f;
            pts.extend(line_roots(&mut |s| plane.eval(s, z)[b], &mut |s| plane.eval(s, z)[b + 1], 0.0, smax, 64)?);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut out = Vec::new();
        for (k, w) in pts.windows(2).enumerate() {
            if w[1] <= w[0] {
                continue;
            }
            let e = plane.eval(0.5 * (w[0] + w[1]), z);
            let cs: Vec<f64> = (0..nc).map(|i| e[3 + 3 * i]).collect();
            if in_region(kind, e[0], &cs) {
                if k + 2 == pts.len() {
                    return Err(Error::Domain("region is not compact within the box".into()));
                }
                out.push((w[0], w[1]));
            }
        }
        Ok(out)
    };
    let inner = |z: f64| -> Result<Vec<f64>> {
        let mut acc = vec![0.0; nf];
        let mut buf = Vec::new();
        let mut out = vec![0.0; nf];
        let mut x = vec![0.0; m];
        for (a, b) in intervals(z)? {
            let h = 0.5 * (b - a);
            for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                let s = a + h * (t + 1.0);
                let ws = h * w * s.powi(m as i32 - 2);
                for (om, wo) in rule.points.iter().zip(&rule.weights) {
                    for (xi, oi) in x.iter_mut().zip(om) {
                        *xi = s * oi;
                    }
                    x[m - 1] = z;
                    ftape.eval_into(&x, &mut buf, &mut out)?;
                    for (acc, v) in acc.iter_mut().zip(&out) {
                        *acc += ws * wo * v;
                    }
                }
            }
        }
        Ok(acc)
    };
    // split the z-range where the cross-section appears or disappears
    let present = |z: f64| -> Result<bool> { Ok(!intervals(z)?.is_empty()) };
    let n = 240;
    let zs: Vec<f64> = (0..=n).map(|k| zlo + (zhi - zlo) * k as f64 / n as f64).collect();
    let flags = zs.iter().map(|&z| present(z)).collect::<Result<Vec<_>>>()?;
    if flags[0] || flags[n] {
        return Err(Error::Domain("region reaches the box boundary in x_m".into()));
    }
    let mut cuts = vec![zlo];
    for k in 0..n {
        if flags[k] != flags[k + 1] {
            let (mut a, mut b) = (zs[k], zs[k + 1]);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if present(mid)? == flags[k] {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            cuts.push(0.5 * (a + b));
        }
    }
    cuts.push(zhi);
    let segs: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).filter(|(a, b)| b > a).collect();
    let results = segs
        .par_iter()
        .map(|&(a, b)| -> Result<(Vec<f64>, f64)> {
            if !present(0.5 * (a + b))? {
                return Ok((vec![0.0; nf], 0.0));
            }
            adaptive_vec(&inner, a, b, nf, p.tol / segs.len() as f64, 1e-14)
        })
        .collect::<Result<Vec<_>>>()?;
    let err = results.iter().map(|r| r.1).sum();
    Ok(Outcome { values: ordered_sum(results.into_iter().map(|r| r.0).collect(), nf), error: err })
}
