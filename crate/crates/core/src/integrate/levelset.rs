//! Phases without symmetry, m ∈ {2, 3}.
//!
//! L(t) = ∫_{g₀ = t} f/|∇g₀| dS is computed by quadtree marching squares in
//! the plane (slices in x₃ for m = 3, using the slice gradient, which is the
//! coarea formula applied slice by slice). Crossings are located exactly and
//! each contour piece is integrated as a graph with Gauss points projected
//! onto the curve. δ^(j) values are (−1)^j L^(j)(0) by central differences
//! with Richardson extrapolation.

use super::{ordered_sum, Outcome, Problem};
use crate::error::{Error, Result};
use crate::expr::Tape;
use crate::quad::{adaptive_vec, brent, gauss_legendre, richardson, Rule};
use rayon::prelude::*;

const BASE: usize = 24;
const MIN_DEPTH: usize = 2;
const MAX_DEPTH: usize = 8;

/// `tape` outputs g, ∂₁g, ∂₂g and the constraints; `ftape` the integrands.
struct Slice<'a> {
    tape: &'a Tape,
    ftape: &'a Tape,
    m: usize,
    z: f64,
    nc: usize,
    nf: usize,
    t: f64,
    gl: &'a Rule,
}

impl Slice<'_> {
    fn eval(&self, x: f64, y: f64) -> Vec<f64> {
        let mut inp = vec![x, y];
        if self.m == 3 {
            inp.push(self.z);
        }
        match self.tape.eval(&inp) {
            Ok(mut v) => {
                v[0] -= self.t;
                v
            }
            Err(_) => vec![f64::NAN; 3 + self.nc],
        }
    }

    fn f(&self, x: f64, y: f64) -> Vec<f64> {
        let mut inp = vec![x, y];
        if self.m == 3 {
            inp.push(self.z);
        }
        self.ftape.eval(&inp).unwrap_or_else(|_| vec![f64::NAN; self.nf])
    }

    fn g(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)[0]
    }

    /// Point on the curve with coordinate `u` along `axis` (0 = x), near `guess`.
    fn project(&self, axis: usize, u: f64, guess: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let pt = |v: f64| if axis == 0 { (u, v) } else { (v, u) };
        let mut v = guess;
        for _ in 0..40 {
            let (x, y) = pt(v);
            let e = self.eval(x, y);
            let step = e[0] / e[2 - axis];
            if !step.is_finite() {
                return None;
            }
            v -= step;
            if v < lo || v > hi {
                return None;
            }
            if step.abs() <= 1e-15 * (1.0 + v.abs()) {
                return Some(pt(v));
            }
        }
        let (x, y) = pt(v);
        let e = self.eval(x, y);
        (e[0].abs() <= 1e-11 * (1.0 + e[1].abs() + e[2].abs())).then(|| pt(v))
    }

    /// ∫ f/|∇g| ds over the piece of curve from p to q inside one cell.
    fn segment(&self, p: (f64, f64), q: (f64, f64), cell: [f64; 4]) -> Option<Vec<f64>> {
        let axis = if (q.0 - p.0).abs() >= (q.1 - p.1).abs() { 0 } else { 1 };
        let (pu, pv, qu, qv) = if axis == 0 { (p.0, p.1, q.0, q.1) } else { (p.1, p.0, q.1, q.0) };
        let (vlo, vhi) = if axis == 0 { (cell[2], cell[3]) } else { (cell[0], cell[1]) };
        let pad = 0.5 * (vhi - vlo);
        let (vlo, vhi) = (vlo - pad, vhi + pad);
        let guess = |u: f64| if qu == pu { pv } else { pv + (qv - pv) * (u - pu) / (qu - pu) };
        let (lo, hi) = if pu <= qu { (pu, qu) } else { (qu, pu) };
        if hi - lo <= 0.0 {
            return Some(vec![0.0; self.nf]);
        }
        let mut cuts = vec![lo, hi];
        if self.nc > 0 {
            let cval = |u: f64, i: usize| -> f64 {
                match self.project(axis, u, guess(u), vlo, vhi) {
                    Some((x, y)) => self.eval(x, y)[3 + i],
                    None => f64::NAN,
                }
            };
            for i in 0..self.nc {
                let (a, b) = (cval(lo, i), cval(hi, i));
                if a.is_finite() && b.is_finite() && (a < 0.0) != (b < 0.0) {
                    cuts.push(brent(|u| cval(u, i), lo, hi, 1e-15 * (1.0 + hi.abs())).ok()?);
                }
            }
            cuts.sort_by(f64::total_cmp);
        }
        let mut acc = vec![0.0; self.nf];
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            if self.nc > 0 {
                let mid = 0.5 * (a + b);
                let (x, y) = self.project(axis, mid, guess(mid), vlo, vhi)?;
                let e = self.eval(x, y);
                if !(0..self.nc).all(|i| e[3 + i] < 0.0) {
                    continue;
                }
            }
            let h = 0.5 * (b - a);
            for (t, wt) in self.gl.nodes.iter().zip(&self.gl.weights) {
                let u = a + h * (t + 1.0);
                let (x, y) = self.project(axis, u, guess(u), vlo, vhi)?;
                let e = self.eval(x, y);
                let gv = e[2 - axis].abs();
                let fv = self.f(x, y);
                for k in 0..self.nf {
                    acc[k] += h * wt * fv[k] / gv;
                }
            }
        }
        acc.iter().all(|v| v.is_finite()).then_some(acc)
    }

    fn edge_root(&self, a: (f64, f64), b: (f64, f64), ga: f64, gb: f64) -> Result<(f64, f64)> {
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        let s = brent(|s| self.g(a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)), 0.0, 1.0, 1e-15)?;
        Ok((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)))
    }

    fn cell(&self, c: [f64; 4], g: [f64; 4], depth: usize, out: &mut Vec<f64>) -> Result<()> {
        let [x0, x1, y0, y1] = c;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let e = self.eval(cx, cy);
        let (gc, gx, gy) = (e[0], e[1], e[2]);
        let (hx, hy) = (0.5 * (x1 - x0), 0.5 * (y1 - y0));
        let corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)];
        let mut slack: f64 = 0.0;
        for (k, &(x, y)) in corners.iter().enumerate() {
            slack = slack.max((g[k] - (gc + gx * (x - cx) + gy * (y - cy))).abs());
        }
        let pos = g.map(|v| v >= 0.0);
        let mixed = pos.iter().any(|&p| p != pos[0]) || (gc >= 0.0) != pos[0];
        // the linear model stays away from zero by more than the nonlinearity
        let lin_min = gc.abs() - (gx.abs() * hx + gy.abs() * hy);
        let finite = g.iter().all(|v| v.is_finite()) && gc.is_finite() && lin_min.is_finite();
        if finite && !mixed && lin_min > 2.0 * slack {
            return Ok(());
        }
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let crossing: Vec<usize> = (0..4).filter(|&k| pos[edges[k].0] != pos[edges[k].1]).collect();
        let subdivide = depth < MIN_DEPTH || !finite || crossing.len() != 2;
        if subdivide && depth < MAX_DEPTH {
            return self.split(c, g, gc, depth, out);
        }
        if !finite {
            return Err(Error::Domain("phase is not finite near the level set".into()));
        }
        let pairs: Vec<(usize, usize)> = match crossing.len() {
            0 => return Ok(()),
            2 => vec![(crossing[0], crossing[1])],
            4 => {
                if (gc >= 0.0) == pos[0] {
                    vec![(0, 1), (2, 3)]
                } else {
                    vec![(3, 0), (1, 2)]
                }
            }
            _ => return Err(Error::Domain("inconsistent contour cell".into())),
        };
        let mut pieces = Vec::with_capacity(pairs.len());
        for (ea, eb) in pairs {
            let pa = self.edge_root(corners[edges[ea].0], corners[edges[ea].1], g[edges[ea].0], g[edges[ea].1])?;
            let pb = self.edge_root(corners[edges[eb].0], corners[edges[eb].1], g[edges[eb].0], g[edges[eb].1])?;
            match self.segment(pa, pb, c) {
                Some(v) => pieces.push(v),
                None if depth < MAX_DEPTH => return self.split(c, g, gc, depth, out),
                None => return Err(Error::Domain("could not follow the level curve in a cell".into())),
            }
        }
        for v in pieces {
            for (o, v) in out.iter_mut().zip(v) {
                *o += v;
            }
        }
        Ok(())
    }

    fn split(&self, c: [f64; 4], g: [f64; 4], gc: f64, depth: usize, out: &mut Vec<f64>) -> Result<()> {
        let [x0, x1, y0, y1] = c;
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let gb = self.g(cx, y0);
        let gr = self.g(x1, cy);
        let gt = self.g(cx, y1);
        let gl = self.g(x0, cy);
        self.cell([x0, cx, y0, cy], [g[0], gb, gc, gl], depth + 1, out)?;
        self.cell([cx, x1, y0, cy], [gb, g[1], gr, gc], depth + 1, out)?;
        self.cell([cx, x1, cy, y1], [gc, gr, g[2], gt], depth + 1, out)?;
        self.cell([x0, cx, cy, y1], [gl, gc, gt, g[3]], depth + 1, out)
    }

    fn total(&self, bx: (f64, f64), by: (f64, f64)) -> Result<Vec<f64>> {
        let xs: Vec<f64> = (0..=BASE).map(|i| bx.0 + (bx.1 - bx.0) * i as f64 / BASE as f64).collect();
        let ys: Vec<f64> = (0..=BASE).map(|i| by.0 + (by.1 - by.0) * i as f64 / BASE as f64).collect();
        let gv: Vec<Vec<f64>> = ys.iter().map(|&y| xs.iter().map(|&x| self.g(x, y)).collect()).collect();
        let rows = (0..BASE)
            .into_par_iter()
            .map(|r| -> Result<Vec<f64>> {
                let mut acc = vec![0.0; self.nf];
                for q in 0..BASE {
                    let g = [gv[r][q], gv[r][q + 1], gv[r + 1][q + 1], gv[r + 1][q]];
                    self.cell([xs[q], xs[q + 1], ys[r], ys[r + 1]], g, 0, &mut acc)?;
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ordered_sum(rows, self.nf))
    }
}

struct Layer<'a> {
    p: &'a Problem<'a>,
    tape: Tape,
    ftape: Tape,
    gl: Rule,
}

impl Layer<'_> {
    /// L(t) and its quadrature error.
    fn at(&self, t: f64) -> Result<(Vec<f64>, f64)> {
        let p = self.p;
        let nf = p.integrands.len();
        let slice = |z: f64| Slice { tape: &self.tape, ftape: &self.ftape, m: p.m, z, nc: p.constraints.len(), nf, t, gl: &self.gl };
        if p.m == 2 {
            return Ok((slice(0.0).total(p.bbox[0], p.bbox[1])?, 0.0));
        }
        let (zlo, zhi) = p.bbox[2];
        // the slice total jumps where a slice first touches the surface
        let mut cuts = vec![zlo];
        cuts.extend(self.tips(t, zlo, zhi));
        cuts.push(zhi);
        let mut acc = vec![0.0; nf];
        let mut err = 0.0;
        for w in cuts.windows(2) {
            let share = p.tol * (w[1] - w[0]) / (zhi - zlo);
            let (v, e) = adaptive_vec(|z| slice(z).total(p.bbox[0], p.bbox[1]), w[0], w[1], nf, share, 1e-13)?;
            for (a, v) in acc.iter_mut().zip(v) {
                *a += v;
            }
            err += e;
        }
        Ok((acc, err))
    }

    /// Smallest and largest value of g − t over the slice at height z, with
    /// interior minima refined by Newton steps.
    fn extremes(&self, t: f64, z: f64) -> (f64, f64) {
        const N: usize = 24;
        let p = self.p;
        let s = Slice { tape: &self.tape, ftape: &self.ftape, m: 3, z, nc: 0, nf: 0, t, gl: &self.gl };
        let (bx, by) = (p.bbox[0], p.bbox[1]);
        let at = |i: usize, j: usize| (bx.0 + (bx.1 - bx.0) * i as f64 / N as f64, by.0 + (by.1 - by.0) * j as f64 / N as f64);
        let gv: Vec<Vec<f64>> = (0..=N).map(|i| (0..=N).map(|j| { let (x, y) = at(i, j); s.g(x, y) }).collect()).collect();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=N {
            for j in 0..=N {
                let v = gv[i][j];
                lo = lo.min(v);
                hi = hi.max(v);
                if i == 0 || j == 0 || i == N || j == N {
                    continue;
                }
                if v > gv[i - 1][j] || v > gv[i + 1][j] || v > gv[i][j - 1] || v > gv[i][j + 1] {
                    continue;
                }
                let (mut x, mut y) = at(i, j);
                for _ in 0..30 {
                    let e = s.eval(x, y);
                    let d = 1e-6;
                    let ex = s.eval(x + d, y);
                    let ey = s.eval(x, y + d);
                    let (hxx, hxy, hyy) = ((ex[1] - e[1]) / d, 0.5 * ((ex[2] - e[2]) + (ey[1] - e[1])) / d, (ey[2] - e[2]) / d);
                    let det = hxx * hyy - hxy * hxy;
                    if !(det.is_finite() && det > 0.0) {
                        break;
                    }
                    let dx = (hyy * e[1] - hxy * e[2]) / det;
                    let dy = (hxx * e[2] - hxy * e[1]) / det;
                    x = (x - dx).clamp(bx.0, bx.1);
                    y = (y - dy).clamp(by.0, by.1);
                    if dx.abs() + dy.abs() < 1e-15 * (1.0 + x.abs() + y.abs()) {
                        break;
                    }
                }
                let v = s.g(x, y);
                if v.is_finite() {
                    lo = lo.min(v);
                }
            }
        }
        (lo, hi)
    }

    /// Heights where slices start or stop meeting the level set g = t.
    fn tips(&self, t: f64, zlo: f64, zhi: f64) -> Vec<f64> {
        const SCAN: usize = 64;
        let meets = |z: f64| {
            let (lo, hi) = self.extremes(t, z);
            lo < 0.0 && hi > 0.0
        };
        let zs: Vec<f64> = (0..=SCAN).map(|i| zlo + (zhi - zlo) * i as f64 / SCAN as f64).collect();
        let flags: Vec<bool> = zs.iter().map(|&z| meets(z)).collect();
        let mut out = Vec::new();
        for i in 0..SCAN {
            if flags[i] == flags[i + 1] {
                continue;
            }
            let (mut a, mut b) = (zs[i], zs[i + 1]);
            while b - a > 1e-14 * (1.0 + a.abs()) {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if meets(mid) == flags[i] {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            out.push(0.5 * (a + b));
        }
        out
    }
}

pub(super) fn layer(p: &Problem, j: usize) -> Result<Outcome> {
    if !(p.m == 2 || p.m == 3) || j > 2 {
        return Err(Error::Unsupported("levelset backend handles m ∈ {2,3} and δ-order ≤ 2".into()));
    }
    let mut outs = vec![p.phase.clone(), p.phase.diff(1), p.phase.diff(2)];
    outs.extend(p.constraints.iter().cloned());
    let lay = Layer { p, tape: Tape::compile(&outs), ftape: Tape::compile(p.integrands), gl: gauss_legendre(6) };
    if j == 0 {
        let (v, e) = lay.at(0.0)?;
        return Ok(Outcome { values: v, error: e });
    }
    // step from the size of g₀ over the box
    let mut gmax: f64 = 0.0;
    for mask in 0..(1usize << p.m) {
        let x: Vec<f64> = (0..p.m).map(|d| if mask >> d & 1 == 1 { p.bbox[d].1 } else { p.bbox[d].0 }).collect();
        gmax = gmax.max(p.phase.eval(&x).map(f64::abs).unwrap_or(0.0));
    }
    let h0 = 0.02 * gmax.max(1e-3);
    let nf = p.integrands.len();
    let l0 = if j == 2 { Some(lay.at(0.0)?) } else { None };
    let mut diffs: Vec<Vec<f64>> = Vec::new();
    let mut qerr: f64 = l0.as_ref().map_or(0.0, |l| l.1);
    for level in 0..3 {
        let h = h0 / (1 << level) as f64;
        let (lp, ep) = lay.at(h)?;
        let (lm, em) = lay.at(-h)?;
        qerr = qerr.max((ep + em) / h.powi(j as i32));
        let d: Vec<f64> = (0..nf)
            .map(|k| match j {
                1 => -(lp[k] - lm[k]) / (2.0 * h),
                _ => (lp[k] - 2.0 * l0.as_ref().expect("second order").0[k] + lm[k]) / (h * h),
            })
            .collect();
        diffs.push(d);
    }
    let mut values = Vec::with_capacity(nf);
    let mut err: f64 = 0.0;
    for k in 0..nf {
        let col: Vec<f64> = diffs.iter().map(|d| d[k]).collect();
        let full = richardson(&col);
        let part = richardson(&col[..2]);
        err = err.max((full - part).abs());
        values.push(full);
    }
    Ok(Outcome { values, error: err + qerr })
}
