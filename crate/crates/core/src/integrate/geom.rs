//! Symmetry probes, bounding boxes and root location along lines.

use super::Kind;
use crate::error::{Error, Result};
use crate::expr::{Expr, Tape};
use crate::quad::{bracket_roots, brent};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Symmetry {
    Radial,
    Axial,
    Generic,
}

impl Symmetry {
    pub fn name(self) -> &'static str {
        match self {
            Symmetry::Radial => "radial",
            Symmetry::Axial => "axial",
            Symmetry::Generic => "generic",
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, k: usize) -> DMatrix<f64> {
    if k == 1 {
        return DMatrix::from_element(1, 1, -1.0);
    }
    let a = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
    a.qr().q()
}

fn invariant(tape: &Tape, m: usize, block: usize, rng: &mut ChaCha8Rng) -> bool {
    for _ in 0..6 {
        let q = random_orthogonal(rng, block);
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let mut y = x.clone();
        for i in 0..block {
            y[i] = (0..block).map(|k| q[(i, k)] * x[k]).sum();
        }
        let (Ok(a), Ok(b)) = (tape.eval(&x), tape.eval(&y)) else {
            return false;
        };
        for (a, b) in a.iter().zip(&b) {
            if !a.is_finite() || !b.is_finite() || (a - b).abs() > 1e-9 * (1.0 + a.abs() + b.abs()) {
                return false;
            }
        }
    }
    true
}

/// Probe the phase and constraints with random rotations.
pub fn detect_symmetry(m: usize, phase: &Expr, constraints: &[Expr]) -> Symmetry {
    let mut all = vec![phase.clone()];
    all.extend(constraints.iter().cloned());
    let tape = Tape::compile(&all);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    if invariant(&tape, m, m, &mut rng) {
        return Symmetry::Radial;
    }
    if m >= 2 && invariant(&tape, m, m - 1, &mut rng) {
        return Symmetry::Axial;
    }
    Symmetry::Generic
}

/// Roots of f on [a, b]. Critical points (roots of df) split the interval
/// into monotone pieces, so nearby root pairs are not lost.
pub fn line_roots(
    f: &mut dyn FnMut(f64) -> f64,
    df: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    let tol = 1e-14 * (1.0 + a.abs().max(b.abs()));
    let crit = bracket_roots(
        |x| {
            let v = df(x);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        a,
        b,
        samples,
        tol,
    )?;
    let mut pts = vec![a];
    pts.extend(crit.into_iter().filter(|&c| c > a && c < b));
    pts.push(b);
    let mut roots: Vec<f64> = Vec::new();
    let push = |r: f64, roots: &mut Vec<f64>| {
        if roots.last().map_or(true, |&l| (r - l).abs() > tol) {
            roots.push(r);
        }
    };
    let mut fp = f(pts[0]);
    if fp == 0.0 {
        push(pts[0], &mut roots);
    }
    for w in pts.windows(2) {
        let fq = f(w[1]);
        if fq == 0.0 {
            push(w[1], &mut roots);
        } else if fp != 0.0 && fp.is_finite() && fq.is_finite() && fp.signum() != fq.signum() {
            let r = brent(&mut *f, w[0], w[1], tol)?;
            push(r, &mut roots);
        }
        fp = fq;
    }
    Ok(roots)
}

/// Points where the region predicate holds: phase/constraint values → inside.
pub fn in_region(kind: Kind, g: f64, cs: &[f64]) -> bool {
    let phase_ok = match kind {
        Kind::Heaviside(s) => s as f64 * g > 0.0,
        Kind::Delta(_) => g <= 0.0,
    };
    phase_ok && cs.iter().all(|&c| c < 0.0)
}

/// Largest radius of the relevant set for a radial phase G(r) = g₀(r e₁).
pub fn radial_extent(tape: &Tape, m: usize, kind: Kind) -> Result<f64> {
    let eval = |r: f64| {
        let mut x = vec![0.0; m];
        x[0] = r;
        tape.eval(&x).map(|v| v[0]).unwrap_or(f64::NAN)
    };
    let mut last = 0.0f64;
    let mut any = false;
    let mut lo = 0.0;
    for k in -10..=14 {
        let hi = 2f64.powi(k);
        let roots = bracket_roots(eval, lo, hi, 64, 1e-13 * hi)?;
        if let Some(&r) = roots.last() {
            last = r;
            any = true;
        }
        lo = hi;
    }
    let far = eval(lo);
    if in_region(kind, far, &[]) {
        return Err(Error::Domain("region is not compact (it reaches the search radius)".into()));
    }
    if !any {
        return Ok(1.0);
    }
    Ok(1.25 * last + 1e-3)
}

/// Sampled bounding box in the given coordinates. `pred(x) = (inside, near)`
/// where `near` marks the level set; both count as relevant.
pub fn sampled_box(dims: usize, lower_zero: &[bool], mut pred: impl FnMut(&[f64]) -> bool) -> Result<Vec<(f64, f64)>> {
    let n: usize = match dims {
        1 => 4000,
        2 => 240,
        3 => 48,
        _ => return Err(Error::Unsupported("box inference above three sampled dimensions; give a box".into())),
    };
    for &l in &[1.0f64, 4.0, 16.0, 64.0, 256.0] {
        let lo: Vec<f64> = lower_zero.iter().map(|&z| if z { 0.0 } else { -l }).collect();
        let step: Vec<f64> = lo.iter().map(|&a| (l - a) / n as f64).collect();
        let mut bmin = vec![f64::INFINITY; dims];
        let mut bmax = vec![f64::NEG_INFINITY; dims];
        let mut idx = vec![0usize; dims];
        let mut x = vec![0.0; dims];
        let mut found = false;
        loop {
            for d in 0..dims {
                x[d] = lo[d] + (idx[d] as f64 + 0.5) * step[d];
            }
            if pred(&x) {
                found = true;
                for d in 0..dims {
                    bmin[d] = bmin[d].min(x[d]);
                    bmax[d] = bmax[d].max(x[d]);
                }
            }
            let mut d = 0;
            while d < dims {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        if !found {
            continue;
        }
        let touches = (0..dims).any(|d| bmax[d] > l - 2.0 * step[d] || (!lower_zero[d] && bmin[d] < -l + 2.0 * step[d]));
        if touches {
            continue;
        }
        return Ok((0..dims)
            .map(|d| {
                let a = if lower_zero[d] { 0.0 } else { bmin[d] - 3.0 * step[d] };
                (a, bmax[d] + 3.0 * step[d])
            })
            .collect());
    }
    Err(Error::Domain("could not bound the region; it is empty, too small, or not compact (pass a box)".into()))
}
