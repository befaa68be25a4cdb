//! Newton iteration on Taylor jets: solutions of F(v, τ) = 0 as series in τ.

use crate::error::{Error, Result};
use crate::expr::Jet;

fn sweeps(order: usize) -> usize {
    let mut k = 2;
    let mut acc = 1;
    while acc <= order {
        acc *= 2;
        k += 1;
    }
    k
}

/// Scalar Newton from a float root v0: `eval(v)` returns (F, ∂F/∂v) as jets in τ.
pub fn newton1(order: usize, v0: f64, mut eval: impl FnMut(&Jet) -> Result<(Jet, Jet)>) -> Result<Jet> {
    let mut v = Jet::constant(v0, order);
    for _ in 0..6 {
        let (f, df) = eval(&v)?;
        if df.value() == 0.0 {
            return Err(Error::Domain("vanishing derivative in root continuation".into()));
        }
        let step = f.value() / df.value();
        v.c[0] -= step;
        if step.abs() <= 1e-15 * (1.0 + v.c[0].abs()) {
            break;
        }
    }
    for _ in 0..sweeps(order) {
        let (f, df) = eval(&v)?;
        v = v.sub(&f.div(&df)?);
    }
    Ok(v)
}

/// Two unknowns: `eval(a, b)` returns ([F₀, F₁], [[∂_aF₀, ∂_bF₀], [∂_aF₁, ∂_bF₁]]).
pub fn newton2(
    order: usize,
    start: (f64, f64),
    mut eval: impl FnMut(&Jet, &Jet) -> Result<([Jet; 2], [[Jet; 2]; 2])>,
) -> Result<(Jet, Jet)> {
    let mut a = Jet::constant(start.0, order);
    let mut b = Jet::constant(start.1, order);
    for _ in 0..(6 + sweeps(order)) {
        let (f, j) = eval(&a, &b)?;
        let det = j[0][0].mul(&j[1][1]).sub(&j[0][1].mul(&j[1][0]));
        if det.value().abs() < 1e-300 {
            return Err(Error::Domain("singular Jacobian in endpoint continuation".into()));
        }
        let da = f[0].mul(&j[1][1]).sub(&f[1].mul(&j[0][1])).div(&det)?;
        let db = j[0][0].mul(&f[1]).sub(&j[1][0].mul(&f[0])).div(&det)?;
        a = a.sub(&da);
        b = b.sub(&db);
    }
    Ok((a, b))
}

/// Jet of d/dτ, one order lower.
pub fn derivative(j: &Jet) -> Jet {
    let k = j.order();
    let mut c = vec![0.0; k.max(1)];
    for i in 0..k {
        c[i] = (i + 1) as f64 * j.c[i + 1];
    }
    Jet { c }
}

pub fn truncate(j: &Jet, order: usize) -> Jet {
    let mut c = j.c.clone();
    c.resize(order + 1, 0.0);
    Jet { c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_series() {
        // v² − 1 − τ = 0 ⇒ v = √(1+τ) = 1 + τ/2 − τ²/8 + τ³/16
        let tau = Jet::variable(0.0, 3);
        let v = newton1(3, 1.1, |v| Ok((v.mul(v).sub(&Jet::constant(1.0, 3)).sub(&tau), v.scale(2.0)))).unwrap();
        let want = [1.0, 0.5, -0.125, 0.0625];
        for (a, b) in v.c.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn circle_line_intersection() {
        // a² + b² = 1 + τ, b = 0.5 ⇒ a = √(0.75 + τ)
        let tau = Jet::variable(0.0, 2);
        let one = Jet::constant(1.0, 2);
        let (a, b) = newton2(2, (0.8, 0.4), |a, b| {
            Ok((
                [a.mul(a).add(&b.mul(b)).sub(&one).sub(&tau), b.sub(&one.scale(0.5))],
                [[a.scale(2.0), b.scale(2.0)], [Jet::constant(0.0, 2), one.clone()]],
            ))
        })
        .unwrap();
        let s = 0.75f64.sqrt();
        assert!((a.c[0] - s).abs() < 1e-14);
        assert!((a.c[1] - 0.5 / s).abs() < 1e-13);
        assert!((a.c[2] + 0.125 / s.powi(3)).abs() < 1e-12);
        assert!((b.c[0] - 0.5).abs() < 1e-15 && b.c[1].abs() < 1e-15);
    }
}
