//! Quadrature rules and 1-D root bracketing.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes and weights on [−1, 1].
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Map to [a, b] and sum.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
        h * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + h * x)).sum::<f64>()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Jacobi for the weight (1−x)^α(1+x)^β via the Golub–Welsch eigenproblem.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Rule {
    if alpha == 0.0 && beta == 0.0 {
        return gauss_legendre(n);
    }
    let (a, b) = (alpha, beta);
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        j[(k, k)] = if s == 0.0 || (s + 2.0) == 0.0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let num = 4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b);
            let den = s1 * s1 * (s1 + 1.0) * (s1 - 1.0);
            let off = (num / den).sqrt();
            j[(k, k + 1)] = off;
            j[(k + 1, k)] = off;
        }
    }
    let mu0 = 2f64.powf(a + b + 1.0) * (ln_beta(a + 1.0, b + 1.0)).exp();
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Product rule on the unit sphere S^(m−1) ⊂ ℝ^m, exact for polynomials up to `degree`.
/// Weights sum to the sphere area.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub m: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(m: usize, degree: usize) -> Result<SphereRule> {
        match m {
            0 => Err(Error::Parameter("sphere in dimension 0".into())),
            1 => Ok(SphereRule { m, points: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0] }),
            2 => {
                let k = degree + 1;
                let points = (0..k)
                    .map(|i| {
                        let t = 2.0 * PI * (i as f64 + 0.5) / k as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect();
                Ok(SphereRule { m, points, weights: vec![2.0 * PI / k as f64; k] })
            }
            _ => {
                let inner = SphereRule::new(m - 1, degree)?;
                let e = (m as f64 - 3.0) / 2.0;
                let rule = gauss_jacobi(degree / 2 + 1, e, e);
                let mut points = Vec::new();
                let mut weights = Vec::new();
                for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                    let s = (1.0 - t * t).sqrt();
                    for (p, wp) in inner.points.iter().zip(&inner.weights) {
                        let mut q = Vec::with_capacity(m);
                        q.push(*t);
                        q.extend(p.iter().map(|c| c * s));
                        points.push(q);
                        weights.push(wt * wp);
                    }
                }
                Ok(SphereRule { m, points, weights })
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Area of S^(m−1): 2π^(m/2)/Γ(m/2).
pub fn sphere_area(m: usize) -> f64 {
    crate::special::sphere_area(m as f64)
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Adaptive Gauss–Kronrod (7/15) with global error control.
pub fn adaptive(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let (v, e) = adaptive_vec(|x| Ok(vec![f(x)?]), a, b, 1, abs_tol, rel_tol)?;
    Ok((v[0], e))
}

fn gk15_vec(f: &mut dyn FnMut(f64) -> Result<Vec<f64>>, a: f64, b: f64, dim: usize) -> Result<(Vec<f64>, f64)> {
    let (h, c) = (0.5 * (b - a), 0.5 * (b + a));
    let fc = f(c)?;
    let mut k: Vec<f64> = fc.iter().map(|v| v * GK_WK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * GK_WG[3]).collect();
    for i in 0..7 {
        let dx = h * GK_X[i];
        let (lo, hi) = (f(c - dx)?, f(c + dx)?);
        for d in 0..dim {
            let s = lo[d] + hi[d];
            k[d] += GK_WK[i] * s;
            if i % 2 == 1 {
                g[d] += GK_WG[i / 2] * s;
            }
        }
    }
    let err = k.iter().zip(&g).map(|(k, g)| ((k - g) * h).abs()).fold(0.0, f64::max);
    Ok((k.into_iter().map(|v| v * h).collect(), err))
}

/// Vector-valued adaptive Gauss–Kronrod; the error is the largest component error.
pub fn adaptive_vec(
    mut f: impl FnMut(f64) -> Result<Vec<f64>>,
    a: f64,
    b: f64,
    dim: usize,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Vec<f64>, f64)> {
    if a == b {
        return Ok((vec![0.0; dim], 0.0));
    }
    let sum = |segs: &[(f64, f64, Vec<f64>, f64)]| {
        let mut t = vec![0.0; dim];
        for s in segs {
            for d in 0..dim {
                t[d] += s.2[d];
            }
        }
        let err: f64 = segs.iter().map(|s| s.3).sum();
        (t, err)
    };
    let (v0, e0) = gk15_vec(&mut f, a, b, dim)?;
    let mut segs = vec![(a, b, v0, e0)];
    for _ in 0..4000 {
        let (total, err) = sum(&segs);
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok((total, err));
        }
        let (i, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (lo, hi, _, _) = segs.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (vl, el) = gk15_vec(&mut f, lo, mid, dim)?;
        let (vr, er) = gk15_vec(&mut f, mid, hi, dim)?;
        segs.push((lo, mid, vl, el));
        segs.push((mid, hi, vr, er));
    }
    let (total, err) = sum(&segs);
    let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if err <= 100.0 * abs_tol.max(rel_tol * scale) {
        Ok((total, err))
    } else {
        Err(Error::Quadrature(format!("adaptive quadrature stalled with error {err:e}")))
    }
}

/// Tanh–sinh on [0, 1]. The integrand receives (t, 1 − t), both computed
/// without cancellation, so endpoint singularities are harmless.
pub fn tanh_sinh_01(mut f: impl FnMut(f64, f64) -> Result<f64>, tol: f64) -> Result<(f64, f64)> {
    let umax = 4.5;
    let mut h = 0.5;
    let mut sum = {
        let mut s = 0.0;
        let n = (umax / h) as i64;
        for k in -n..=n {
            s += ts_term(&mut f, k as f64 * h)?;
        }
        s
    };
    let mut prev = sum * h;
    for _ in 0..10 {
        h *= 0.5;
        let n = (umax / h) as i64;
        let mut k = -n + if n % 2 == 0 { 1 } else { 0 };
        while k <= n {
            sum += ts_term(&mut f, k as f64 * h)?;
            k += 2;
        }
        let est = sum * h;
        let err = (est - prev).abs();
        if err <= tol * est.abs().max(1e-300) && h < 0.2 {
            return Ok((est, err));
        }
        prev = est;
    }
    Err(Error::Quadrature("tanh-sinh did not converge".into()))
}

fn ts_term(f: &mut dyn FnMut(f64, f64) -> Result<f64>, u: f64) -> Result<f64> {
    let s = PI * u.sinh();
    let t = 1.0 / (1.0 + (-s).exp());
    let omt = 1.0 / (1.0 + s.exp());
    if t == 0.0 || omt == 0.0 {
        return Ok(0.0);
    }
    let w = PI * u.cosh() * t * omt;
    let v = f(t, omt)?;
    Ok(v * w)
}

/// Brent's method on a bracketing interval.
pub fn brent(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain("root is not bracketed".into()));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Domain("root refinement did not converge".into()))
}

/// All sign changes of f on [a, b] found on a uniform scan, each refined by Brent.
pub fn bracket_roots(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, samples: usize, tol: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    let n = samples.max(2);
    let mut x0 = a;
    let mut f0 = f(a);
    if f0 == 0.0 {
        roots.push(a);
    }
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            roots.push(brent(&mut f, x0, x1, tol)?);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(roots)
}

/// Central-difference Richardson helper: given values D(h), D(h/2), … of a
/// quantity with an even error expansion, eliminate the h², h⁴ terms.
pub fn richardson(values: &[f64]) -> f64 {
    let mut t = values.to_vec();
    let mut factor = 4.0;
    while t.len() > 1 {
        t = t.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    t[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(5);
        let v = r.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 102.4).abs() < 1e-12);
        assert!((gauss_legendre(1).integrate(-1.0, 1.0, |_| 1.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_matches_known_moments() {
        // ∫(1−x²)^(1/2) dx = π/2, ∫ x²(1−x²)^(1/2) dx = π/8
        let r = gauss_jacobi(6, 0.5, 0.5);
        let s0: f64 = r.weights.iter().sum();
        let s2: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x * x).sum();
        assert!((s0 - PI / 2.0).abs() < 1e-13);
        assert!((s2 - PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_rules_integrate_moments() {
        for m in 1..=5 {
            let r = SphereRule::new(m, 6).unwrap();
            let area: f64 = r.weights.iter().sum();
            assert!((area - sphere_area(m)).abs() < 1e-12, "m={m}");
            let x4: f64 = r.points.iter().zip(&r.weights).map(|(p, w)| w * p[0].powi(4)).sum();
            // ∫ x1^4 = 3 A_m / (m(m+2))
            let want = 3.0 * sphere_area(m) / (m * (m + 2)) as f64;
            assert!((x4 - want).abs() < 1e-12, "m={m}");
        }
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let (v, _) = adaptive(|x| Ok(x.sqrt()), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_beta_integral() {
        // ∫ t^(−1/2)(1−t)^(−1/2) = π
        let (v, _) = tanh_sinh_01(|t, u| Ok(1.0 / (t * u).sqrt()), 1e-13).unwrap();
        assert!((v - PI).abs() < 1e-11);
    }

    #[test]
    fn roots_of_cosine() {
        let r = bracket_roots(f64::cos, 0.0, 10.0, 50, 1e-14).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[1] - 1.5 * PI).abs() < 1e-13);
    }
}
