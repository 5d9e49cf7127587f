//! Gauss–Legendre rules and an adaptive bisection driver.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, lit, Real};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T: Real> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Rule with `n` points; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x: T = lit((std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos());
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f` with this rule.
    pub fn integrate<F: FnMut(T) -> Complex<T>>(&self, a: T, b: T, mut f: F) -> Complex<T> {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        let mut s = czero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(mid + half * *x) * *w;
        }
        s * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = lit::<T>(k as f64);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let d = lit::<T>(n as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Adaptive integration on `[a, b]`: a panel is accepted when the rule on the
/// panel and on its two halves agree to `tol` relative to `scale`.
pub fn adaptive<T: Real, F: FnMut(T) -> Complex<T>>(
    rule: &GaussLegendre<T>,
    a: T,
    b: T,
    tol: T,
    f: &mut F,
) -> Result<Complex<T>> {
    let whole = rule.integrate(a, b, &mut *f);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = czero();
    let mut evals = 0usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = (lo + hi) * lit(0.5);
        let left = rule.integrate(lo, mid, &mut *f);
        let right = rule.integrate(mid, hi, &mut *f);
        evals += 2;
        let refined = left + right;
        let width = (hi - lo) / (b - a);
        if (refined - est).norm() <= tol * width.max(lit(1e-3)) * (T::one() + refined.norm()) {
            total += refined;
        } else if depth >= 40 || evals > 200_000 {
            return Err(Error::Quadrature(format!(
                "no convergence on [{lo}, {hi}] after {depth} bisections (diff {})",
                (refined - est).norm()
            )));
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

/// Vector-valued [`adaptive`]: `f(x, out)` fills `out` (length `dim`); every
/// component must meet the tolerance on a panel before it is accepted.
pub fn adaptive_vec<T: Real, F: FnMut(T, &mut [Complex<T>])>(
    rule: &GaussLegendre<T>,
    a: T,
    b: T,
    dim: usize,
    tol: T,
    f: &mut F,
) -> Result<Vec<Complex<T>>> {
    let mut buf = vec![czero::<T>(); dim];
    let mut panel = |lo: T, hi: T, buf: &mut [Complex<T>]| -> Vec<Complex<T>> {
        let half = (hi - lo) * lit(0.5);
        let mid = (lo + hi) * lit(0.5);
        let mut acc = vec![czero::<T>(); dim];
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            f(mid + half * *x, buf);
            for (s, v) in acc.iter_mut().zip(buf.iter()) {
                *s += *v * (*w * half);
            }
        }
        acc
    };
    let whole = panel(a, b, &mut buf);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = vec![czero::<T>(); dim];
    let mut evals = 0usize;
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = (lo + hi) * lit(0.5);
        let left = panel(lo, mid, &mut buf);
        let right = panel(mid, hi, &mut buf);
        evals += 2;
        let width = ((hi - lo) / (b - a)).max(lit(1e-3));
        let mut ok = true;
        let mut worst = T::zero();
        for k in 0..dim {
            let r = left[k] + right[k];
            let d = (r - est[k]).norm();
            worst = worst.max(d);
            if d > tol * width * (T::one() + r.norm()) {
                ok = false;
            }
        }
        if ok {
            for k in 0..dim {
                total[k] = total[k] + left[k] + right[k];
            }
        } else if depth >= 40 || evals > 200_000 {
            return Err(Error::Quadrature(format!(
                "no convergence on [{lo}, {hi}] after {depth} bisections (diff {worst})"
            )));
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}
