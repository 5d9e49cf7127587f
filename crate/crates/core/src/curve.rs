//! The cyclic cover `y^N = ∏ (x - λ_i)^{R_i}` and its exact combinatorics.
//!
//! Indices are 0-based throughout the API: branch point `i` is `lambda[i]`,
//! and differential families are indexed by `l = 1..N-1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Real};

/// A cyclic cover of the projective line with all branch points finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec<T: Real> {
    pub n: u32,
    pub r: Vec<u32>,
    pub lambda: Vec<Complex<T>>,
    pub base_x: Complex<T>,
}

/// Ramification summary derived from `(N, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationData {
    /// Total ramification `m(N-1)`.
    pub total: u32,
    pub genus: u32,
    /// `d[l]` for `l = 0..N-1`; `d[0]` is unused and set to 0.
    pub d: Vec<u32>,
    /// `t[j]` = number of `R_i` equal to `j`, for `j = 0..N-1` (`t[0] = 0`).
    pub t: Vec<u32>,
}

impl RamificationData {
    /// Number of holomorphic differentials `x^{j-1} dx / s_l` in family `l`.
    pub fn d(&self, l: u32) -> u32 {
        self.d[l as usize]
    }
}

/// Representative of `j mod n` in `{0, .., n-1}`.
pub fn reduce(j: i64, n: i64) -> i64 {
    j.rem_euclid(n)
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplicative inverse of `a` modulo prime `n`.
pub(crate) fn inverse_mod(a: i64, n: i64) -> i64 {
    let a = reduce(a, n);
    (1..n).find(|x| (a * x) % n == 1).expect("invertible residue")
}

impl<T: Real> CurveSpec<T> {
    pub fn new(n: u32, r: Vec<u32>, lambda: Vec<Complex<T>>, base_x: Complex<T>) -> Self {
        Self { n, r, lambda, base_x }
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    /// Check every invariant and return the ramification data.
    pub fn validate(&self) -> Result<RamificationData> {
        let n = self.n;
        if !is_prime(n) {
            return Err(Error::InvalidCurve(format!("N = {n} is not prime")));
        }
        if self.r.len() != self.lambda.len() {
            return Err(Error::InvalidCurve(format!(
                "R has {} entries but lambda has {}",
                self.r.len(),
                self.lambda.len()
            )));
        }
        if self.r.len() < 2 {
            return Err(Error::InvalidCurve("need at least two branch points".into()));
        }
        for (i, &ri) in self.r.iter().enumerate() {
            if ri == 0 || ri >= n {
                return Err(Error::InvalidCurve(format!("R[{i}] = {ri} outside 1..{}", n - 1)));
            }
            if gcd(ri, n) != 1 {
                return Err(Error::InvalidCurve(format!("gcd(R[{i}], N) != 1")));
            }
        }
        let sum: u64 = self.r.iter().map(|&x| x as u64).sum();
        if !sum.is_multiple_of(n as u64) {
            return Err(Error::InvalidCurve(format!("sum of R = {sum} is not divisible by N = {n}")));
        }
        for (i, l) in self.lambda.iter().enumerate() {
            if !(l.re.is_finite() && l.im.is_finite()) {
                return Err(Error::InvalidCurve(format!("lambda[{i}] is not finite")));
            }
            for (j, k) in self.lambda.iter().enumerate().skip(i + 1) {
                if l == k {
                    return Err(Error::InvalidCurve(format!("lambda[{i}] = lambda[{j}]")));
                }
            }
            if *l == self.base_x {
                return Err(Error::InvalidCurve(format!("base_x coincides with lambda[{i}]")));
            }
        }
        if !(self.base_x.re.is_finite() && self.base_x.im.is_finite()) {
            return Err(Error::InvalidCurve("base_x is not finite".into()));
        }
        Ok(ramification(n, &self.r))
    }

    pub fn gamma_exponent(&self, i: usize, j: usize) -> Rational {
        gamma_exponent(self.n, self.r[i], self.r[j])
    }

    pub fn q_exponent(&self, beta: &[u32], i: usize, j: usize) -> Rational {
        q_exponent(self.n, beta[i], self.r[i], beta[j], self.r[j])
    }

    /// `e_i^{(l)} = reduce(l R_i)/N`, the exponent of `(x - λ_i)` in `s_l`.
    pub fn s_exponent(&self, l: u32, i: usize) -> Rational {
        let n = self.n as i64;
        Rational::new(reduce(l as i64 * self.r[i] as i64, n), n)
    }

    /// Smallest pairwise distance between branch points.
    pub fn min_separation(&self) -> T {
        let mut best = T::infinity();
        for (i, a) in self.lambda.iter().enumerate() {
            for b in self.lambda.iter().skip(i + 1) {
                best = best.min((a - b).norm());
            }
        }
        best
    }

    /// Characteristic length of the configuration.
    pub fn scale(&self) -> T {
        let mut s = T::zero();
        for a in &self.lambda {
            for b in &self.lambda {
                s = s.max((a - b).norm());
            }
        }
        s
    }

    /// Same cover with moved branch points.
    pub fn with_lambda(&self, lambda: Vec<Complex<T>>) -> Self {
        Self { lambda, ..self.clone() }
    }
}

/// Ramification data for `(N, R)` (no validation of λ).
pub fn ramification(n: u32, r: &[u32]) -> RamificationData {
    let m = r.len() as u32;
    let ni = n as i64;
    let mut d = vec![0u32; n as usize];
    for l in 1..n {
        let s: i64 = r.iter().map(|&ri| reduce(l as i64 * ri as i64, ni)).sum();
        debug_assert_eq!(s % ni, 0);
        d[l as usize] = (s / ni - 1).max(0) as u32;
    }
    let mut t = vec![0u32; n as usize];
    for &ri in r {
        t[ri as usize] += 1;
    }
    let g = (n - 1) * (m.saturating_sub(2)) / 2;
    RamificationData { total: m * (n - 1), genus: g, d, t }
}

/// `γ_ij = Σ_{w=0}^{N-1} {w R_i / N} {w R_j / N}`.
pub fn gamma_exponent(n: u32, ri: u32, rj: u32) -> Rational {
    let ni = n as i64;
    let num: i64 = (0..ni)
        .map(|w| reduce(w * ri as i64, ni) * reduce(w * rj as i64, ni))
        .sum();
    Rational::new(num, ni * ni)
}

/// `q(β_i, β_j) = Σ_{k=0}^{N-1} {(β_i + k R_i)/N} {(β_j + k R_j)/N}`.
pub fn q_exponent(n: u32, bi: u32, ri: u32, bj: u32, rj: u32) -> Rational {
    let ni = n as i64;
    let num: i64 = (0..ni)
        .map(|k| reduce(bi as i64 + k * ri as i64, ni) * reduce(bj as i64 + k * rj as i64, ni))
        .sum();
    Rational::new(num, ni * ni)
}

/// Centered variant: `Σ_k ({(β_i+kR_i)/N} - (N-1)/2N)({(β_j+kR_j)/N} - (N-1)/2N)`,
/// which equals `q - (N-1)^2/(4N)`.
pub fn q_centered(n: u32, bi: u32, ri: u32, bj: u32, rj: u32) -> Rational {
    let ni = n as i64;
    q_exponent(n, bi, ri, bj, rj) - Rational::new((ni - 1) * (ni - 1), 4 * ni)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn spec(n: u32, r: &[u32]) -> CurveSpec<f64> {
        let lambda = (0..r.len()).map(|i| Complex64::new(i as f64, 0.0)).collect();
        CurveSpec::new(n, r.to_vec(), lambda, Complex64::new(0.5, -1.0))
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce(5, 3), 2);
        assert_eq!(reduce(0, 3), 0);
        assert_eq!(reduce(-1, 3), 2);
    }

    #[test]
    fn genus_and_ramification() {
        let c = spec(3, &[1, 1, 1]);
        let rd = c.validate().unwrap();
        assert_eq!((rd.genus, rd.total), (1, 6));

        let c = CurveSpec::new(
            2,
            vec![1, 1, 1, 1],
            vec![0.0, 1.0, 2.0, 4.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
            Complex64::new(0.5, -1.0),
        );
        let rd = c.validate().unwrap();
        assert_eq!((rd.genus, rd.total), (1, 4));

        let rd = spec(3, &[1, 1, 2, 2]).validate().unwrap();
        assert_eq!(rd.genus, 2);
        assert_eq!((rd.d(1), rd.d(2)), (1, 1));
        assert_eq!(rd.t, vec![0, 2, 2]);
    }

    #[test]
    fn rejects_bad_curves() {
        assert!(matches!(spec(4, &[1, 1, 1, 1]).validate(), Err(Error::InvalidCurve(_))));
        assert!(matches!(spec(3, &[1, 1, 2, 1]).validate(), Err(Error::InvalidCurve(_))));
        let mut c = spec(2, &[1, 1, 1, 1]);
        c.lambda[2] = c.lambda[1];
        assert!(c.validate().is_err());
        let mut c = spec(2, &[1, 1, 1, 1]);
        c.lambda[0] = Complex64::new(f64::INFINITY, 0.0);
        assert!(c.validate().is_err());
        let mut c = spec(2, &[1, 1, 1, 1]);
        c.base_x = c.lambda[3];
        assert!(c.validate().is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_exponent(2, 1, 1), Rational::new(1, 4));
        assert_eq!(gamma_exponent(3, 1, 2), Rational::new(4, 9));
        assert_eq!(gamma_exponent(3, 1, 1), Rational::new(5, 9));
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_exponent(2, 0, 1, 1, 1), Rational::new(0, 1));
        assert_eq!(q_exponent(2, 0, 1, 0, 1), Rational::new(1, 4));
        let c = spec(3, &[1, 1, 2, 2]);
        assert_eq!(c.q_exponent(&[0, 1, 1, 2], 0, 1), Rational::new(2, 9));
    }

    #[test]
    fn centered_q_shift() {
        assert_eq!(q_centered(2, 0, 1, 0, 1), Rational::new(1, 8));
        assert_eq!(q_centered(3, 0, 1, 1, 1), Rational::new(2, 9) - Rational::new(1, 3));
    }
}
