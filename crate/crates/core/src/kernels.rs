//! Algebraic kernels: the Szegő kernel `F_β`, the bidifferential `ξ` and the
//! canonical bidifferential `ω`, and the local invariants read off them.
//!
//! `ξ = (1/N) Σ_l P_l(z,w) dz dw / (s_l(x) s_{N-l}(y) (z-w)²)` with `P_0 = 1`
//! and, for `l > 0`,
//! `P_l(z,w) = Σ_S c_S ∏_{i∈S}(z-λ_i) ∏_{i∉S}(w-λ_i)` over subsets of size
//! `d(l)+1` whose weights have marginals `Σ_{S∋i} c_S = reduce(lR_i)/N`. This
//! fixes the two leading Taylor coefficients at `z = w` and the degree bounds.
//! Then `ω = ξ + Σ M_{cc'} w_c(x) w_{c'}(y)` with `M` chosen to kill a-periods.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::curve::{reduce, CurveSpec};
use crate::divisors::tau_profile;
use crate::error::{Error, Result};
use crate::homology::HomologyBasis;
use crate::linalg::CMat;
use crate::periods::{cycle_moment, PeriodData};
use crate::scalar::{cone, czero, lit, rat, root_of_unity, Rational, Real};
use crate::surface::{principal_logs, series_exp, BranchChart, SurfacePoint};

// ---------------------------------------------------------------- Szegő kernel

/// Exponents `(reduce(β_i + kR_i) - (N-1)/2)/N` of the spinor `f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorForm {
    pub k: u32,
    pub beta: Vec<u32>,
    pub exponents: Vec<Rational>,
}

pub fn spinor_forms<T: Real>(spec: &CurveSpec<T>, beta: &[u32]) -> Result<Vec<SpinorForm>> {
    let bv = tau_profile(spec, beta)?;
    if !bv.is_admissible() {
        return Err(Error::InvalidBeta(format!("beta {beta:?} is not admissible (profile {:?})", bv.tau)));
    }
    let n = spec.n as i64;
    Ok((0..spec.n)
        .map(|k| SpinorForm {
            k,
            beta: beta.to_vec(),
            exponents: beta
                .iter()
                .zip(&spec.r)
                .map(|(&b, &r)| {
                    Rational::new(2 * reduce(b as i64 + k as i64 * r as i64, n) - (n - 1), 2 * n)
                })
                .collect(),
        })
        .collect())
}

/// `F_β(P, Q)`, coefficient of `√dx₁ √dx₂`, for regular places `P = (x1, s1)`, `Q = (x2, s2)`.
///
/// The `k`-th term is `f_k(P)/f_k(Q)`, where `∏(x-λ_i)^{reduce(β_i+kR_i)/N}`
/// on sheet `s` carries the factor `ω^{ks}` of `y^k`.
pub fn szego_eval<T: Real>(
    spec: &CurveSpec<T>,
    beta: &[u32],
    p: (Complex<T>, u32),
    q: (Complex<T>, u32),
) -> Result<Complex<T>> {
    let forms = spinor_forms(spec, beta)?;
    let (x1, s1) = p;
    let (x2, s2) = q;
    if x1 == x2 {
        if s1 % spec.n == s2 % spec.n {
            return Err(Error::NotRegular("Szegő kernel has a pole on the diagonal".into()));
        }
        return Err(Error::NotRegular("evaluate off the fiber: use a nearby point".into()));
    }
    let l1 = principal_logs(spec, x1)?;
    let l2 = principal_logs(spec, x2)?;
    let mut sum = czero::<T>();
    for f in &forms {
        let mut e = czero::<T>();
        for (i, ex) in f.exponents.iter().enumerate() {
            e += (l1[i] - l2[i]) * rat::<T>(*ex);
        }
        let phase = root_of_unity::<T>(spec.n, f.k as i64 * (s1 as i64 - s2 as i64));
        sum += phase * e.exp();
    }
    Ok(sum / lit::<T>(spec.n as f64) / (x2 - x1))
}

/// Coefficients `c_0..c_order` of `F_β(P,Q)(x2 - x1) = Σ c_n (x1 - x2)^n` with
/// `P` on the sheet of `Q`.
pub fn szego_expansion<T: Real>(spec: &CurveSpec<T>, beta: &[u32], x2: Complex<T>, order: usize) -> Result<Vec<Complex<T>>> {
    let forms = spinor_forms(spec, beta)?;
    principal_logs(spec, x2)?;
    let len = order + 1;
    let mut total = vec![czero::<T>(); len];
    for f in &forms {
        // Σ_i c_i log(1 + δ/(x2-λ_i))
        let mut series = vec![czero::<T>(); len];
        for (i, ex) in f.exponents.iter().enumerate() {
            let c = rat::<T>(*ex);
            let inv = cone::<T>() / (x2 - spec.lambda[i]);
            let mut pw = cone::<T>();
            for (n, s) in series.iter_mut().enumerate().skip(1) {
                pw *= inv;
                let sign = if n % 2 == 1 { T::one() } else { -T::one() };
                *s += pw * (c * sign / lit(n as f64));
            }
        }
        for (t, v) in total.iter_mut().zip(series_exp(&series)) {
            *t += v;
        }
    }
    let nn = lit::<T>(spec.n as f64);
    Ok(total.into_iter().map(|v| v / nn).collect())
}

/// `(1/2N) Σ_{i,j} q_ij / ((x-λ_i)(x-λ_j))` with the stated `q` table, or the
/// centered table `q - (N-1)²/(4N)` when `centered`.
pub fn q_quadratic<T: Real>(spec: &CurveSpec<T>, beta: &[u32], x: Complex<T>, centered: bool) -> Complex<T> {
    let m = spec.m();
    let mut s = czero::<T>();
    for i in 0..m {
        for j in 0..m {
            let q = if centered {
                crate::curve::q_centered(spec.n, beta[i], spec.r[i], beta[j], spec.r[j])
            } else {
                spec.q_exponent(beta, i, j)
            };
            s += cone::<T>() / ((x - spec.lambda[i]) * (x - spec.lambda[j])) * rat::<T>(q);
        }
    }
    s / lit::<T>(2.0 * spec.n as f64)
}

// ---------------------------------------------------------------- polynomials

type Poly<T> = Vec<Complex<T>>;

fn poly_mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Poly<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![czero::<T>(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    out
}

fn poly_add_scaled<T: Real>(acc: &mut Poly<T>, p: &[Complex<T>], c: Complex<T>) {
    if acc.len() < p.len() {
        acc.resize(p.len(), czero());
    }
    for (a, v) in acc.iter_mut().zip(p) {
        *a += *v * c;
    }
}

fn poly_eval<T: Real>(p: &[Complex<T>], x: Complex<T>) -> Complex<T> {
    p.iter().rev().fold(czero::<T>(), |s, c| s * x + *c)
}

fn from_roots<T: Real>(roots: impl Iterator<Item = Complex<T>>) -> Poly<T> {
    roots.fold(vec![cone::<T>()], |p, r| poly_mul(&p, &[-r, cone()]))
}

// ---------------------------------------------------------------- ξ

/// Subset decomposition of `P_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiPolynomial {
    pub l: u32,
    /// `(S, c_S)` with `|S| = d(l) + 1`.
    pub terms: Vec<(Vec<usize>, Rational)>,
}

/// Weights on `k`-subsets with the given marginals (`Σ e = k`, every `e_i < 1`),
/// from systematic sampling of the cumulative sums.
pub fn subset_decomposition(e: &[Rational], k: usize) -> Result<Vec<(Vec<usize>, Rational)>> {
    let total: Rational = e.iter().copied().sum();
    if total != Rational::from_integer(k as i64) || e.iter().any(|v| *v < Rational::zero() || *v >= Rational::one()) {
        return Err(Error::InvalidCurve("marginals do not admit a subset decomposition".into()));
    }
    let mut cum = vec![Rational::zero()];
    for v in e {
        cum.push(*cum.last().unwrap() + *v);
    }
    let mut cuts: Vec<Rational> = cum.iter().map(|c| c.fract()).collect();
    cuts.push(Rational::one());
    cuts.sort();
    cuts.dedup();
    let mut out: Vec<(Vec<usize>, Rational)> = Vec::new();
    for w in cuts.windows(2) {
        let theta = w[0];
        let set: Vec<usize> = (0..e.len())
            .filter(|&i| {
                // some θ + t lies in [cum_i, cum_{i+1})
                let t = (cum[i] - theta).ceil();
                theta + t < cum[i + 1]
            })
            .collect();
        if set.len() != k {
            return Err(Error::InvalidCurve("subset decomposition produced a wrong size".into()));
        }
        match out.iter_mut().find(|(s, _)| *s == set) {
            Some(x) => x.1 += w[1] - w[0],
            None => out.push((set, w[1] - w[0])),
        }
    }
    Ok(out)
}

/// `P_l` for `l = 1..N-1`, with `P_{N-l}(z,w) = P_l(w,z)`.
pub fn xi_polynomials<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<XiPolynomial>> {
    let rd = spec.validate()?;
    let m = spec.m();
    let n = spec.n;
    let mut out: Vec<Option<XiPolynomial>> = vec![None; n as usize];
    for l in 1..n {
        let lc = n - l;
        if l > lc {
            continue;
        }
        let e: Vec<Rational> = (0..m).map(|i| spec.s_exponent(l, i)).collect();
        let mut terms = subset_decomposition(&e, rd.d(l) as usize + 1)?;
        let complement = |s: &[usize]| -> Vec<usize> { (0..m).filter(|i| !s.contains(i)).collect() };
        if l == lc {
            // self-paired: symmetrize so that P_l(z,w) = P_l(w,z)
            let mut sym: Vec<(Vec<usize>, Rational)> = Vec::new();
            for (s, c) in &terms {
                for key in [s.clone(), complement(s)] {
                    let half = *c / Rational::from_integer(2);
                    match sym.iter_mut().find(|(k, _)| *k == key) {
                        Some(x) => x.1 += half,
                        None => sym.push((key, half)),
                    }
                }
            }
            terms = sym;
        } else {
            let comp = terms.iter().map(|(s, c)| (complement(s), *c)).collect();
            out[lc as usize] = Some(XiPolynomial { l: lc, terms: comp });
        }
        out[l as usize] = Some(XiPolynomial { l, terms });
    }
    Ok(out.into_iter().flatten().collect())
}

impl XiPolynomial {
    /// Coefficients `P_a(w)` of `z^a`.
    fn z_coefficients<T: Real>(&self, spec: &CurveSpec<T>) -> Vec<Poly<T>> {
        let m = spec.m();
        let mut out: Vec<Poly<T>> = Vec::new();
        for (s, c) in &self.terms {
            let zp = from_roots(s.iter().map(|&i| spec.lambda[i]));
            let wp = from_roots((0..m).filter(|i| !s.contains(i)).map(|i| spec.lambda[i]));
            if out.len() < zp.len() {
                out.resize(zp.len(), Vec::new());
            }
            for (a, za) in zp.iter().enumerate() {
                poly_add_scaled(&mut out[a], &wp, *za * rat::<T>(*c));
            }
        }
        out
    }

    pub fn eval<T: Real>(&self, spec: &CurveSpec<T>, z: Complex<T>, w: Complex<T>) -> Complex<T> {
        let m = spec.m();
        self.terms.iter().fold(czero::<T>(), |acc, (s, c)| {
            let mut p = cone::<T>();
            for i in 0..m {
                p *= if s.contains(&i) { z - spec.lambda[i] } else { w - spec.lambda[i] };
            }
            acc + p * rat::<T>(*c)
        })
    }
}

// ---------------------------------------------------------------- ω

/// Canonical bidifferential in the form `ξ + Σ M_{cc'} w_c(x) w_{c'}(y)`.
#[derive(Debug, Clone)]
pub struct CanonicalBidifferential<T: Real> {
    pub spec: CurveSpec<T>,
    pub columns: Vec<(u32, u32)>,
    pub xi: Vec<XiPolynomial>,
    /// `∮_{a_h} ξ(·, y) = Σ_c K[h][c] w_c(y)`.
    pub k: CMat<T>,
    pub m: CMat<T>,
    /// Largest coefficient of `R_{h,l}(w)` above the allowed degree, relative.
    pub degree_defect: T,
}

fn xi_for(xi: &[XiPolynomial], l: u32) -> &XiPolynomial {
    xi.iter().find(|p| p.l == l).expect("every l has a polynomial")
}

pub fn canonical_bidifferential<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    periods: &PeriodData<T>,
) -> Result<CanonicalBidifferential<T>> {
    let rd = spec.validate()?;
    let n = spec.n;
    let m = spec.m();
    let g = periods.genus();
    let xi = xi_polynomials(spec)?;
    let cols = periods.columns.clone();
    let col = |l: u32, j: u32| cols.iter().position(|&c| c == (l, j));
    let mut k = CMat::zeros(g, g);
    let mut defect = T::zero();
    for h in 0..g {
        let coeffs = &basis.a[h].coeffs;
        for l in 1..n {
            let p = xi_for(&xi, l);
            let e: Vec<T> = (0..m).map(|i| rat::<T>(spec.s_exponent(l, i))).collect();
            let mut r: Poly<T> = Vec::new();
            for i in 0..m {
                // ∮ dz/(s_l (z-λ_i)) = ∂_{λ_i} ∮ dz/s_l / e_i
                let d = cycle_moment(spec, basis, &periods.moments, coeffs, l, 0, Some(i)) / e[i];
                let quot = from_roots((0..m).filter(|&j| j != i).map(|j| spec.lambda[j]));
                poly_add_scaled(&mut r, &quot, d * e[i]);
            }
            let pa = p.z_coefficients(spec);
            for j in 1..=rd.d(l) {
                let cval = periods.a[(h, col(l, j).unwrap())];
                // Σ_{a ≥ j+1} P_a(w) (a-j) w^{a-1-j}
                let mut qc: Poly<T> = Vec::new();
                for (a, pa_w) in pa.iter().enumerate() {
                    let a = a as u32;
                    if a > j {
                        let mut shifted = vec![czero::<T>(); (a - 1 - j) as usize];
                        shifted.extend_from_slice(pa_w);
                        poly_add_scaled(&mut qc, &shifted, Complex::from(lit::<T>((a - j) as f64)));
                    }
                }
                poly_add_scaled(&mut r, &qc, cval);
            }
            let lc = n - l;
            let allowed = rd.d(lc) as usize;
            let scale = r.iter().fold(T::zero(), |s, c| s.max(c.norm())).max(T::epsilon());
            for (deg, c) in r.iter().enumerate() {
                if deg >= allowed {
                    defect = defect.max(c.norm() / scale);
                } else {
                    let cc = col(lc, deg as u32 + 1).unwrap();
                    k[(h, cc)] += *c / lit::<T>(n as f64);
                }
            }
        }
    }
    let mm = (&periods.a_inv * &k).scale(-cone::<T>());
    Ok(CanonicalBidifferential { spec: spec.clone(), columns: cols, xi, k, m: mm, degree_defect: defect })
}

impl<T: Real> CanonicalBidifferential<T> {
    fn holo(&self, p: &SurfacePoint<T>) -> Vec<Complex<T>> {
        self.columns.iter().map(|&(l, j)| p.z.powi(j as i32 - 1) / p.s[l as usize]).collect()
    }

    /// `ξ(x,y)`, coefficient of `dz dw`.
    pub fn xi(&self, x: &SurfacePoint<T>, y: &SurfacePoint<T>) -> Complex<T> {
        let n = self.spec.n;
        let (z, w) = (x.z, y.z);
        let d2 = (z - w) * (z - w);
        let mut s = cone::<T>();
        for l in 1..n {
            let p = xi_for(&self.xi, l);
            s += p.eval(&self.spec, z, w) / (x.s[l as usize] * y.s[(n - l) as usize]);
        }
        s / d2 / lit::<T>(n as f64)
    }

    /// `Σ M_{cc'} w_c(x) w_{c'}(y)`.
    pub fn holomorphic_part(&self, x: &SurfacePoint<T>, y: &SurfacePoint<T>) -> Complex<T> {
        let wx = self.holo(x);
        let wy = self.holo(y);
        let g = wx.len();
        let mut s = czero::<T>();
        for c in 0..g {
            for d in 0..g {
                s += self.m[(c, d)] * wx[c] * wy[d];
            }
        }
        s
    }

    /// `ω(x,y)`, coefficient of `dz dw`.
    pub fn eval(&self, x: &SurfacePoint<T>, y: &SurfacePoint<T>) -> Complex<T> {
        self.xi(x, y) + self.holomorphic_part(x, y)
    }

    /// `max |M - Mᵀ|`.
    pub fn m_asymmetry(&self) -> T {
        self.m.sub(&self.m.transpose()).max_abs()
    }

    /// `G_z(x)`, the constant term of `ω(x,y) - dz dw/(z-w)²` as `y → x`.
    pub fn gz(&self, x: &SurfacePoint<T>) -> Complex<T> {
        let spec = &self.spec;
        let n = spec.n;
        let m = spec.m();
        let w = x.z;
        let a0 = spec.lambda.iter().fold(cone::<T>(), |p, l| p * (w - l));
        let mut total = czero::<T>();
        for l in 1..n {
            let p = xi_for(&self.xi, l);
            let pa = p.z_coefficients(spec);
            // A_2(w) = ½ ∂_z² P_l at z = w
            let mut a2 = czero::<T>();
            for (a, pw) in pa.iter().enumerate().skip(2) {
                a2 += poly_eval(pw, w) * w.powi(a as i32 - 2) * lit::<T>((a * (a - 1)) as f64 / 2.0);
            }
            let mut s1 = czero::<T>();
            let mut s2 = czero::<T>();
            for i in 0..m {
                let e = rat::<T>(spec.s_exponent(l, i));
                let inv = cone::<T>() / (w - spec.lambda[i]);
                s1 += inv * e;
                s2 += inv * inv * e;
            }
            // s_l s_{N-l} = A_0 on one sheet
            total = total + a2 / a0 - s1 * s1 * lit::<T>(0.5) + s2 * lit::<T>(0.5);
        }
        total / lit::<T>(n as f64) + self.holomorphic_part(x, x)
    }
}

/// Result of the `t^{N-2}` extraction at a branch point.
#[derive(Debug, Clone)]
pub struct GzCoefficient<T: Real> {
    pub value: Complex<T>,
    /// Difference between the two sampling radii.
    pub fit_residual: T,
    /// `-N Σ_{j≠i} γ_ij/(λ_i - λ_j)`.
    pub gamma_term: Complex<T>,
}

/// Coefficient of `t^{N-2} dt²` of `G_z` in `t = (z - λ_i)^{1/N}`, by a
/// discrete Fourier fit on two circles.
pub fn gz_coefficient<T: Real>(omega: &CanonicalBidifferential<T>, i: usize, samples: usize) -> Result<GzCoefficient<T>> {
    let spec = &omega.spec;
    let n = spec.n as i32;
    let chart = BranchChart::new(spec, i);
    let rad = chart.radius(spec);
    let fit = |rho: T| -> Complex<T> {
        let mut acc = czero::<T>();
        for j in 0..samples {
            let phi = (T::PI() + T::PI()) * (lit::<T>(j as f64) + lit(0.5)) / lit(samples as f64);
            let t = Complex::from_polar(rho, phi);
            let pt = chart.point(spec, t);
            let dz = chart.dz_dt(spec, t);
            acc += omega.gz(&pt) * dz * dz / t.powi(n - 2);
        }
        acc / lit::<T>(samples as f64)
    };
    let v1 = fit(rad * lit(0.3));
    let v2 = fit(rad * lit(0.2));
    let gamma_term = (0..spec.m())
        .filter(|&j| j != i)
        .fold(czero::<T>(), |s, j| {
            s + cone::<T>() / (spec.lambda[i] - spec.lambda[j]) * rat::<T>(spec.gamma_exponent(i, j))
        })
        * (-lit::<T>(n as f64));
    Ok(GzCoefficient { value: v2, fit_residual: (v1 - v2).norm() / (T::one() + v2.norm()), gamma_term })
}

// ---------------------------------------------------------------- Cramer identities

/// Both sides of `det B = det C` and `det B_l = Σ_v det C_v` at branch point `i`.
#[derive(Debug, Clone)]
pub struct CramerCheck<T: Real> {
    pub det_b: Complex<T>,
    pub det_c: Complex<T>,
    pub det_bl: Complex<T>,
    pub sum_cv: Complex<T>,
}

impl<T: Real> CramerCheck<T> {
    pub fn residuals(&self) -> (T, T) {
        (
            (self.det_b - self.det_c).norm() / self.det_c.norm(),
            (self.det_bl - self.sum_cv).norm() / self.sum_cv.norm().max(self.det_c.norm() * T::epsilon()),
        )
    }
}

pub fn cramer_decomposition_check<T: Real>(spec: &CurveSpec<T>, periods: &PeriodData<T>, i: usize, l: u32) -> Result<CramerCheck<T>> {
    let cols = &periods.columns;
    let g = cols.len();
    let lam = spec.lambda[i];
    let binom = |n: u32, k: u32| -> T {
        (0..k).fold(T::one(), |s, t| s * lit::<T>((n - t) as f64) / lit::<T>((t + 1) as f64))
    };
    let col_of = |l: u32, j: u32| cols.iter().position(|&c| c == (l, j)).unwrap();
    // column (l, j) of B: ∮ (z - λ_i)^{j-1} dz / s_l
    let b = CMat::from_fn(g, g, |h, c| {
        let (cl, j) = cols[c];
        (0..j).fold(czero::<T>(), |s, k| {
            s + periods.a[(h, col_of(cl, k + 1))] * binom(j - 1, k) * (-lam).powi((j - 1 - k) as i32)
        })
    });
    let first = cols
        .iter()
        .position(|&c| c == (l, 1))
        .ok_or_else(|| Error::Verification(format!("no holomorphic differential with l = {l}")))?;
    let dcol = |c: usize| -> Vec<Complex<T>> { (0..g).map(|h| periods.da[i][(h, c)]).collect() };
    let det_bl = b.with_column(first, &dcol(first)).det()?;
    let mut sum_cv = czero::<T>();
    for (c, &(cl, _)) in cols.iter().enumerate() {
        if cl == l {
            sum_cv += periods.a.with_column(c, &dcol(c)).det()?;
        }
    }
    Ok(CramerCheck { det_b: b.det()?, det_c: periods.det_c, det_bl, sum_cv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::build_basis;
    use crate::periods::{compute_periods, integrate_on_cycle, QuadSettings};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn t1() -> CurveSpec<f64> {
        CurveSpec::new(2, vec![1; 4], vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], c(0.5, -1.0))
    }

    fn t2() -> CurveSpec<f64> {
        CurveSpec::new(3, vec![1, 1, 2, 2], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)], c(0.5, -1.0))
    }

    #[test]
    fn decomposition_has_requested_marginals() {
        let e = [Rational::new(1, 3), Rational::new(2, 3), Rational::new(1, 3), Rational::new(2, 3)];
        let d = subset_decomposition(&e, 2).unwrap();
        let total: Rational = d.iter().map(|x| x.1).sum();
        assert_eq!(total, Rational::one());
        for i in 0..4 {
            let mi: Rational = d.iter().filter(|x| x.0.contains(&i)).map(|x| x.1).sum();
            assert_eq!(mi, e[i]);
        }
    }

    #[test]
    fn xi_polynomial_leading_terms() {
        let spec = t2();
        let xi = xi_polynomials(&spec).unwrap();
        let w = c(0.3, -0.7);
        let a0: Complex64 = spec.lambda.iter().map(|l| w - l).product();
        for p in &xi {
            assert!((p.eval(&spec, w, w) - a0).norm() < 1e-13);
            let h = 1e-5;
            let d = (p.eval(&spec, w + h, w) - p.eval(&spec, w - h, w)) / (2.0 * h);
            let a1: Complex64 =
                (0..4).map(|i| a0 / (w - spec.lambda[i]) * rat::<f64>(spec.s_exponent(p.l, i))).sum();
            assert!((d - a1).norm() < 1e-8);
        }
        let z = c(1.7, 0.2);
        let p1 = xi.iter().find(|p| p.l == 1).unwrap();
        let p2 = xi.iter().find(|p| p.l == 2).unwrap();
        assert!((p1.eval(&spec, z, w) - p2.eval(&spec, w, z)).norm() < 1e-13);
    }

    #[test]
    fn szego_series_and_regularity() {
        let spec = t2();
        let beta = [0, 1, 1, 2];
        let x2 = c(0.7, -0.55);
        let coeffs = szego_expansion(&spec, &beta, x2, 4).unwrap();
        assert!((coeffs[0] - 1.0).norm() < 1e-14);
        assert!(coeffs[1].norm() < 1e-14);
        assert!((coeffs[2] - q_quadratic(&spec, &beta, x2, true)).norm() < 1e-13);
        // sampled coefficients
        let rho = 0.05;
        let k = 32;
        let mut c2 = c(0.0, 0.0);
        for j in 0..k {
            let d = Complex64::from_polar(rho, std::f64::consts::TAU * j as f64 / k as f64);
            let f = szego_eval(&spec, &beta, (x2 + d, 1), (x2, 1)).unwrap() * (-d);
            c2 += f / (d * d);
        }
        c2 /= k as f64;
        assert!((c2 - coeffs[2]).norm() < 1e-10, "{c2} {}", coeffs[2]);
        // bounded across the fiber
        let mut last = 0.0;
        for s in 1..6 {
            let eps = 10f64.powi(-s);
            let v = szego_eval(&spec, &beta, (x2 + eps, 0), (x2, 1)).unwrap().norm();
            if s > 1 {
                assert!((v - last).abs() < 1e-1 * last.max(1.0));
            }
            last = v;
        }
    }

    #[test]
    fn omega_properties() {
        for spec in [t1(), t2()] {
            let basis = build_basis(&spec).unwrap();
            let q = QuadSettings::default();
            let pd = compute_periods(&spec, &basis, &q).unwrap();
            let om = canonical_bidifferential(&spec, &basis, &pd).unwrap();
            assert!(om.degree_defect < 1e-10, "{}", om.degree_defect);
            assert!(om.m_asymmetry() < 1e-10 * (1.0 + om.m.max_abs()), "{}", om.m_asymmetry());
            let y = SurfacePoint::regular(&spec, c(1.3, 1.9), 1).unwrap();
            for cyc in &basis.a {
                let v = integrate_on_cycle(&spec, &basis, cyc, &q, &mut |p| om.eval(p, &y)).unwrap();
                assert!(v.norm() < 1e-9, "{v}");
            }
            let x = SurfacePoint::regular(&spec, c(-0.4, 0.8), 0).unwrap();
            assert!((om.eval(&x, &y) - om.eval(&y, &x)).norm() < 1e-10);
            let x2 = SurfacePoint::regular(&spec, y.z + c(1e-4, 1e-4), 1).unwrap();
            let d = x2.z - y.z;
            assert!((om.eval(&x2, &y) * d * d - 1.0).norm() < 1e-6);
            for i in 0..spec.m() {
                let gz = gz_coefficient(&om, i, 64).unwrap();
                let expect = gz.gamma_term - pd.dlog_det_jacobi(i) * spec.n as f64;
                assert!((gz.value - expect).norm() < 1e-9 * (1.0 + expect.norm()), "{} {}", gz.value, expect);
                assert!(gz.fit_residual < 1e-10);
            }
        }
    }

    #[test]
    fn cramer_identities() {
        for spec in [t1(), t2()] {
            let basis = build_basis(&spec).unwrap();
            let pd = compute_periods(&spec, &basis, &QuadSettings::default()).unwrap();
            for i in 0..spec.m() {
                for l in 1..spec.n {
                    let ck = cramer_decomposition_check(&spec, &pd, i, l).unwrap();
                    let (r1, r2) = ck.residuals();
                    assert!(r1 < 1e-12 && r2 < 1e-10, "{r1} {r2}");
                }
            }
        }
    }
}
