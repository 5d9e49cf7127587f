//! Period matrices of the holomorphic differentials `x^{j-1} dx / s_l`.
//!
//! Every period is a combination of edge moments `∫ x^n dx / s_l` over the
//! sheet-0 lift of an edge. Half-edges are integrated in the variable
//! `x = λ + h u^N`, which removes the branch singularity, so the same
//! parametrisation also gives exact λ-derivatives by differentiating under
//! the integral sign.

use num_complex::Complex;

use crate::curve::{reduce, CurveSpec};
use crate::error::{Error, Result};
use crate::homology::HomologyBasis;
use crate::linalg::CMat;
use crate::quadrature::{adaptive_vec, GaussLegendre};
use crate::scalar::{arg_near, cone, czero, ln_near, lit, rat, root_of_unity, two_pi_i, Real};
use crate::surface::{local_expansion, segment_distance, SurfacePoint};

/// Quadrature controls.
#[derive(Debug, Clone)]
pub struct QuadSettings<T: Real> {
    pub order: usize,
    pub tol: T,
}

impl<T: Real> Default for QuadSettings<T> {
    fn default() -> Self {
        Self { order: 20, tol: (T::epsilon() * lit(64.0)).max(lit(1e-14)) }
    }
}

impl<T: Real> QuadSettings<T> {
    pub fn rule(&self) -> GaussLegendre<T> {
        GaussLegendre::new(self.order)
    }
}

/// Differential columns `(l, j)`, `l` outer, `j = 1..d(l)`.
pub fn columns<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<(u32, u32)>> {
    let rd = spec.validate()?;
    let mut out = Vec::new();
    for l in 1..spec.n {
        for j in 1..=rd.d(l) {
            out.push((l, j));
        }
    }
    Ok(out)
}

fn exponents<T: Real>(spec: &CurveSpec<T>, l: u32) -> Vec<T> {
    (0..spec.m()).map(|i| rat::<T>(spec.s_exponent(l, i))).collect()
}

/// Moments `∫_{λ_a}^{end} x^n dx / s_l`, `n < nmax`, along the straight segment.
///
/// `end_args[j]` is the argument of `end - λ_j` on the wanted branch. With
/// `dend = Some(v)`, where `v[k] = ∂end/∂λ_k`, the λ-derivatives are returned
/// too, indexed `[n][k]`.
#[allow(clippy::too_many_arguments)]
pub fn half_edge<T: Real>(
    spec: &CurveSpec<T>,
    a: usize,
    end: Complex<T>,
    end_args: &[T],
    l: u32,
    nmax: usize,
    dend: Option<&[T]>,
    q: &QuadSettings<T>,
) -> Result<(Vec<Complex<T>>, Vec<Vec<Complex<T>>>)> {
    let n = spec.n as i32;
    let m = spec.m();
    let e = exponents(spec, l);
    let rho = reduce(l as i64 * spec.r[a] as i64, n as i64) as i32;
    let la = spec.lambda[a];
    let h = end - la;
    let log_h = ln_near(h, end_args[a]);
    let pre = (log_h * (-e[a])).exp() * h * lit::<T>(n as f64);
    let nd = if dend.is_some() { nmax * m } else { 0 };
    let dim = nmax + nd;
    let rule = q.rule();
    let mut f = |u: T, out: &mut [Complex<T>]| {
        let un = u.powi(n);
        let x = la + h * un;
        let mut lsum = czero::<T>();
        for j in 0..m {
            if j != a {
                lsum += ln_near(x - spec.lambda[j], end_args[j]) * e[j];
            }
        }
        let base = pre * (-lsum).exp() * u.powi(n - 1 - rho);
        let mut xp = cone::<T>();
        for k in 0..nmax {
            out[k] = base * xp;
            xp *= x;
        }
        if let Some(dv) = dend {
            for k in 0..m {
                let dh = Complex::from(dv[k] - if k == a { T::one() } else { T::zero() });
                let dx = dh * un + if k == a { cone() } else { czero() };
                let mut dlog = dh / h * (T::one() - e[a]);
                for j in 0..m {
                    if j != a {
                        let djk = if j == k { cone() } else { czero() };
                        dlog -= (dx - djk) / (x - spec.lambda[j]) * e[j];
                    }
                }
                let mut xp = cone::<T>();
                let mut xpm = czero::<T>();
                for nn in 0..nmax {
                    out[nmax + nn * m + k] = base * (xp * dlog + xpm * lit::<T>(nn as f64) * dx);
                    xpm = xp;
                    xp *= x;
                }
            }
        }
    };
    let v = adaptive_vec(&rule, T::zero(), T::one(), dim, q.tol, &mut f)?;
    let moments = v[..nmax].to_vec();
    let derivs = if dend.is_some() { (0..nmax).map(|nn| v[nmax + nn * m..nmax + (nn + 1) * m].to_vec()).collect() } else { Vec::new() };
    Ok((moments, derivs))
}

/// Moments `∫_{x0}^{x1} x^n dx / s_l` on the branch with arguments `args0` at
/// `x0`; also returns the continued arguments at `x1`.
pub fn segment<T: Real>(
    spec: &CurveSpec<T>,
    x0: Complex<T>,
    args0: &[T],
    x1: Complex<T>,
    l: u32,
    nmax: usize,
    q: &QuadSettings<T>,
) -> Result<(Vec<Complex<T>>, Vec<T>)> {
    let m = spec.m();
    let e = exponents(spec, l);
    let dxv = x1 - x0;
    // split so that no argument moves by more than π/4 per piece
    let mut turn = T::zero();
    for l in &spec.lambda {
        let a0 = (x0 - l).arg();
        let a1 = arg_near(x1 - l, a0);
        turn = turn.max((a1 - a0).abs());
    }
    let pieces = (turn / T::FRAC_PI_4()).ceil().max(T::one()).to_usize().unwrap_or(1);
    let rule = q.rule();
    let mut total = vec![czero::<T>(); nmax];
    let mut args: Vec<T> = args0.to_vec();
    for p in 0..pieces {
        let t0 = lit::<T>(p as f64) / lit(pieces as f64);
        let t1 = lit::<T>((p + 1) as f64) / lit(pieces as f64);
        let start = x0 + dxv * t0;
        let anchors = args.clone();
        let mut f = |t: T, out: &mut [Complex<T>]| {
            let x = start + dxv * t;
            let mut ls = czero::<T>();
            for j in 0..m {
                ls += ln_near(x - spec.lambda[j], anchors[j]) * e[j];
            }
            let base = dxv * (-ls).exp();
            let mut xp = cone::<T>();
            for o in out.iter_mut() {
                *o = base * xp;
                xp *= x;
            }
        };
        let v = adaptive_vec(&rule, T::zero(), t1 - t0, nmax, q.tol, &mut f)?;
        for k in 0..nmax {
            total[k] += v[k];
        }
        let end = x0 + dxv * t1;
        for j in 0..m {
            args[j] = arg_near(end - spec.lambda[j], args[j]);
        }
    }
    Ok((total, args))
}

/// Moments `∫_X^∞ x^n dx / s_l` along the positive real ray from `X > max|λ|`
/// on the branch with arguments `args` at `X`. Also returns the sheet of the
/// limiting place at infinity.
pub fn ray<T: Real>(
    spec: &CurveSpec<T>,
    big_x: T,
    args: &[T],
    l: u32,
    nmax: usize,
    q: &QuadSettings<T>,
) -> Result<(Vec<Complex<T>>, u32)> {
    let m = spec.m();
    let e = exponents(spec, l);
    let d = e.iter().fold(T::zero(), |s, v| s + *v) - T::one();
    let d = d.round().to_i32().unwrap();
    if nmax as i32 > d {
        return Err(Error::Quadrature("moment diverges at infinity".into()));
    }
    let xc = Complex::from(big_x);
    let rule = q.rule();
    let mut f = |v: T, out: &mut [Complex<T>]| {
        let mut ls = czero::<T>();
        for j in 0..m {
            ls += ln_near(xc - spec.lambda[j] * v, args[j]) * e[j];
        }
        let base = (-ls).exp();
        for (nn, o) in out.iter_mut().enumerate() {
            *o = base * big_x.powi(nn as i32 + 1) * v.powi(d - 1 - nn as i32);
        }
    };
    let v = adaptive_vec(&rule, T::zero(), T::one(), nmax, q.tol, &mut f)?;
    let mut k = 0i64;
    for j in 0..m {
        let w = ((args[j] - (xc - spec.lambda[j]).arg()) / T::TAU()).round().to_i64().unwrap();
        // the argument tends to 2πw as v → 0
        k += w * spec.r[j] as i64;
    }
    Ok((v, k.rem_euclid(spec.n as i64) as u32))
}

/// Sheet-0 edge moments with λ-derivatives.
#[derive(Debug, Clone)]
pub struct EdgeMoments<T: Real> {
    /// `mu[l][n]` for `l = 1..N-1` (index `l`, entry 0 unused).
    pub mu: Vec<Vec<Complex<T>>>,
    /// `dmu[l][n][k] = ∂mu[l][n]/∂λ_k`.
    pub dmu: Vec<Vec<Vec<Complex<T>>>>,
}

pub fn edge_moments<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    q: &QuadSettings<T>,
) -> Result<Vec<EdgeMoments<T>>> {
    let rd = spec.validate()?;
    let m = spec.m();
    let mut out = Vec::new();
    for e in &basis.edges {
        let mid = e.mid(spec);
        let mut mu = vec![Vec::new(); spec.n as usize];
        let mut dmu = vec![Vec::new(); spec.n as usize];
        let mut dend = vec![T::zero(); m];
        dend[e.from] = lit(0.5);
        dend[e.to] = lit(0.5);
        for l in 1..spec.n {
            // n = 0 is kept even when d(l) = 0: its λ-derivative enters the bidifferential
            let nmax = (rd.d(l) as usize).max(1);
            let (ip, dp) = half_edge(spec, e.from, mid, &e.mid_args, l, nmax, Some(&dend), q)?;
            let (iq, dq) = half_edge(spec, e.to, mid, &e.mid_args, l, nmax, Some(&dend), q)?;
            mu[l as usize] = ip.iter().zip(&iq).map(|(a, b)| *a - *b).collect();
            dmu[l as usize] = dp
                .iter()
                .zip(&dq)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x - *y).collect())
                .collect();
        }
        out.push(EdgeMoments { mu, dmu });
    }
    Ok(out)
}

/// Period data for a curve and basis.
#[derive(Debug, Clone)]
pub struct PeriodData<T: Real> {
    pub columns: Vec<(u32, u32)>,
    /// `a[h][c] = ∮_{a_h} w_c`.
    pub a: CMat<T>,
    pub b: CMat<T>,
    pub tau: CMat<T>,
    pub a_inv: CMat<T>,
    pub det_c: Complex<T>,
    /// `∂A/∂λ_i` and `∂B/∂λ_i` for each `i`.
    pub da: Vec<CMat<T>>,
    pub db: Vec<CMat<T>>,
    pub moments: Vec<EdgeMoments<T>>,
}

/// `∮_{γ_{k,s}} x^n dx/s_l = (ω^{-ls} - ω^{-l(s+1)}) μ_{k,l,n}`.
fn generator_factor<T: Real>(n: u32, l: u32, s: u32) -> Complex<T> {
    root_of_unity::<T>(n, -((l * s) as i64)) - root_of_unity::<T>(n, -((l * (s + 1)) as i64))
}

/// Integral of `x^{nn} dx / s_l` over a cycle from the edge moments; with
/// `k = Some(i)` the λ_i-derivative instead.
pub fn cycle_moment<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    moments: &[EdgeMoments<T>],
    coeffs: &[i64],
    l: u32,
    nn: usize,
    k: Option<usize>,
) -> Complex<T> {
    let mut s = czero::<T>();
    for (g, &c) in basis.generators.iter().zip(coeffs) {
        if c == 0 {
            continue;
        }
        let em = &moments[g.edge];
        let v = match k {
            None => em.mu[l as usize][nn],
            Some(i) => em.dmu[l as usize][nn][i],
        };
        s += generator_factor::<T>(spec.n, l, g.sheet) * v * lit::<T>(c as f64);
    }
    s
}

pub fn compute_periods<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    q: &QuadSettings<T>,
) -> Result<PeriodData<T>> {
    let cols = columns(spec)?;
    let g = cols.len();
    let m = spec.m();
    let moments = edge_moments(spec, basis, q)?;
    let build = |cycles: &[crate::homology::Cycle], k: Option<usize>| {
        CMat::from_fn(g, g, |h, c| {
            let (l, j) = cols[c];
            cycle_moment(spec, basis, &moments, &cycles[h].coeffs, l, j as usize - 1, k)
        })
    };
    let a = build(&basis.a, None);
    let b = build(&basis.b, None);
    let lu = a.lu()?;
    let a_inv = lu.inverse()?;
    let tau = &b * &a_inv;
    let det_c = lu.det();
    let da = (0..m).map(|i| build(&basis.a, Some(i))).collect();
    let db = (0..m).map(|i| build(&basis.b, Some(i))).collect();
    let pd = PeriodData { columns: cols, a, b, tau, a_inv, det_c, da, db, moments };
    let im = pd.tau.im();
    let sym = pd.symmetry_defect();
    if sym > lit::<T>(1e-6) * (T::one() + pd.tau.max_abs()) {
        return Err(Error::Verification(format!("period matrix is not symmetric (defect {sym})")));
    }
    if crate::linalg::cholesky(&im).is_err() {
        return Err(Error::Verification("imaginary part of the period matrix is not positive definite".into()));
    }
    Ok(pd)
}

impl<T: Real> PeriodData<T> {
    pub fn genus(&self) -> usize {
        self.columns.len()
    }

    /// `max |τ - τᵀ|`.
    pub fn symmetry_defect(&self) -> T {
        self.tau.sub(&self.tau.transpose()).max_abs()
    }

    /// `max |AᵀB - BᵀA|`, the Riemann bilinear relation for holomorphic differentials.
    pub fn bilinear_defect(&self) -> T {
        let at = self.a.transpose();
        let bt = self.b.transpose();
        (&at * &self.b).sub(&(&bt * &self.a)).max_abs()
    }

    /// `M = A^{-T}`: normalized `v_r = Σ_c M_{rc} w_c` has `∮_{a_h} v_r = δ_{hr}`.
    pub fn normalizer(&self) -> CMat<T> {
        self.a_inv.transpose()
    }

    /// `∂τ/∂λ_i = (∂B - τ ∂A) A^{-1}`.
    pub fn dtau_from_periods(&self, i: usize) -> CMat<T> {
        &self.db[i].sub(&(&self.tau * &self.da[i])) * &self.a_inv
    }

    /// `∂ log det C / ∂λ_i = tr(A^{-1} ∂A)`.
    pub fn dlog_det_jacobi(&self, i: usize) -> Complex<T> {
        let p = &self.a_inv * &self.da[i];
        (0..self.genus()).fold(czero::<T>(), |s, k| s + p[(k, k)])
    }
}

/// Rauch variation `∂τ_{jk}/∂λ_i = (2πi/N) Σ_α c_j^α c_k^{N-2-α}`, where
/// `v_j = Σ c_j^α t^α dt` near the branch place.
pub fn dtau_rauch<T: Real>(spec: &CurveSpec<T>, pd: &PeriodData<T>, i: usize) -> CMat<T> {
    let n = spec.n as usize;
    let g = pd.genus();
    let mm = pd.normalizer();
    let raw: Vec<Vec<Complex<T>>> =
        pd.columns.iter().map(|&(l, j)| local_expansion(spec, l, j, i, n - 1)).collect();
    let c: Vec<Vec<Complex<T>>> = (0..g)
        .map(|r| (0..n - 1).map(|al| (0..g).fold(czero::<T>(), |s, cc| s + mm[(r, cc)] * raw[cc][al])).collect())
        .collect();
    let f = two_pi_i::<T>() / lit::<T>(n as f64);
    CMat::from_fn(g, g, |j, k| (0..n - 1).fold(czero::<T>(), |s, al| s + c[j][al] * c[k][n - 2 - al]) * f)
}

/// Central difference with one Richardson step, perturbing `λ_i` by `±h`, `±h/2`.
pub fn richardson<T: Real, V, F>(spec: &CurveSpec<T>, i: usize, h: T, mut f: F) -> Result<V>
where
    F: FnMut(&CurveSpec<T>) -> Result<V>,
    V: Clone + std::ops::Sub<Output = V> + std::ops::Mul<T, Output = V>,
{
    let mut at = |d: T| -> Result<V> {
        let mut lam = spec.lambda.clone();
        lam[i] += Complex::from(d);
        f(&spec.with_lambda(lam))
    };
    let d1 = (at(h)? - at(-h)?) * (T::one() / (h + h));
    let h2 = h * lit(0.5);
    let d2 = (at(h2)? - at(-h2)?) * (T::one() / (h2 + h2));
    Ok(d2 * (lit::<T>(4.0) / lit(3.0)) - d1 * (T::one() / lit(3.0)))
}

/// Finite-difference `∂τ/∂λ_i` with the basis transported to each perturbed curve.
pub fn dtau_fd<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    i: usize,
    h: T,
    q: &QuadSettings<T>,
) -> Result<Vec<Vec<Complex<T>>>> {
    let v = richardson(spec, i, h, |s| {
        let b = basis.transported(s)?;
        Ok(CVec(compute_periods(s, &b, q)?.tau.to_rows().concat()))
    })?;
    let g = basis.genus();
    Ok(v.0.chunks(g).map(|r| r.to_vec()).collect())
}

/// Finite-difference `∂ log det C/∂λ_i`, differencing `log(det C(λ')/det C(λ))`.
pub fn dlog_det_fd<T: Real>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    i: usize,
    h: T,
    q: &QuadSettings<T>,
) -> Result<Complex<T>> {
    let d0 = compute_periods(spec, basis, q)?.det_c;
    let v = richardson(spec, i, h, |s| {
        let b = basis.transported(s)?;
        Ok(CVec(vec![(compute_periods(s, &b, q)?.det_c / d0).ln()]))
    })?;
    Ok(v.0[0])
}

/// Component-wise vector used for finite differences.
#[derive(Debug, Clone)]
pub struct CVec<T: Real>(pub Vec<Complex<T>>);

impl<T: Real> std::ops::Sub for CVec<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        CVec(self.0.iter().zip(&o.0).map(|(a, b)| *a - *b).collect())
    }
}

impl<T: Real> std::ops::Mul<T> for CVec<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        CVec(self.0.iter().map(|a| *a * s).collect())
    }
}

/// `∫_{E_edge^{(sheet)}} f dz` for a function of the surface point, through the
/// same `u^N` substitution at both ends.
pub fn integrate_on_lift<T: Real, F: FnMut(&SurfacePoint<T>) -> Complex<T>>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    edge: usize,
    sheet: u32,
    q: &QuadSettings<T>,
    f: &mut F,
) -> Result<Complex<T>> {
    let e = &basis.edges[edge];
    let mid = e.mid(spec);
    let n = spec.n;
    let exps: Vec<Vec<T>> = (0..n).map(|l| exponents(spec, l)).collect();
    let rule = q.rule();
    let mut half = |a: usize| -> Result<Complex<T>> {
        let h = mid - spec.lambda[a];
        let ln_h = ln_near(h, e.mid_args[a]);
        let mut g = |u: T, out: &mut [Complex<T>]| {
            let x = spec.lambda[a] + h * u.powi(n as i32);
            let mut logs: Vec<Complex<T>> =
                spec.lambda.iter().zip(&e.mid_args).map(|(l, r)| ln_near(x - l, *r)).collect();
            // x - λ_a = h u^N exactly
            logs[a] = ln_h + u.ln() * lit::<T>(n as f64);
            let s = (0..n)
                .map(|l| {
                    let sum = logs.iter().zip(&exps[l as usize]).fold(czero::<T>(), |acc, (lg, ex)| acc + *lg * *ex);
                    root_of_unity::<T>(n, (l * sheet) as i64) * sum.exp()
                })
                .collect();
            let pt = SurfacePoint { z: x, s };
            out[0] = f(&pt) * h * lit::<T>(n as f64) * u.powi(n as i32 - 1);
        };
        Ok(adaptive_vec(&rule, T::zero(), T::one(), 1, q.tol, &mut g)?[0])
    };
    Ok(half(e.from)? - half(e.to)?)
}

/// `∮_cycle f dz` summed over the edge lifts of the cycle.
pub fn integrate_on_cycle<T: Real, F: FnMut(&SurfacePoint<T>) -> Complex<T>>(
    spec: &CurveSpec<T>,
    basis: &HomologyBasis<T>,
    cycle: &crate::homology::Cycle,
    q: &QuadSettings<T>,
    f: &mut F,
) -> Result<Complex<T>> {
    let mut total = czero::<T>();
    for (edge, sheet, k) in basis.lift_chain(cycle, spec.n) {
        total += integrate_on_lift(spec, basis, edge, sheet, q, f)? * lit::<T>(k as f64);
    }
    Ok(total)
}

/// Straight path from `a` to `b` clear of every branch point other than `except`.
pub fn is_clear<T: Real>(spec: &CurveSpec<T>, a: Complex<T>, b: Complex<T>, except: Option<usize>, margin: T) -> bool {
    spec.lambda
        .iter()
        .enumerate()
        .all(|(j, l)| Some(j) == except || segment_distance(*l, a, b) >= margin)
}
