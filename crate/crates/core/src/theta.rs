//! Riemann theta function with characteristics.
//!
//! `θ[a,b](z, τ) = Σ_n exp(πi (n+a)ᵀτ(n+a) + 2πi (n+a)ᵀ(z+b))`, summed over an
//! ellipsoid around the dominant lattice point. The radius comes from the
//! incomplete-gamma tail bound of Deconinck et al., with the shortest lattice
//! vector found by the same enumeration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, spd_inverse, CMat};
use crate::scalar::{czero, lit, two_pi_i, Real};

/// Which derivatives to accumulate alongside the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivatives {
    None,
    Gradient,
    Hessian,
}

#[derive(Debug, Clone)]
pub struct ThetaValue<T: Real> {
    pub value: Complex<T>,
    pub grad: Option<Vec<Complex<T>>>,
    pub hess: Option<CMat<T>>,
    /// Number of lattice points summed.
    pub terms: usize,
}

const MAX_POINTS: usize = 5_000_000;

/// Upper bound for `Γ(s, x)`, valid for `x > s - 1`.
fn upper_gamma_bound<T: Real>(s: T, x: T) -> T {
    if s <= T::one() {
        x.powf(s - T::one()) * (-x).exp()
    } else {
        x.powf(s - T::one()) * (-x).exp() * x / (x - s + T::one())
    }
}

/// Enumerate integer `n` with `(n - center)ᵀ M (n - center) ≤ r²`, where `M = U ᵀU`.
fn enumerate<T: Real>(u: &[Vec<T>], center: &[T], r2: T, out: &mut Vec<Vec<i64>>) -> Result<()> {
    let g = center.len();
    let mut n = vec![0i64; g];
    fn rec<T: Real>(
        u: &[Vec<T>],
        center: &[T],
        level: usize,
        budget: T,
        n: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) -> Result<()> {
        let g = center.len();
        // contribution of already fixed coordinates j > level to row `level`
        let mut shift = T::zero();
        for j in level + 1..g {
            shift += u[level][j] * (lit::<T>(n[j] as f64) - center[j]);
        }
        let d = u[level][level];
        let half = budget.max(T::zero()).sqrt() / d;
        let mid = center[level] - shift / d;
        let lo = (mid - half).ceil().to_i64().unwrap();
        let hi = (mid + half).floor().to_i64().unwrap();
        for k in lo..=hi {
            n[level] = k;
            let row = d * (lit::<T>(k as f64) - center[level]) + shift;
            let rem = budget - row * row;
            if rem < T::zero() {
                continue;
            }
            if level == 0 {
                out.push(n.clone());
                if out.len() > MAX_POINTS {
                    return Err(Error::Theta("ellipsoid radius cap reached".into()));
                }
            } else {
                rec(u, center, level - 1, rem, n, out)?;
            }
        }
        Ok(())
    }
    rec(u, center, g - 1, r2, &mut n, out)
}

/// Upper-triangular `U` with `UᵀU = π Im τ`.
fn metric<T: Real>(tau: &CMat<T>) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
    let g = tau.rows;
    let y = tau.im();
    for i in 0..g {
        for j in 0..g {
            let scale = y[i][j].abs().max(y[j][i].abs()).max(T::min_positive_value());
            if (y[i][j] - y[j][i]).abs() > lit::<T>(1e-6) * scale.max(T::one()) {
                return Err(Error::Theta("Im tau is not symmetric".into()));
            }
        }
    }
    let py: Vec<Vec<T>> = y.iter().map(|r| r.iter().map(|v| *v * T::PI()).collect()).collect();
    let l = cholesky(&py).map_err(|_| Error::Theta("Im tau is not positive definite".into()))?;
    let u: Vec<Vec<T>> = (0..g).map(|i| (0..g).map(|j| l[j][i]).collect()).collect();
    Ok((u, y))
}

/// Shortest nonzero vector length `ρ` in the metric `UᵀU`.
fn shortest_vector<T: Real>(u: &[Vec<T>]) -> Result<T> {
    let g = u.len();
    let zero = vec![T::zero(); g];
    // a unit vector gives an upper bound for the search radius
    let r2 = (0..g)
        .map(|i| (0..=i).map(|k| u[k][i] * u[k][i]).fold(T::zero(), |a, b| a + b))
        .fold(T::infinity(), T::min);
    let mut pts = Vec::new();
    enumerate(u, &zero, r2 * lit(1.0000001), &mut pts)?;
    let mut best = T::infinity();
    for p in pts.iter().filter(|p| p.iter().any(|&k| k != 0)) {
        let mut s = T::zero();
        for i in 0..g {
            let mut row = T::zero();
            for j in i..g {
                row += u[i][j] * lit::<T>(p[j] as f64);
            }
            s += row * row;
        }
        best = best.min(s);
    }
    Ok(best.sqrt())
}

/// Radius so that the tail is below `tol` relative to the dominant term.
fn radius<T: Real>(g: usize, rho: T, tol: T) -> T {
    let gt = lit::<T>(g as f64);
    let two = lit::<T>(2.0);
    let half_g = gt / two;
    let mut r = (gt.sqrt() / two + rho / two).max(rho);
    loop {
        let x = (r - rho / two).powi(2);
        if x > half_g - T::one() {
            let bound = half_g * (two / rho).powf(gt) * upper_gamma_bound(half_g, x);
            if bound < tol {
                // margin for the polynomial growth of derivative terms
                return r + lit(1.5);
            }
        }
        r += lit(0.25);
        if r > lit(1e3) {
            return r;
        }
    }
}

/// `θ[a,b](z, τ)` with requested derivatives in `z`.
pub fn theta_char<T: Real>(
    a: &[T],
    b: &[T],
    z: &[Complex<T>],
    tau: &CMat<T>,
    tol: T,
    derivs: Derivatives,
) -> Result<ThetaValue<T>> {
    let g = tau.rows;
    if tau.cols != g || z.len() != g || a.len() != g || b.len() != g {
        return Err(Error::Theta("dimension mismatch".into()));
    }
    let (u, y) = metric(tau)?;
    let yinv = spd_inverse(&y)?;
    let zb: Vec<Complex<T>> = z.iter().zip(b).map(|(zi, bi)| zi + *bi).collect();
    // dominant lattice point sits near -(a + Y^{-1} Im z)
    let center: Vec<T> = (0..g)
        .map(|i| {
            let c: T = (0..g).map(|j| yinv[i][j] * zb[j].im).fold(T::zero(), |s, v| s + v);
            -(a[i] + c)
        })
        .collect();
    let rho = shortest_vector(&u)?;
    let r = radius(g, rho, tol);
    let mut pts = Vec::new();
    enumerate(&u, &center, r * r, &mut pts)?;
    pts.sort_by(|p, q| {
        let np: i64 = p.iter().map(|k| k * k).sum();
        let nq: i64 = q.iter().map(|k| k * k).sum();
        np.cmp(&nq).then_with(|| p.cmp(q))
    });

    let pi_i = Complex::new(T::zero(), T::PI());
    let tpi = two_pi_i::<T>();
    let mut value = czero();
    let mut grad = vec![czero(); g];
    let mut hess = CMat::zeros(g, g);
    let mut shifted = vec![T::zero(); g];
    for p in &pts {
        for i in 0..g {
            shifted[i] = lit::<T>(p[i] as f64) + a[i];
        }
        let mut quad = czero();
        let mut lin = czero();
        for i in 0..g {
            let mut row = czero();
            for j in 0..g {
                row += tau[(i, j)] * shifted[j];
            }
            quad += row * shifted[i];
            lin += zb[i] * shifted[i];
        }
        let term = (pi_i * quad + tpi * lin).exp();
        value += term;
        if derivs != Derivatives::None {
            for i in 0..g {
                grad[i] += term * tpi * shifted[i];
            }
        }
        if derivs == Derivatives::Hessian {
            for i in 0..g {
                for j in 0..g {
                    hess[(i, j)] += term * tpi * tpi * shifted[i] * shifted[j];
                }
            }
        }
    }
    Ok(ThetaValue {
        value,
        grad: (derivs != Derivatives::None).then_some(grad),
        hess: (derivs == Derivatives::Hessian).then_some(hess),
        terms: pts.len(),
    })
}

/// Riemann theta without characteristics.
pub fn theta<T: Real>(z: &[Complex<T>], tau: &CMat<T>, tol: T, derivs: Derivatives) -> Result<ThetaValue<T>> {
    let zero = vec![T::zero(); tau.rows];
    theta_char(&zero, &zero, z, tau, tol, derivs)
}

/// `exp(-π yᵀ Y⁻¹ y)` with `y = Im z`; multiplies `|θ(z)|` into a quantity that
/// is invariant under lattice shifts of `z`.
pub fn gaussian_weight<T: Real>(z: &[Complex<T>], tau: &CMat<T>) -> Result<T> {
    let y = tau.im();
    let yinv = spd_inverse(&y)?;
    let g = z.len();
    let mut s = T::zero();
    for i in 0..g {
        for j in 0..g {
            s += z[i].im * yinv[i][j] * z[j].im;
        }
    }
    Ok((-T::PI() * s).exp())
}

/// Lattice-invariant modulus `|θ(z)| exp(-π yᵀY⁻¹y)`.
pub fn normalized_abs<T: Real>(z: &[Complex<T>], tau: &CMat<T>, tol: T) -> Result<T> {
    Ok(theta(z, tau, tol, Derivatives::None)?.value.norm() * gaussian_weight(z, tau)?)
}

/// Multiplier in `θ[a,b](z + τm + n) = exp(2πi aᵀn - πi mᵀτm - 2πi mᵀ(z+b)) θ[a,b](z)`.
pub fn quasi_period_factor<T: Real>(
    a: &[T],
    b: &[T],
    z: &[Complex<T>],
    tau: &CMat<T>,
    m: &[i64],
    n: &[i64],
) -> Complex<T> {
    let g = z.len();
    let pi_i = Complex::new(T::zero(), T::PI());
    let mut e = czero();
    for i in 0..g {
        let mi = lit::<T>(m[i] as f64);
        e += pi_i * lit::<T>(2.0) * a[i] * lit::<T>(n[i] as f64);
        e -= pi_i * lit::<T>(2.0) * (z[i] + b[i]) * mi;
        for j in 0..g {
            e -= pi_i * tau[(i, j)] * mi * lit::<T>(m[j] as f64);
        }
    }
    e.exp()
}
