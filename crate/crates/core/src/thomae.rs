//! Thomae-type identities: `θ[e_β](0) = α √det C ∏_{i≠j} (λ_i - λ_j)^{q_ij + γ_ij/2}`.
//!
//! The theta constant is evaluated with fixed rational characteristics (read
//! off `e_β` once) so that, along a deformation, it depends on λ only through τ.

use num_complex::Complex;
use num_traits::Zero;

use crate::abeljacobi::{riemann_constant, theta_scale, AbelMap, DivisorData, RiemannConstant};
use crate::curve::{q_centered, CurveSpec};
use crate::divisors::{enumerate_congruent, tau_profile};
use crate::error::{Error, Result};
use crate::homology::{build_basis, HomologyBasis};
use crate::linalg::CMat;
use crate::periods::{compute_periods, dtau_rauch, richardson, CVec, PeriodData, QuadSettings};
use crate::scalar::{arg_near, czero, lit, rat, two_pi_i, Rational, Real};
use crate::theta::{normalized_abs, theta_char, Derivatives};

/// Which exponent table to use on the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponents {
    /// `q_ij + γ_ij/2` over ordered pairs `i ≠ j`, as stated.
    Stated,
    /// `q_ij - (N-1)²/(4N) + γ_ij/2` over unordered pairs.
    Centered,
}

/// Everything computed once per curve.
#[derive(Debug, Clone)]
pub struct CurveData<T: Real> {
    pub spec: CurveSpec<T>,
    pub basis: HomologyBasis<T>,
    pub periods: PeriodData<T>,
    pub riemann: RiemannConstant<T>,
    pub divisors: DivisorData<T>,
    pub quad: QuadSettings<T>,
    pub theta_tol: T,
}

impl<T: Real> CurveData<T> {
    pub fn new(spec: &CurveSpec<T>, quad: QuadSettings<T>, theta_tol: T, seed: u64) -> Result<Self> {
        let basis = build_basis(spec)?;
        let periods = compute_periods(spec, &basis, &quad)?;
        let abel = AbelMap::new(spec, &periods, quad.clone())?;
        let riemann = riemann_constant(&abel, seed, theta_tol)?;
        let divisors = DivisorData::new(&abel, &riemann)?;
        Ok(Self { spec: spec.clone(), basis, periods, riemann, divisors, quad, theta_tol })
    }

    /// Characteristics `(a, b)` of `e_β`, denominator `2N`.
    pub fn characteristics(&self, beta: &[u32]) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let p = self.divisors.divisor_point(&self.spec, &self.periods.tau, beta)?;
        Ok((p.char_a.unwrap_or_default(), p.char_b.unwrap_or_default()))
    }

    fn theta_at(&self, ch: &(Vec<Rational>, Vec<Rational>), tau: &CMat<T>, derivs: Derivatives) -> Result<crate::theta::ThetaValue<T>> {
        let (a, b) = floats(ch);
        let z = vec![czero::<T>(); tau.rows];
        theta_char(&a, &b, &z, tau, self.theta_tol, derivs)
    }
}

fn floats<T: Real>(ch: &(Vec<Rational>, Vec<Rational>)) -> (Vec<T>, Vec<T>) {
    (ch.0.iter().map(|q| rat(*q)).collect(), ch.1.iter().map(|q| rat(*q)).collect())
}

/// Exponent of `(λ_i - λ_j)`, exact.
pub fn exponent_matrix<T: Real>(spec: &CurveSpec<T>, beta: &[u32], kind: Exponents) -> Vec<Vec<Rational>> {
    let m = spec.m();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        return Rational::zero();
                    }
                    let q = match kind {
                        Exponents::Stated => spec.q_exponent(beta, i, j),
                        Exponents::Centered => q_centered(spec.n, beta[i], spec.r[i], beta[j], spec.r[j]),
                    };
                    q + spec.gamma_exponent(i, j) / Rational::from_integer(2)
                })
                .collect()
        })
        .collect()
}

fn check_distinct<T: Real>(spec: &CurveSpec<T>) -> Result<()> {
    if spec.min_separation() <= T::epsilon() * spec.scale() {
        return Err(Error::InvalidCurve("coincident branch points".into()));
    }
    Ok(())
}

fn pairs(m: usize, kind: Exponents) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j && (kind == Exponents::Stated || i < j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// `√det C · exp(Σ e_ij Log(λ_i - λ_j))` with principal branches.
pub fn rhs_value<T: Real>(spec: &CurveSpec<T>, periods: &PeriodData<T>, beta: &[u32], kind: Exponents) -> Result<Complex<T>> {
    check_distinct(spec)?;
    if !tau_profile(spec, beta)?.is_admissible() {
        return Err(Error::InvalidBeta(format!("{beta:?} is not admissible")));
    }
    let e = exponent_matrix(spec, beta, kind);
    let mut log = periods.det_c.ln() * lit::<T>(0.5);
    for (i, j) in pairs(spec.m(), kind) {
        log += (spec.lambda[i] - spec.lambda[j]).ln() * rat::<T>(e[i][j]);
    }
    Ok(log.exp())
}

/// `|θ[e_β](0)|` against the largest of `count` random values, both Gaussian-normalized.
#[derive(Debug, Clone, Copy)]
pub struct NonVanishing<T: Real> {
    pub value: T,
    pub scale: T,
    pub order: u32,
}

impl<T: Real> NonVanishing<T> {
    pub fn ratio(&self) -> T {
        self.value / self.scale
    }

    pub fn passed(&self, threshold: T) -> bool {
        if self.order == 0 {
            self.ratio() > threshold
        } else {
            self.ratio() < threshold
        }
    }
}

pub fn verify_nonvanishing<T: Real>(data: &CurveData<T>, beta: &[u32], count: usize, seed: u64) -> Result<NonVanishing<T>> {
    let spec = &data.spec;
    let tau = &data.periods.tau;
    let profile = tau_profile(spec, beta)?;
    let p = data.divisors.divisor_point(spec, tau, beta);
    // non-admissible divisors need not be torsion: use the raw point
    let z = match p {
        Ok(p) => p.z,
        Err(Error::Characteristic(_)) => {
            let mut e = data.divisors.k.clone();
            for (b, ui) in beta.iter().zip(&data.divisors.branch) {
                for (x, y) in e.iter_mut().zip(ui) {
                    *x += *y * lit::<T>(*b as f64);
                }
            }
            for (x, y) in e.iter_mut().zip(&data.divisors.infinity_fiber) {
                *x += *y * lit::<T>((profile.tau[0] - 1) as f64);
            }
            e
        }
        Err(e) => return Err(e),
    };
    let value = normalized_abs(&z, tau, data.theta_tol)?;
    let scale = theta_scale(tau, count, seed, data.theta_tol)?;
    Ok(NonVanishing { value, scale, order: profile.order })
}

/// `max_i |∂θ[a,b]/∂z_i(0)| / |θ[a,b](0)|`.
pub fn verify_first_derivatives<T: Real>(data: &CurveData<T>, beta: &[u32]) -> Result<T> {
    let ch = data.characteristics(beta)?;
    gradient_ratio(data, &ch)
}

pub fn gradient_ratio<T: Real>(data: &CurveData<T>, ch: &(Vec<Rational>, Vec<Rational>)) -> Result<T> {
    let th = data.theta_at(ch, &data.periods.tau, Derivatives::Gradient)?;
    let grad = th.grad.unwrap_or_default();
    Ok(grad.iter().fold(T::zero(), |m, v| m.max(v.norm())) / th.value.norm())
}

/// Both sides of the logarithmic derivative identity at branch point `i`.
#[derive(Debug, Clone)]
pub struct DerivativeIdentity<T: Real> {
    pub i: usize,
    /// Finite differences of `log θ[a,b](0, τ(λ))`.
    pub lhs: Complex<T>,
    /// Heat equation with the Rauch variation of τ.
    pub lhs_heat: Complex<T>,
    pub half_dlog_det: Complex<T>,
    pub rhs_stated: Complex<T>,
    pub rhs_centered: Complex<T>,
}

impl<T: Real> DerivativeIdentity<T> {
    pub fn residual(&self) -> T {
        (self.lhs - self.rhs_stated).norm() / self.lhs.norm().max(self.rhs_stated.norm())
    }

    pub fn residual_centered(&self) -> T {
        (self.lhs - self.rhs_centered).norm() / self.lhs.norm().max(self.rhs_centered.norm())
    }

    pub fn heat_residual(&self) -> T {
        (self.lhs - self.lhs_heat).norm() / self.lhs.norm().max(T::epsilon())
    }
}

/// `Σ_{j≠i} e_ij / (λ_i - λ_j)`, each pair once as in the stated identity.
fn pair_sum<T: Real>(spec: &CurveSpec<T>, beta: &[u32], i: usize, kind: Exponents) -> Complex<T> {
    let e = exponent_matrix(spec, beta, kind);
    (0..spec.m())
        .filter(|&j| j != i)
        .fold(czero::<T>(), |s, j| s + Complex::from(rat::<T>(e[i][j])) / (spec.lambda[i] - spec.lambda[j]))
}

pub fn verify_derivative_identity<T: Real>(data: &CurveData<T>, beta: &[u32], i: usize, rel_step: T) -> Result<DerivativeIdentity<T>> {
    let spec = &data.spec;
    let ch = data.characteristics(beta)?;
    let th0 = data.theta_at(&ch, &data.periods.tau, Derivatives::Hessian)?;
    if th0.value.norm() < lit::<T>(1e3) * T::epsilon() {
        return Err(Error::Verification(format!("theta[e_beta] too small for stable logs: {}", th0.value.norm())));
    }
    let h = rel_step * spec.scale();
    let lhs = richardson(spec, i, h, |s| {
        let b = data.basis.transported(s)?;
        let pd = compute_periods(s, &b, &data.quad)?;
        Ok(CVec(vec![(data.theta_at(&ch, &pd.tau, Derivatives::None)?.value / th0.value).ln()]))
    })?
    .0[0];
    let dtau = dtau_rauch(spec, &data.periods, i);
    let hess = th0.hess.clone().unwrap_or_else(|| CMat::zeros(0, 0));
    let g = dtau.rows;
    let mut heat = czero::<T>();
    for k in 0..g {
        for r in 0..g {
            heat += hess[(k, r)] * dtau[(k, r)];
        }
    }
    let lhs_heat = heat / th0.value / (two_pi_i::<T>() * lit::<T>(2.0));
    let half_dlog_det = data.periods.dlog_det_jacobi(i) * lit::<T>(0.5);
    Ok(DerivativeIdentity {
        i,
        lhs,
        lhs_heat,
        half_dlog_det,
        rhs_stated: half_dlog_det + pair_sum(spec, beta, i, Exponents::Stated),
        rhs_centered: half_dlog_det + pair_sum(spec, beta, i, Exponents::Centered),
    })
}

/// `α_t = θ[a,b](0, τ(λ_t)) / rhs(λ_t)` along a deformation.
#[derive(Debug, Clone)]
pub struct Constancy<T: Real> {
    pub alpha: Vec<Complex<T>>,
    pub kind: Exponents,
}

impl<T: Real> Constancy<T> {
    pub fn drift(&self) -> T {
        let a0 = self.alpha[0];
        self.alpha.iter().fold(T::zero(), |m, a| m.max((*a / a0 - T::one()).norm()))
    }
}

/// Runs the deformation once and returns α for both exponent tables.
pub fn verify_constancy<T: Real>(data: &CurveData<T>, beta: &[u32], path: &[Vec<Complex<T>>]) -> Result<[Constancy<T>; 2]> {
    let spec0 = &data.spec;
    let m = spec0.m();
    let ch = data.characteristics(beta)?;
    let kinds = [Exponents::Stated, Exponents::Centered];
    let tables = kinds.map(|k| exponent_matrix(spec0, beta, k));
    let mut basis = data.basis.clone();
    let mut args: Vec<Vec<T>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { T::zero() } else { (spec0.lambda[i] - spec0.lambda[j]).arg() }).collect())
        .collect();
    let mut sqrt_det: Option<Complex<T>> = None;
    let mut out = kinds.map(|kind| Constancy { alpha: Vec::new(), kind });
    let start = std::iter::once(spec0.lambda.clone());
    for lam in start.chain(path.iter().cloned()) {
        let spec = spec0.with_lambda(lam);
        check_distinct(&spec)?;
        basis = basis.transported(&spec)?;
        let pd = compute_periods(&spec, &basis, &data.quad)?;
        let mut sd = pd.det_c.sqrt();
        if let Some(prev) = sqrt_det {
            if (sd - prev).norm() > (sd + prev).norm() {
                sd = -sd;
            }
        }
        sqrt_det = Some(sd);
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    let new = arg_near(spec.lambda[i] - spec.lambda[j], args[i][j]);
                    if (new - args[i][j]).abs() > lit(1.0) {
                        return Err(Error::Verification("deformation step too large".into()));
                    }
                    args[i][j] = new;
                }
            }
        }
        let th = data.theta_at(&ch, &pd.tau, Derivatives::None)?.value;
        for (c, (kind, table)) in out.iter_mut().zip(kinds.iter().zip(&tables)) {
            let mut log = czero::<T>();
            for (i, j) in pairs(m, *kind) {
                let l = Complex::new((spec.lambda[i] - spec.lambda[j]).norm().ln(), args[i][j]);
                log += l * rat::<T>(table[i][j]);
            }
            c.alpha.push(th / (sd * log.exp()));
        }
    }
    Ok(out)
}

/// Straight-line deformation of `λ_i` to `target` in `steps` steps.
pub fn linear_deformation<T: Real>(spec: &CurveSpec<T>, i: usize, target: Complex<T>, steps: usize) -> Vec<Vec<Complex<T>>> {
    (1..=steps)
        .map(|s| {
            let t = lit::<T>(s as f64 / steps as f64);
            let mut lam = spec.lambda.clone();
            lam[i] = spec.lambda[i] + (target - spec.lambda[i]) * t;
            lam
        })
        .collect()
}

/// Order-1 vectors (`τ_k ∈ {0, 1}`, one entry equal to 1), lexicographic.
pub fn order_one_vectors<T: Real>(spec: &CurveSpec<T>) -> Result<Vec<Vec<u32>>> {
    Ok(enumerate_congruent(spec)?.into_iter().filter(|b| b.order == 1).map(|b| b.beta).collect())
}

/// Per-β summary.
#[derive(Debug, Clone)]
pub struct ThomaeReport<T: Real> {
    pub n: u32,
    pub r: Vec<u32>,
    pub lambda: Vec<Complex<T>>,
    pub beta: Vec<u32>,
    pub char_a: Vec<Rational>,
    pub char_b: Vec<Rational>,
    pub theta: Complex<T>,
    pub det_c: Complex<T>,
    pub exponents: Vec<Vec<Rational>>,
    pub exponents_centered: Vec<Vec<Rational>>,
    pub nonvanishing: NonVanishing<T>,
    pub gradient_ratio: T,
    pub derivative: Vec<DerivativeIdentity<T>>,
    pub constancy: Option<[Constancy<T>; 2]>,
}

/// Options for [`thomae_report`].
#[derive(Debug, Clone)]
pub struct ReportOptions<T: Real> {
    pub random_count: usize,
    pub seed: u64,
    pub rel_step: T,
    pub deformation: Option<Vec<Vec<Complex<T>>>>,
}

impl<T: Real> Default for ReportOptions<T> {
    fn default() -> Self {
        Self { random_count: 20, seed: 7, rel_step: lit(1e-5), deformation: None }
    }
}

pub fn thomae_report<T: Real>(data: &CurveData<T>, beta: &[u32], opts: &ReportOptions<T>) -> Result<ThomaeReport<T>> {
    let spec = &data.spec;
    let ch = data.characteristics(beta)?;
    let theta = data.theta_at(&ch, &data.periods.tau, Derivatives::None)?.value;
    let derivative = (0..spec.m())
        .map(|i| verify_derivative_identity(data, beta, i, opts.rel_step))
        .collect::<Result<Vec<_>>>()?;
    let constancy = match &opts.deformation {
        Some(path) => Some(verify_constancy(data, beta, path)?),
        None => None,
    };
    Ok(ThomaeReport {
        n: spec.n,
        r: spec.r.clone(),
        lambda: spec.lambda.clone(),
        beta: beta.to_vec(),
        char_a: ch.0.clone(),
        char_b: ch.1.clone(),
        theta,
        det_c: data.periods.det_c,
        exponents: exponent_matrix(spec, beta, Exponents::Stated),
        exponents_centered: exponent_matrix(spec, beta, Exponents::Centered),
        nonvanishing: verify_nonvanishing(data, beta, opts.random_count, opts.seed)?,
        gradient_ratio: gradient_ratio(data, &ch)?,
        derivative,
        constancy,
    })
}
