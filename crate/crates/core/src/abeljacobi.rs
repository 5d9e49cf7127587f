//! Abel map from `z₀ = (base_x, sheet 0)`, the Riemann constant and the
//! 2N-torsion points `e_β` with their rational characteristics.
//!
//! Paths are straight segments (with one waypoint when a segment passes too
//! close to a branch point). A path that lands on the wrong sheet is corrected
//! with the deck transformation `T`, which fixes every branch place and acts
//! on `x^{j-1}dx/s_l` by `ω^{-l}`.

use num_complex::Complex;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, CMat};
use crate::periods::{half_edge, is_clear, ray, segment, PeriodData, QuadSettings};
use crate::scalar::{czero, lit, root_of_unity, Rational, Real};
use crate::surface::Place;
use crate::theta::{gaussian_weight, theta, Derivatives};

/// A point of `C^g`, optionally with characteristics `z = τa + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianPoint<T: Real> {
    pub z: Vec<Complex<T>>,
    pub char_a: Option<Vec<Rational>>,
    pub char_b: Option<Vec<Rational>>,
}

impl<T: Real> JacobianPoint<T> {
    pub fn new(z: Vec<Complex<T>>) -> Self {
        Self { z, char_a: None, char_b: None }
    }
}

/// Lattice coordinates `(a, b)` with `z = τa + b`.
pub fn lattice_coords<T: Real>(z: &[Complex<T>], tau: &CMat<T>) -> Result<(Vec<T>, Vec<T>)> {
    let g = z.len();
    let yinv = spd_inverse(&tau.im())?;
    let a: Vec<T> = (0..g).map(|i| (0..g).fold(T::zero(), |s, j| s + yinv[i][j] * z[j].im)).collect();
    let b: Vec<T> = (0..g).map(|i| z[i].re - (0..g).fold(T::zero(), |s, j| s + tau[(i, j)].re * a[j])).collect();
    Ok((a, b))
}

/// Representative with lattice coordinates in `[-1/2, 1/2)`.
pub fn reduce_to_cell<T: Real>(z: &[Complex<T>], tau: &CMat<T>) -> Result<Vec<Complex<T>>> {
    let (a, b) = lattice_coords(z, tau)?;
    let half = lit::<T>(0.5);
    let a: Vec<T> = a.iter().map(|v| *v - (*v + half).floor()).collect();
    let b: Vec<T> = b.iter().map(|v| *v - (*v + half).floor()).collect();
    Ok(from_coords(&a, &b, tau))
}

pub fn from_coords<T: Real>(a: &[T], b: &[T], tau: &CMat<T>) -> Vec<Complex<T>> {
    let g = a.len();
    (0..g)
        .map(|i| (0..g).fold(Complex::from(b[i]), |s, j| s + tau[(i, j)] * a[j]))
        .collect()
}

/// Distance from `z` to the lattice `Z^g + τZ^g`, in lattice coordinates.
pub fn lattice_distance<T: Real>(z: &[Complex<T>], tau: &CMat<T>) -> Result<T> {
    let (a, b) = lattice_coords(z, tau)?;
    Ok(a.iter().chain(&b).fold(T::zero(), |m, v| m.max((*v - v.round()).abs())))
}

/// Abel map evaluator for a fixed curve, basis and period data.
pub struct AbelMap<'a, T: Real> {
    pub spec: &'a CurveSpec<T>,
    pub periods: &'a PeriodData<T>,
    pub quad: QuadSettings<T>,
    margin: T,
    branch0: Vec<Complex<T>>,
}

impl<'a, T: Real> AbelMap<'a, T> {
    pub fn new(spec: &'a CurveSpec<T>, periods: &'a PeriodData<T>, quad: QuadSettings<T>) -> Result<Self> {
        let mut me = Self { spec, periods, quad, margin: spec.min_separation() * lit(0.2), branch0: Vec::new() };
        me.branch0 = me.raw_branch(0, None)?;
        Ok(me)
    }

    fn principal_args(&self, x: Complex<T>) -> Vec<T> {
        self.spec.lambda.iter().map(|l| (x - l).arg()).collect()
    }

    fn nmax(&self, l: u32) -> usize {
        self.periods.columns.iter().filter(|c| c.0 == l).count()
    }

    /// Polyline from `from` to `to`, avoiding branch points other than `except`.
    pub fn route(&self, from: Complex<T>, to: Complex<T>, except: Option<usize>) -> Result<Vec<Complex<T>>> {
        if is_clear(self.spec, from, to, except, self.margin) {
            return Ok(vec![from, to]);
        }
        let d = to - from;
        let normal = Complex::new(-d.im, d.re);
        let mid = (from + to) * lit::<T>(0.5);
        for k in [0.5, -0.5, 1.0, -1.0, 1.5, -1.5, 2.0, -2.0, 3.0, -3.0] {
            let w = mid + normal * lit::<T>(k);
            if is_clear(self.spec, from, w, None, self.margin) && is_clear(self.spec, w, to, except, self.margin) {
                return Ok(vec![from, w, to]);
            }
        }
        Err(Error::Continuation("no clear path between points".into()))
    }

    /// Integrals of `w_c` along regular segments; returns per-column values and the final arguments.
    fn along(&self, pts: &[Complex<T>]) -> Result<(Vec<Complex<T>>, Vec<Vec<T>>)> {
        let cols = &self.periods.columns;
        let mut out = vec![czero::<T>(); cols.len()];
        let mut end_args = vec![self.principal_args(pts[0]); self.spec.n as usize];
        for l in 1..self.spec.n {
            let nmax = self.nmax(l);
            if nmax == 0 {
                continue;
            }
            let mut args = self.principal_args(pts[0]);
            let mut acc = vec![czero::<T>(); nmax];
            for w in pts.windows(2) {
                if w[0] == w[1] {
                    continue;
                }
                let (mom, a) = segment(self.spec, w[0], &args, w[1], l, nmax, &self.quad)?;
                for k in 0..nmax {
                    acc[k] += mom[k];
                }
                args = a;
            }
            for (c, &(cl, j)) in cols.iter().enumerate() {
                if cl == l {
                    out[c] = acc[j as usize - 1];
                }
            }
            end_args[l as usize] = args;
        }
        Ok((out, end_args))
    }

    /// Sheet reached when arguments `args` are continued from the principal ones at `base_x`.
    fn sheet_of(&self, x: Complex<T>, args: &[T]) -> u32 {
        let mut k = 0i64;
        for (j, l) in self.spec.lambda.iter().enumerate() {
            let w = ((args[j] - (x - l).arg()) / T::TAU()).round().to_i64().unwrap();
            k += w * self.spec.r[j] as i64;
        }
        k.rem_euclid(self.spec.n as i64) as u32
    }

    fn raw_branch(&self, i: usize, via: Option<Complex<T>>) -> Result<Vec<Complex<T>>> {
        let base = self.spec.base_x;
        let target = self.spec.lambda[i];
        let pts = match via {
            Some(w) => vec![base, w, target],
            None => self.route(base, target, Some(i))?,
        };
        let last = pts[pts.len() - 2];
        let (mut out, args) = self.along(&pts[..pts.len() - 1])?;
        let cols = &self.periods.columns;
        for l in 1..self.spec.n {
            let nmax = self.nmax(l);
            if nmax == 0 {
                continue;
            }
            let (mom, _) = half_edge(self.spec, i, last, &args[l as usize], l, nmax, None, &self.quad)?;
            for (c, &(cl, j)) in cols.iter().enumerate() {
                if cl == l {
                    out[c] -= mom[j as usize - 1];
                }
            }
        }
        Ok(out)
    }

    /// Apply `T^k` to the end point of a path from `z₀`.
    fn deck_correct(&self, raw: Vec<Complex<T>>, k: i64) -> Vec<Complex<T>> {
        self.periods
            .columns
            .iter()
            .zip(raw)
            .zip(&self.branch0)
            .map(|((&(l, _), v), b0)| {
                let w = root_of_unity::<T>(self.spec.n, -(l as i64) * k);
                *b0 * (Complex::from(T::one()) - w) + w * v
            })
            .collect()
    }

    fn raw_regular(&self, x: Complex<T>, sheet: u32, via: Option<Complex<T>>) -> Result<Vec<Complex<T>>> {
        let base = self.spec.base_x;
        let pts = match via {
            Some(w) => vec![base, w, x],
            None => self.route(base, x, None)?,
        };
        let (raw, args) = self.along(&pts)?;
        let s0 = self.sheet_of(x, &args[1]);
        Ok(self.deck_correct(raw, sheet as i64 - s0 as i64))
    }

    fn raw_infinity(&self, sheet: u32, via: Option<Complex<T>>) -> Result<Vec<Complex<T>>> {
        let spec = self.spec;
        let big = spec.lambda.iter().fold(spec.base_x.norm(), |m, l| m.max(l.norm())) * lit(2.0) + T::one();
        let xc = Complex::from(big);
        let pts = match via {
            Some(w) => vec![spec.base_x, w, xc],
            None => self.route(spec.base_x, xc, None)?,
        };
        let (mut out, args) = self.along(&pts)?;
        for l in 1..spec.n {
            let nmax = self.nmax(l);
            if nmax == 0 {
                continue;
            }
            let (mom, _) = ray(spec, big, &args[l as usize], l, nmax, &self.quad)?;
            for (c, &(cl, j)) in self.periods.columns.iter().enumerate() {
                if cl == l {
                    out[c] += mom[j as usize - 1];
                }
            }
        }
        // all l share the same continued arguments
        let s0 = self.sheet_of(xc, &args[1]);
        Ok(self.deck_correct(out, sheet as i64 - s0 as i64))
    }

    /// Column integrals `∫_{z₀}^{place} w_c`.
    pub fn raw(&self, place: &Place<T>, via: Option<Complex<T>>) -> Result<Vec<Complex<T>>> {
        match *place {
            Place::Branch(i) => {
                if i >= self.spec.m() {
                    return Err(Error::NotRegular(format!("no branch point {i}")));
                }
                if i == 0 && via.is_none() {
                    Ok(self.branch0.clone())
                } else {
                    self.raw_branch(i, via)
                }
            }
            Place::Regular { x, sheet } => {
                crate::surface::principal_logs(self.spec, x)?;
                self.raw_regular(x, sheet % self.spec.n, via)
            }
            Place::Infinity(s) => self.raw_infinity(s % self.spec.n, via),
        }
    }

    /// `u(place)` with the normalized differentials.
    pub fn map(&self, place: &Place<T>) -> Result<Vec<Complex<T>>> {
        let raw = self.raw(place, None)?;
        Ok(self.normalize(&raw))
    }

    /// `u(place)` along a path through a chosen waypoint.
    pub fn map_via(&self, place: &Place<T>, via: Complex<T>) -> Result<Vec<Complex<T>>> {
        let raw = self.raw(place, Some(via))?;
        Ok(self.normalize(&raw))
    }

    fn normalize(&self, raw: &[Complex<T>]) -> Vec<Complex<T>> {
        self.periods.normalizer().mat_vec(raw)
    }

    /// `Σ_s u(∞_s)`.
    pub fn infinity_fiber(&self) -> Result<Vec<Complex<T>>> {
        let g = self.periods.genus();
        let mut s = vec![czero::<T>(); g];
        for k in 0..self.spec.n {
            add(&mut s, &self.map(&Place::Infinity(k))?, T::one());
        }
        Ok(s)
    }

    /// `u(P_i)` for all `i`.
    pub fn branch_images(&self) -> Result<Vec<Vec<Complex<T>>>> {
        (0..self.spec.m()).map(|i| self.map(&Place::Branch(i))).collect()
    }

    /// Random regular place with `x` in a box around the branch points.
    pub fn random_place(&self, rng: &mut ChaCha8Rng) -> Place<T> {
        let spec = self.spec;
        let (mut lo, mut hi) = (spec.lambda[0], spec.lambda[0]);
        for l in &spec.lambda {
            lo = Complex::new(lo.re.min(l.re), lo.im.min(l.im));
            hi = Complex::new(hi.re.max(l.re), hi.im.max(l.im));
        }
        let pad = spec.scale() * lit(0.25) + T::one();
        loop {
            let x = Complex::new(
                lo.re - pad + (hi.re - lo.re + pad + pad) * lit(rng.random::<f64>()),
                lo.im - pad + (hi.im - lo.im + pad + pad) * lit(rng.random::<f64>()),
            );
            if spec.lambda.iter().all(|l| (x - l).norm() > self.margin) {
                return Place::Regular { x, sheet: rng.random_range(0..spec.n) };
            }
        }
    }
}

fn add<T: Real>(acc: &mut [Complex<T>], v: &[Complex<T>], c: T) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += *b * c;
    }
}

/// Result of the half-period search.
#[derive(Debug, Clone)]
pub struct RiemannConstant<T: Real> {
    pub k: JacobianPoint<T>,
    /// Half-period `(ε', ε)`: `K = K₀ + (τε' + ε)/2`.
    pub half_period: (Vec<u8>, Vec<u8>),
    pub best: T,
    pub second: T,
}

/// `max |θ(u(D)+K)| e^{-π yᵀY⁻¹y}` over divisors given by their Abel images.
fn divisor_residual<T: Real>(k: &[Complex<T>], images: &[Vec<Complex<T>>], tau: &CMat<T>, tol: T) -> Result<T> {
    let mut worst = T::zero();
    for ud in images {
        let z: Vec<Complex<T>> = ud.iter().zip(k).map(|(a, b)| *a + *b).collect();
        let z = reduce_to_cell(&z, tau)?;
        let v = theta(&z, tau, tol, Derivatives::None)?.value.norm() * gaussian_weight(&z, tau)?;
        worst = worst.max(v);
    }
    Ok(worst)
}

/// Abel images of `count` random effective divisors of degree `g - 1`.
pub fn random_divisor_images<T: Real>(abel: &AbelMap<T>, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<Complex<T>>>> {
    let g = abel.periods.genus();
    (0..count)
        .map(|_| {
            let mut s = vec![czero::<T>(); g];
            for _ in 0..g.saturating_sub(1) {
                let p = abel.random_place(rng);
                add(&mut s, &abel.map(&p)?, T::one());
            }
            Ok(s)
        })
        .collect()
}

/// `K = -u(div dx)/2 + h` with `div dx = (N-1)ΣP_i - 2Σ∞_s`, the half-period
/// `h` chosen so that `θ(u(D) + K)` vanishes for random effective `D` of degree `g-1`.
pub fn riemann_constant<T: Real>(abel: &AbelMap<T>, seed: u64, theta_tol: T) -> Result<RiemannConstant<T>> {
    let spec = abel.spec;
    let tau = &abel.periods.tau;
    let g = abel.periods.genus();
    if g > 6 {
        return Err(Error::SearchTooLarge(format!("half-period search over 2^{} candidates", 2 * g)));
    }
    let mut k0 = vec![czero::<T>(); g];
    for ui in abel.branch_images()? {
        add(&mut k0, &ui, -lit::<T>((spec.n - 1) as f64) * lit(0.5));
    }
    add(&mut k0, &abel.infinity_fiber()?, T::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let images = random_divisor_images(abel, 8, &mut rng)?;
    let mut scored: Vec<(T, u64)> = Vec::new();
    for mask in 0..(1u64 << (2 * g)) {
        let (ea, eb) = split_mask(mask, g);
        let h = half_period(&ea, &eb, tau);
        let k: Vec<Complex<T>> = k0.iter().zip(&h).map(|(a, b)| *a + *b).collect();
        scored.push((divisor_residual(&k, &images, tau, theta_tol)?, mask));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let (best, mask) = scored[0];
    let second = scored.get(1).map_or(T::infinity(), |s| s.0);
    if best > lit(1e-6) || second < best * lit(10.0) {
        return Err(Error::RiemannConstant(format!("no unique half-period (best {best}, second {second})")));
    }
    let (ea, eb) = split_mask(mask, g);
    let h = half_period(&ea, &eb, tau);
    let k: Vec<Complex<T>> = k0.iter().zip(&h).map(|(a, b)| *a + *b).collect();
    Ok(RiemannConstant { k: JacobianPoint::new(reduce_to_cell(&k, tau)?), half_period: (ea, eb), best, second })
}

fn split_mask(mask: u64, g: usize) -> (Vec<u8>, Vec<u8>) {
    let ea = (0..g).map(|i| ((mask >> i) & 1) as u8).collect();
    let eb = (0..g).map(|i| ((mask >> (g + i)) & 1) as u8).collect();
    (ea, eb)
}

fn half_period<T: Real>(ea: &[u8], eb: &[u8], tau: &CMat<T>) -> Vec<Complex<T>> {
    let a: Vec<T> = ea.iter().map(|v| lit::<T>(*v as f64 * 0.5)).collect();
    let b: Vec<T> = eb.iter().map(|v| lit::<T>(*v as f64 * 0.5)).collect();
    from_coords(&a, &b, tau)
}

/// Largest Gaussian-normalized `|θ|` over `count` uniformly random points of the cell.
pub fn theta_scale<T: Real>(tau: &CMat<T>, count: usize, seed: u64, theta_tol: T) -> Result<T> {
    let g = tau.rows;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scale = T::zero();
    for _ in 0..count {
        let a: Vec<T> = (0..g).map(|_| lit(rng.random_range(-0.5..0.5))).collect();
        let b: Vec<T> = (0..g).map(|_| lit(rng.random_range(-0.5..0.5))).collect();
        let w = from_coords(&a, &b, tau);
        scale = scale.max(theta(&w, tau, theta_tol, Derivatives::None)?.value.norm() * gaussian_weight(&w, tau)?);
    }
    Ok(scale)
}

/// Residual check of `θ(u(D)+K)` on fresh random divisors.
pub fn riemann_constant_residual<T: Real>(abel: &AbelMap<T>, k: &[Complex<T>], count: usize, seed: u64, theta_tol: T) -> Result<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let images = random_divisor_images(abel, count, &mut rng)?;
    divisor_residual(k, &images, &abel.periods.tau, theta_tol)
}

/// Round lattice coordinates to multiples of `1/den`.
pub fn characteristics<T: Real>(z: &[Complex<T>], tau: &CMat<T>, den: i64) -> Result<(Vec<Rational>, Vec<Rational>, T)> {
    let (a, b) = lattice_coords(z, tau)?;
    let d = lit::<T>(den as f64);
    let round = |v: &T| Ratio::new((*v * d).round().to_i64().unwrap(), den);
    let ra: Vec<Rational> = a.iter().map(round).collect();
    let rb: Vec<Rational> = b.iter().map(round).collect();
    let fa: Vec<T> = ra.iter().map(|q| crate::scalar::rat(*q)).collect();
    let fb: Vec<T> = rb.iter().map(|q| crate::scalar::rat(*q)).collect();
    let back = from_coords(&fa, &fb, tau);
    let res = back.iter().zip(z).fold(T::zero(), |m, (p, q)| m.max((*p - *q).norm()));
    Ok((ra, rb, res))
}

/// Abel data shared by every `e_β` of one curve.
#[derive(Debug, Clone)]
pub struct DivisorData<T: Real> {
    pub branch: Vec<Vec<Complex<T>>>,
    pub infinity_fiber: Vec<Complex<T>>,
    pub k: Vec<Complex<T>>,
}

impl<T: Real> DivisorData<T> {
    pub fn new(abel: &AbelMap<T>, k: &RiemannConstant<T>) -> Result<Self> {
        Ok(Self { branch: abel.branch_images()?, infinity_fiber: abel.infinity_fiber()?, k: k.k.z.clone() })
    }

    /// `e_β = Σ β_i u(P_i) + K + (τ_0 - 1) Σ_s u(∞_s)`, with characteristics of
    /// denominator `2N`. For admissible β, `τ_0 = 0` and the fiber enters with
    /// coefficient `-1`; in general the divisor keeps degree `g - 1`.
    pub fn divisor_point(&self, spec: &CurveSpec<T>, tau: &CMat<T>, beta: &[u32]) -> Result<JacobianPoint<T>> {
        let profile = crate::divisors::tau_profile(spec, beta)?;
        let mut e = self.k.clone();
        for (b, ui) in beta.iter().zip(&self.branch) {
            add(&mut e, ui, lit(*b as f64));
        }
        add(&mut e, &self.infinity_fiber, lit((profile.tau[0] - 1) as f64));
        let z = reduce_to_cell(&e, tau)?;
        let (ca, cb, res) = characteristics(&z, tau, 2 * spec.n as i64)?;
        if res > lit(1e-6) {
            return Err(Error::Characteristic(format!("e_beta is not 2N-torsion (residual {res})")));
        }
        Ok(JacobianPoint { z, char_a: Some(ca), char_b: Some(cb) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::build_basis;
    use crate::periods::compute_periods;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn t2() -> CurveSpec<f64> {
        CurveSpec::new(3, vec![1, 1, 2, 2], vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)], c(0.5, -1.0))
    }

    #[test]
    fn base_point_maps_to_zero_and_paths_agree() {
        let spec = t2();
        let basis = build_basis(&spec).unwrap();
        let pd = compute_periods(&spec, &basis, &QuadSettings::default()).unwrap();
        let abel = AbelMap::new(&spec, &pd, QuadSettings::default()).unwrap();
        let u0 = abel.map(&Place::Regular { x: spec.base_x, sheet: 0 }).unwrap();
        assert!(u0.iter().all(|v| v.norm() < 1e-14));
        for place in [
            Place::Branch(2),
            Place::Regular { x: c(1.5, 0.7), sheet: 1 },
            Place::Regular { x: c(-0.6, 0.4), sheet: 2 },
            Place::Infinity(1),
        ] {
            let a = abel.map(&place).unwrap();
            let b = abel.map_via(&place, c(-1.5, -2.0)).unwrap();
            let d: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            assert!(lattice_distance(&d, &pd.tau).unwrap() < 1e-8, "{place:?}");
        }
    }

    #[test]
    fn fibers_are_linearly_equivalent() {
        let spec = t2();
        let basis = build_basis(&spec).unwrap();
        let pd = compute_periods(&spec, &basis, &QuadSettings::default()).unwrap();
        let abel = AbelMap::new(&spec, &pd, QuadSettings::default()).unwrap();
        let inf = abel.infinity_fiber().unwrap();
        let x = c(1.2, -0.4);
        let mut fib = vec![czero::<f64>(); 2];
        for s in 0..3 {
            add(&mut fib, &abel.map(&Place::Regular { x, sheet: s }).unwrap(), 1.0);
        }
        let p = abel.map(&Place::Branch(1)).unwrap();
        let d1: Vec<Complex64> = fib.iter().zip(&inf).map(|(a, b)| a - b).collect();
        let d2: Vec<Complex64> = inf.iter().zip(&p).map(|(a, b)| a - b * 3.0).collect();
        assert!(lattice_distance(&d1, &pd.tau).unwrap() < 1e-8);
        assert!(lattice_distance(&d2, &pd.tau).unwrap() < 1e-8);
    }

    fn t1() -> CurveSpec<f64> {
        CurveSpec::new(2, vec![1; 4], vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)], c(0.5, -1.0))
    }

    #[test]
    fn riemann_constant_and_characteristics() {
        for spec in [t1(), t2()] {
            let basis = build_basis(&spec).unwrap();
            let pd = compute_periods(&spec, &basis, &QuadSettings::default()).unwrap();
            let abel = AbelMap::new(&spec, &pd, QuadSettings::default()).unwrap();
            let k = riemann_constant(&abel, 7, 1e-12).unwrap();
            eprintln!("K best {} second {} h {:?}", k.best, k.second, k.half_period);
            assert!(k.second > 10.0 * k.best);
            let res = riemann_constant_residual(&abel, &k.k.z, 20, 99, 1e-12).unwrap();
            assert!(res < 1e-6, "{res}");
            let dd = DivisorData::new(&abel, &k).unwrap();
            for bv in crate::divisors::enumerate_admissible(&spec).unwrap() {
                let e = dd.divisor_point(&spec, &pd.tau, &bv.beta).unwrap();
                let neg = dd.divisor_point(&spec, &pd.tau, &crate::divisors::negate(&spec, &bv.beta)).unwrap();
                let sum: Vec<Complex64> = e.z.iter().zip(&neg.z).map(|(a, b)| a + b).collect();
                assert!(lattice_distance(&sum, &pd.tau).unwrap() < 1e-6);
                eprintln!("{:?} a={:?} b={:?}", bv.beta, e.char_a.unwrap(), e.char_b.unwrap());
            }
        }
    }
}
