//! The N-sheeted surface over the x-line.
//!
//! Sheet `s` over a regular `x` is the branch `y = ω^s exp((1/N) Σ R_i Log(x - λ_i))`
//! with `Log` principal. The functions `s_l(x) = ∏ (x - λ_i)^{reduce(l R_i)/N}` are
//! evaluated with the same logarithms, so `s_l = y^l ∏ (x - λ_i)^{-⌊l R_i / N⌋}`
//! holds on every sheet.

use num_complex::Complex;

use crate::curve::{reduce, CurveSpec};
use crate::error::{Error, Result};
use crate::scalar::{arg_near, cone, czero, ln_near, lit, rat, root_of_unity, Real};

/// A point of the compact surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Place<T: Real> {
    Regular { x: Complex<T>, sheet: u32 },
    /// The unique point over `λ_i`.
    Branch(usize),
    /// Limit of sheet `s` along the positive real direction.
    Infinity(u32),
}

/// Polyline in the x-plane lifted to the surface from `start_sheet`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePath<T: Real> {
    pub segments: Vec<Complex<T>>,
    pub start_sheet: u32,
    pub samples_per_segment: usize,
}

/// A regular point together with the values `s_l` for `l = 0..N-1` on its branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoint<T: Real> {
    pub z: Complex<T>,
    pub s: Vec<Complex<T>>,
}

/// Default path clearance: `1e-2 · min |λ_i - λ_j|`.
pub fn clearance<T: Real>(spec: &CurveSpec<T>) -> T {
    spec.min_separation() * lit(1e-2)
}

fn check_regular<T: Real>(spec: &CurveSpec<T>, x: Complex<T>) -> Result<()> {
    for (i, l) in spec.lambda.iter().enumerate() {
        if (x - l).norm() <= T::epsilon() * (T::one() + l.norm()) {
            return Err(Error::NotRegular(format!("x coincides with lambda[{i}]")));
        }
    }
    Ok(())
}

/// Principal logarithms `Log(x - λ_i)`.
pub fn principal_logs<T: Real>(spec: &CurveSpec<T>, x: Complex<T>) -> Result<Vec<Complex<T>>> {
    check_regular(spec, x)?;
    Ok(spec.lambda.iter().map(|l| (x - l).ln()).collect())
}

/// `exp(Σ_i reduce(l R_i)/N · L_i)` for given logarithms `L_i`.
pub fn s_from_logs<T: Real>(spec: &CurveSpec<T>, l: u32, logs: &[Complex<T>]) -> Complex<T> {
    let mut e = czero();
    for (i, li) in logs.iter().enumerate() {
        e += *li * rat::<T>(spec.s_exponent(l, i));
    }
    e.exp()
}

pub fn y_value<T: Real>(spec: &CurveSpec<T>, x: Complex<T>, sheet: u32) -> Result<Complex<T>> {
    let logs = principal_logs(spec, x)?;
    let n = lit::<T>(spec.n as f64);
    let mut e = czero();
    for (li, ri) in logs.iter().zip(&spec.r) {
        e += *li * (lit::<T>(*ri as f64) / n);
    }
    Ok(root_of_unity::<T>(spec.n, sheet as i64) * e.exp())
}

/// `s_l(x)` on the given sheet: `ω^{l·sheet} exp(Σ reduce(l R_i)/N Log(x - λ_i))`.
pub fn s_value<T: Real>(spec: &CurveSpec<T>, l: u32, x: Complex<T>, sheet: u32) -> Result<Complex<T>> {
    let logs = principal_logs(spec, x)?;
    Ok(root_of_unity::<T>(spec.n, l as i64 * sheet as i64) * s_from_logs(spec, l, &logs))
}

impl<T: Real> SurfacePoint<T> {
    pub fn regular(spec: &CurveSpec<T>, x: Complex<T>, sheet: u32) -> Result<Self> {
        let logs = principal_logs(spec, x)?;
        let s = (0..spec.n)
            .map(|l| root_of_unity::<T>(spec.n, l as i64 * sheet as i64) * s_from_logs(spec, l, &logs))
            .collect();
        Ok(Self { z: x, s })
    }
}

/// Coefficient of `dx` of `x^{j-1} dx / s_l` at a regular place (`j` is 1-based).
pub fn eval_differential<T: Real>(spec: &CurveSpec<T>, l: u32, j: u32, place: &Place<T>) -> Result<Complex<T>> {
    match *place {
        Place::Regular { x, sheet } => Ok(x.powi(j as i32 - 1) / s_value(spec, l, x, sheet)?),
        Place::Branch(i) => Err(Error::NotRegular(format!("branch place {i}; use a local expansion"))),
        Place::Infinity(s) => Err(Error::NotRegular(format!("place at infinity on sheet {s}"))),
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (p - (a + d * t)).norm()
}

/// Sheet reached by continuing `y` along the path with nearest-root matching.
pub fn continue_sheet<T: Real>(spec: &CurveSpec<T>, path: &SurfacePath<T>) -> Result<u32> {
    if path.segments.is_empty() {
        return Err(Error::Continuation("empty path".into()));
    }
    let delta = clearance(spec);
    for w in path.segments.windows(2) {
        for (i, l) in spec.lambda.iter().enumerate() {
            if segment_distance(*l, w[0], w[1]) < delta {
                return Err(Error::Continuation(format!("path passes within clearance of lambda[{i}]")));
            }
        }
    }
    let mut y = y_value(spec, path.segments[0], path.start_sheet)?;
    let mut sheet = path.start_sheet;
    for w in path.segments.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        let mut steps = path.samples_per_segment.max(1);
        let min_steps = (len / (delta / lit(4.0))).ceil().to_usize().unwrap_or(1);
        steps = steps.max(min_steps);
        let mut ok = false;
        for _ in 0..20 {
            match track_segment(spec, a, b, y, steps) {
                Ok((ny, ns)) => {
                    y = ny;
                    sheet = ns;
                    ok = true;
                    break;
                }
                Err(_) => steps *= 2,
            }
        }
        if !ok {
            return Err(Error::Continuation("root matching stayed ambiguous after refinement".into()));
        }
    }
    Ok(sheet)
}

fn track_segment<T: Real>(
    spec: &CurveSpec<T>,
    a: Complex<T>,
    b: Complex<T>,
    mut y: Complex<T>,
    steps: usize,
) -> Result<(Complex<T>, u32)> {
    let mut sheet = 0;
    for k in 1..=steps {
        let x = a + (b - a) * lit::<T>(k as f64 / steps as f64);
        let y0 = y_value(spec, x, 0)?;
        let mut dists: Vec<(T, u32)> = (0..spec.n)
            .map(|s| ((y0 * root_of_unity::<T>(spec.n, s as i64) - y).norm(), s))
            .collect();
        dists.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        if dists.len() > 1 && dists[0].0 > dists[1].0 * lit(0.5) {
            return Err(Error::Continuation("ambiguous root step".into()));
        }
        sheet = dists[0].1;
        y = y0 * root_of_unity::<T>(spec.n, sheet as i64);
    }
    Ok((y, sheet))
}

/// Closed loop from `base` around `λ_i` counterclockwise.
pub fn branch_loop<T: Real>(spec: &CurveSpec<T>, base: Complex<T>, i: usize, sheet: u32) -> SurfacePath<T> {
    let p = spec.lambda[i];
    let r = spec.min_separation() * lit(0.25);
    let dir = (base - p) / (base - p).norm();
    let start = p + dir * r;
    let mut pts = vec![base, start];
    let k = 64;
    for s in 1..=k {
        let ang = T::TAU() * lit::<T>(s as f64 / k as f64);
        pts.push(p + dir * Complex::from_polar(r, ang));
    }
    pts.push(base);
    SurfacePath { segments: pts, start_sheet: sheet, samples_per_segment: 8 }
}

/// Local chart `t = (x - λ_i)^{1/N}` at a branch point.
///
/// In the chart, `s_l = t^{reduce(l R_i)} φ_l(x)` with `φ_l` built from the
/// principal logarithms `Log(λ_i - λ_j)` continued into the disk.
#[derive(Debug, Clone)]
pub struct BranchChart<T: Real> {
    pub i: usize,
    anchors: Vec<T>,
}

impl<T: Real> BranchChart<T> {
    pub fn new(spec: &CurveSpec<T>, i: usize) -> Self {
        let p = spec.lambda[i];
        let anchors = spec
            .lambda
            .iter()
            .map(|l| if *l == p { T::zero() } else { (p - l).arg() })
            .collect();
        Self { i, anchors }
    }

    /// Reference argument used for `log(x - λ_j)` inside the chart.
    pub fn anchor(&self, j: usize) -> T {
        self.anchors[j]
    }

    /// Radius inside which the chart is valid.
    pub fn radius(&self, spec: &CurveSpec<T>) -> T {
        let p = spec.lambda[self.i];
        let d = spec
            .lambda
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != self.i)
            .map(|(_, l)| (p - l).norm())
            .fold(T::infinity(), T::min);
        d.powf(T::one() / lit(spec.n as f64))
    }

    pub fn point(&self, spec: &CurveSpec<T>, t: Complex<T>) -> SurfacePoint<T> {
        let n = spec.n;
        let z = spec.lambda[self.i] + t.powi(n as i32);
        let logs: Vec<Complex<T>> = spec
            .lambda
            .iter()
            .enumerate()
            .map(|(j, l)| if j == self.i { czero() } else { ln_near(z - l, self.anchors[j]) })
            .collect();
        let s = (0..n)
            .map(|l| {
                let rho = reduce(l as i64 * spec.r[self.i] as i64, n as i64) as i32;
                t.powi(rho) * s_from_logs(spec, l, &logs)
            })
            .collect();
        SurfacePoint { z, s }
    }

    /// `dz/dt`.
    pub fn dz_dt(&self, spec: &CurveSpec<T>, t: Complex<T>) -> Complex<T> {
        t.powi(spec.n as i32 - 1) * lit::<T>(spec.n as f64)
    }
}

/// Power-series exponential: coefficients of `exp(f)` given those of `f` (with `f_0` arbitrary).
pub fn series_exp<T: Real>(f: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = f.len();
    let mut e = vec![czero(); n];
    if n == 0 {
        return e;
    }
    e[0] = f[0].exp();
    for k in 1..n {
        let mut s = czero();
        for j in 1..=k {
            s += f[j] * e[k - j] * lit::<T>(j as f64);
        }
        e[k] = s / lit::<T>(k as f64);
    }
    e
}

/// Series in `t` of `x^{j-1} dx / s_l` at the branch place over `λ_i`, as
/// coefficients `v^α` of `t^α dt` for `α = 0..n_terms-1` (`j` is 1-based).
pub fn local_expansion<T: Real>(spec: &CurveSpec<T>, l: u32, j: u32, i: usize, n_terms: usize) -> Vec<Complex<T>> {
    let n = spec.n as usize;
    let rho = reduce(l as i64 * spec.r[i] as i64, n as i64) as usize;
    let lead = n - 1 - rho;
    let ku = n_terms / n + 2;
    let p = spec.lambda[i];
    // log φ_l(λ_i + u) as a series in u
    let mut f = vec![czero::<T>(); ku];
    for (jj, lam) in spec.lambda.iter().enumerate() {
        if jj == i {
            continue;
        }
        let e = rat::<T>(spec.s_exponent(l, jj));
        let d = p - lam;
        f[0] += d.ln() * e;
        let mut pw = cone::<T>();
        for k in 1..ku {
            pw /= d;
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            f[k] += pw * (e * sign / lit(k as f64));
        }
    }
    let neg: Vec<Complex<T>> = f.iter().map(|c| -*c).collect();
    let inv_phi = series_exp(&neg);
    // (λ_i + u)^{j-1}
    let deg = j as usize - 1;
    let mut poly = vec![czero::<T>(); deg + 1];
    let mut binom = T::one();
    for k in 0..=deg {
        poly[k] = p.powi((deg - k) as i32) * binom;
        binom = binom * lit::<T>((deg - k) as f64) / lit::<T>((k + 1) as f64);
    }
    let mut u_series = vec![czero::<T>(); ku];
    for k in 0..ku {
        for (a, c) in poly.iter().enumerate() {
            if a <= k {
                u_series[k] += *c * inv_phi[k - a];
            }
        }
    }
    let mut out = vec![czero::<T>(); n_terms];
    let nn = lit::<T>(n as f64);
    for (k, c) in u_series.iter().enumerate() {
        let alpha = lead + n * k;
        if alpha < n_terms {
            out[alpha] = *c * nn;
        }
    }
    out
}

/// Anchored argument of `x - λ_j` for every `j`, continued from `reference`.
pub fn anchored_args<T: Real>(spec: &CurveSpec<T>, x: Complex<T>, reference: &[T]) -> Vec<T> {
    spec.lambda.iter().zip(reference).map(|(l, r)| arg_near(x - l, *r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn t1() -> CurveSpec<f64> {
        CurveSpec::new(
            2,
            vec![1, 1, 1, 1],
            [0.0, 1.0, 2.0, 4.0].iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Complex64::new(0.5, -1.0),
        )
    }

    fn t2() -> CurveSpec<f64> {
        CurveSpec::new(
            3,
            vec![1, 1, 2, 2],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(3.0, 0.0)],
            Complex64::new(0.5, -1.0),
        )
    }

    #[test]
    fn y_values() {
        let c = t1();
        let y = y_value(&c, Complex64::new(3.0, 0.0), 0).unwrap();
        assert!((y * y - Complex64::new(-6.0, 0.0)).norm() < 1e-12);
        let c = t2();
        let x = Complex64::new(0.3, -0.7);
        let y0 = y_value(&c, x, 0).unwrap();
        let y1 = y_value(&c, x, 1).unwrap();
        assert!((y1 - y0 * root_of_unity::<f64>(3, 1)).norm() < 1e-14);
        let prod: Complex64 = c.lambda.iter().zip(&c.r).map(|(l, r)| (x - l).powi(*r as i32)).product();
        assert!((y0.powi(3) / prod - 1.0).norm() < 1e-12);
        assert!(y_value(&c, c.lambda[1], 0).is_err());
    }

    #[test]
    fn s_is_consistent_with_y() {
        let c = t2();
        let x = Complex64::new(-0.4, 0.35);
        for sheet in 0..3 {
            let y = y_value(&c, x, sheet).unwrap();
            for l in 1..3u32 {
                let mut v = y.powi(l as i32);
                for (lam, r) in c.lambda.iter().zip(&c.r) {
                    v /= (x - lam).powi(((l * r) / 3) as i32);
                }
                assert!((s_value(&c, l, x, sheet).unwrap() - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn differential_sheet_character() {
        let c = t2();
        let x = Complex64::new(0.7, 0.2);
        for l in 1..3u32 {
            let a = eval_differential(&c, l, 1, &Place::Regular { x, sheet: 0 }).unwrap();
            let b = eval_differential(&c, l, 1, &Place::Regular { x, sheet: 1 }).unwrap();
            assert!((b - a * root_of_unity::<f64>(3, -(l as i64))).norm() < 1e-13);
        }
        assert!(eval_differential(&c, 1, 1, &Place::Branch(0)).is_err());
    }

    #[test]
    fn monodromy_loops() {
        for c in [t1(), t2()] {
            for i in 0..c.m() {
                for sheet in 0..c.n {
                    let path = branch_loop(&c, c.base_x, i, sheet);
                    let end = continue_sheet(&c, &path).unwrap();
                    assert_eq!(end, (sheet + c.r[i]) % c.n, "loop {i} sheet {sheet}");
                }
            }
        }
    }

    #[test]
    fn trivial_paths() {
        let c = t2();
        let p = SurfacePath { segments: vec![c.base_x], start_sheet: 2, samples_per_segment: 4 };
        assert_eq!(continue_sheet(&c, &p).unwrap(), 2);
        let x0 = Complex64::new(5.0, 5.0);
        let mut pts = vec![];
        for k in 0..=32 {
            pts.push(x0 + Complex64::from_polar(0.5, std::f64::consts::TAU * k as f64 / 32.0));
        }
        let p = SurfacePath { segments: pts, start_sheet: 1, samples_per_segment: 4 };
        assert_eq!(continue_sheet(&c, &p).unwrap(), 1);
    }

    #[test]
    fn local_expansion_matches_samples() {
        for c in [t1(), t2()] {
            let rd = c.validate().unwrap();
            for i in 0..c.m() {
                let chart = BranchChart::new(&c, i);
                for l in 1..c.n {
                    for j in 1..=rd.d(l) {
                        let coeffs = local_expansion(&c, l, j, i, 40);
                        let t = Complex64::from_polar(1e-3, 0.37);
                        let series: Complex64 =
                            coeffs.iter().enumerate().map(|(a, v)| v * t.powi(a as i32)).sum();
                        let pt = chart.point(&c, t);
                        let direct = pt.z.powi(j as i32 - 1) / pt.s[l as usize] * chart.dz_dt(&c, t);
                        assert!((series - direct).norm() < 1e-6 * direct.norm());
                        // the chart value is one of the sheet values (away from the
                        // cancellation in z - λ_i)
                        let t = Complex64::from_polar(0.05, 0.37);
                        let pt = chart.point(&c, t);
                        let direct = pt.z.powi(j as i32 - 1) / pt.s[l as usize] * chart.dz_dt(&c, t);
                        let best = (0..c.n)
                            .map(|s| {
                                let v = eval_differential(&c, l, j, &Place::Regular { x: pt.z, sheet: s }).unwrap()
                                    * chart.dz_dt(&c, t);
                                (v - direct).norm()
                            })
                            .fold(f64::INFINITY, f64::min);
                        assert!(best < 1e-9 * direct.norm());
                    }
                }
            }
        }
    }

    #[test]
    fn leading_order() {
        let c = t1();
        let v = local_expansion(&c, 1, 1, 2, 4);
        assert!(v[0].norm() > 0.1);
        let c = t2();
        // R = 1, l = 1: t^{N-1-1} = t^1
        let v = local_expansion(&c, 1, 1, 0, 4);
        assert!(v[0].norm() < 1e-15 && v[1].norm() > 0.1);
    }
}
