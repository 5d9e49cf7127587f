//! Scalar abstraction shared by the analytic modules.
//!
//! Everything numeric in this crate is written against [`Real`] so the same
//! code runs in `f32` (quick looks) and `f64` (all verification work). The
//! combinatorial side never touches floating point; it uses [`Rational`].

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Exact rational used for exponent tables.
pub type Rational = num_rational::Ratio<i64>;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Convert an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable")
}

/// Convert a rational into `T`.
#[inline]
pub fn rat<T: Real>(q: Rational) -> T {
    lit::<T>(*q.numer() as f64) / lit::<T>(*q.denom() as f64)
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `2πi`.
#[inline]
pub fn two_pi_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU())
}

/// Primitive N-th root of unity raised to `k`: `exp(2πik/N)`.
pub fn root_of_unity<T: Real>(n: u32, k: i64) -> Complex<T> {
    let k = k.rem_euclid(n as i64);
    let angle = T::TAU() * lit::<T>(k as f64) / lit::<T>(n as f64);
    Complex::from_polar(T::one(), angle)
}

/// Complex power `z^e` through the principal logarithm.
pub fn cpow_principal<T: Real>(z: Complex<T>, e: T) -> Complex<T> {
    (z.ln() * e).exp()
}

/// Imaginary part of `ln(z)` chosen closest to `reference`.
pub fn arg_near<T: Real>(z: Complex<T>, reference: T) -> T {
    let a = z.arg();
    let tau = T::TAU();
    let k = ((reference - a) / tau).round();
    a + k * tau
}

/// Logarithm of `z` on the branch whose imaginary part is nearest `reference`.
pub fn ln_near<T: Real>(z: Complex<T>, reference: T) -> Complex<T> {
    Complex::new(z.norm().ln(), arg_near(z, reference))
}

/// Max-abs norm of a complex slice.
pub fn max_abs<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}
