//! Cyclic covers `y^N = ∏ (x - λ_i)^{R_i}` of the projective line.
//!
//! The crate goes from exact combinatorics (ramification data, τ-profiles,
//! admissible divisors) to numerics on the Riemann surface: a symplectic
//! homology basis, period matrices, Abel maps, theta constants, Szegő and
//! canonical bidifferential kernels, and the Thomae-type identities tying
//! theta constants to `det C` and branch-point differences.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod abeljacobi;
pub mod curve;
pub mod divisors;
pub mod error;
pub mod homology;
pub mod kernels;
pub mod linalg;
pub mod periods;
pub mod quadrature;
pub mod scalar;
pub mod surface;
pub mod theta;
pub mod thomae;

pub use curve::{gamma_exponent, q_exponent, reduce, CurveSpec, RamificationData};
pub use divisors::{enumerate_admissible, equivalence_shift, negate, nonsingular_rule, tau_profile, BetaVector};
pub use error::{Error, Result};
pub use scalar::{Rational, Real};

/// Double precision curve.
pub type Curve = CurveSpec<f64>;
pub type Basis = homology::HomologyBasis<f64>;
pub type Periods = periods::PeriodData<f64>;
pub type Bidifferential = kernels::CanonicalBidifferential<f64>;
pub type ThomaeData = thomae::CurveData<f64>;
pub type Report = thomae::ThomaeReport<f64>;

/// Single precision curve.
pub type Curve32 = CurveSpec<f32>;
