//! Fixed-weight two-neuron approximation with a constructed sigmoidal activation.
//!
//! The crate is organised bottom-up:
//!
//! * [`enumeration`]: exact Calkin–Wilf indexing, continued fractions and the
//!   bijection between monic rational polynomials and positive rationals.
//! * [`bigreal`]: adaptive-precision reals used for every transcendental step.
//! * [`sigma`]: the piecewise smooth activation `σ`, evaluable at points whose
//!   interval index has millions of bits.
//! * [`synthesis`]: turns a target function and an error budget into the four
//!   network parameters `(c1, c2, θ1, θ2)` and certifies the result on a grid.
//! * [`baseline`]: Heaviside step networks used as a comparator.

pub mod baseline;
pub mod bigreal;
pub mod enumeration;
mod error;
pub mod format;
pub mod sigma;
pub mod synthesis;

pub use bigreal::BigReal;
pub use enumeration::{BigIndex, ContinuedFraction, MonicPoly, Poly};
pub use error::{Error, Result};

/// Exact signed rational in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;
