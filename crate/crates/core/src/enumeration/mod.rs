//! Exact enumeration machinery.
//!
//! Positive rationals are enumerated by the Calkin–Wilf sequence `q_1 = 1,
//! q_2 = 1/2, q_3 = 2, …`; all rationals by `r_0 = 0, r_{2n} = q_n,
//! r_{2n-1} = -q_n`. Monic polynomials with rational coefficients are put in
//! bijection with the positive rationals through canonical continued
//! fractions, which yields the sequence `u_1 = 1, u_2 = x^2, u_3 = x, …`.
//!
//! Indices are converted through the run-length structure of their binary
//! expansion, so every operation is linear in the bit length of the index.

mod bijection;
mod calkin_wilf;
mod cf;
mod index;
mod poly;
mod simplest;

pub use bijection::{
    cf_from_poly, index_of_poly, poly_at_index, poly_from_cf, poly_from_rational,
    rational_from_poly,
};
pub use calkin_wilf::{cw_index, cw_index_of_cf, cw_rational, r_index, r_seq, MAX_INDEX_BITS};
pub use cf::{cf_decode, cf_encode, ContinuedFraction};
pub use index::BigIndex;
pub use poly::{MonicPoly, Poly};
pub use simplest::simplest_rational_in;
