//! Two-neuron network synthesis.
//!
//! For `f` on `[a, b]` and a budget `ε`, the target is pulled back to
//! `g(x) = f(a + (b - a) x)` on `[0, 1]`, truncated to a Taylor polynomial
//! `T_k` about `1/2` within `ε/2`, rounded to `p0 u_n` within another `ε/2`,
//! and finally realised as
//!
//! ```text
//! N(x) = c1 σ(x - θ1) + c2 σ(x - θ2)
//! ```
//!
//! using the piece of `σ` that carries `u_n`.

mod network;
mod pipeline;
mod target;

pub use network::{synthesize, synthesize_with, Network, Provenance, SynthOptions, Theta1, VerifyReport};
pub use pipeline::{
    choose_degree, pull_back, rationalize, rationalize_exact, search, Candidate, DegreeChoice,
    PulledBack, Rationalized, DEFAULT_MAX_DEGREE, DEFAULT_MAX_INDEX_BITS, SEARCH_MAX_DEGREE,
};
pub use target::{
    by_name, cubic, exp_partial, PolyTarget, RationalTarget, SinCosTarget, TargetFunction, CATALOG,
};
