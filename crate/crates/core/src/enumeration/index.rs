use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// A non-negative index into one of the enumerations.
///
/// `q_n` and `u_n` are 1-based; `r_k` starts at `k = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BigIndex(BigUint);

impl BigIndex {
    pub fn new(value: BigUint) -> Self {
        BigIndex(value)
    }

    pub fn one() -> Self {
        BigIndex(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub(crate) fn require_positive(&self, what: &str) -> Result<()> {
        if self.0.is_zero() {
            Err(Error::Domain(format!("{what} index must be at least 1")))
        } else {
            Ok(())
        }
    }
}

impl From<u64> for BigIndex {
    fn from(v: u64) -> Self {
        BigIndex(BigUint::from(v))
    }
}

impl From<BigUint> for BigIndex {
    fn from(v: BigUint) -> Self {
        BigIndex(v)
    }
}

impl FromStr for BigIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        crate::format::parse_decimal(s.trim()).map(BigIndex)
    }
}

impl fmt::Display for BigIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::decimal_string(&self.0))
    }
}
