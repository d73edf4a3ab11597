use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed};

/// Exact ordered time domain used for clock values and delays.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self;

    /// Builds `numer / denom`; `denom` must be positive.
    fn from_fraction(numer: i64, denom: i64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }
}

impl Scalar for Ratio<i64> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(v)
    }

    fn from_fraction(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }
}

impl Scalar for Ratio<BigInt> {
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }
}
