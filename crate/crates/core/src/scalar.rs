use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Numeric type the cut formulas are evaluated in.
///
/// Every quantity in this crate is a ratio of two edge counts, so the only
/// constructor needed is [`Scalar::from_ratio`]. Floating-point types round
/// once at the division; rational types are exact.
pub trait Scalar: Num + Clone + PartialOrd + Debug {
    fn from_ratio(num: u64, den: u64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_ratio(num: u64, den: u64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(
            i64::try_from(num).expect("numerator overflows i64"),
            i64::try_from(den).expect("denominator overflows i64"),
        )
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for Ratio<i128> {
    fn from_ratio(num: u64, den: u64) -> Self {
        Ratio::new(i128::from(num), i128::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact comparison of `a/b` against `c/d` for non-negative counts with
/// positive denominators.
pub(crate) fn cmp_fractions(a: u64, b: u64, c: u64, d: u64) -> std::cmp::Ordering {
    (u128::from(a) * u128::from(d)).cmp(&(u128::from(c) * u128::from(b)))
}
