//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All models, datasets and explanations are generic over a [`Scalar`], which
//! is implemented for `f32` and `f64`. The tolerances that depend on machine
//! precision live here so the algorithms themselves stay type-agnostic.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable for features, weights and stage weights.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Allowed deviation of a weight vector's sum from one.
    fn weight_sum_tolerance() -> Self;

    /// Converts an `f64` literal; every constant in the crate is representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// IEEE total order, usable for sorting.
    fn total_order(&self, other: &Self) -> std::cmp::Ordering;

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn total_order(&self, other: &Self) -> std::cmp::Ordering {
        self.total_cmp(other)
    }

    #[inline]
    fn weight_sum_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    #[inline]
    fn total_order(&self, other: &Self) -> std::cmp::Ordering {
        self.total_cmp(other)
    }

    #[inline]
    fn weight_sum_tolerance() -> Self {
        1e-4
    }
}

/// Sum of a slice using Neumaier compensation.
///
/// Weight vectors are renormalized every boosting round; plain summation
/// drifts enough over hundreds of rounds to trip the sum-to-one checks in
/// `f32`.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}
