//! Scalar abstraction for all field and cost arithmetic.
//!
//! Message tables hold extended reals: ordinary finite values plus a
//! "minus infinity" marker for forbidden depth assignments. The marker is a
//! finite sentinel (the most negative quarter of the floating range) with
//! saturating arithmetic, so that subtract-and-restrict update schemes never
//! produce NaN from `-inf - (-inf)`.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Floating scalar used for weights, prizes and message fields.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

/// The forbidden-value sentinel: `min_value() / 4`.
pub fn neg_inf<T: Scalar>() -> T {
    T::min_value() / T::from_f64(4.0).unwrap()
}

/// Detection threshold: anything at or below `min_value() / 8` is treated as
/// forbidden. Legitimate field values sit many hundred orders of magnitude
/// above this.
pub fn neg_inf_threshold<T: Scalar>() -> T {
    T::min_value() / T::from_f64(8.0).unwrap()
}

pub fn is_neg_inf<T: Scalar>(x: T) -> bool {
    x <= neg_inf_threshold::<T>()
}

/// Saturating addition over extended reals.
pub fn sat_add<T: Scalar>(a: T, b: T) -> T {
    if is_neg_inf(a) || is_neg_inf(b) {
        neg_inf()
    } else {
        a + b
    }
}

/// Saturating subtraction; `b` must be finite in every call site, the guard is
/// for the left operand.
pub fn sat_sub<T: Scalar>(a: T, b: T) -> T {
    if is_neg_inf(a) {
        neg_inf()
    } else {
        a - b
    }
}

/// Scale by a finite non-negative factor, preserving the forbidden marker.
/// A zero factor removes the term entirely, even from a forbidden value.
pub fn sat_scale<T: Scalar>(factor: T, x: T) -> T {
    if factor.is_zero() {
        T::zero()
    } else if is_neg_inf(x) {
        neg_inf()
    } else {
        factor * x
    }
}

pub fn from_f64<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}
