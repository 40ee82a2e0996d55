use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed};

/// Exact signed integers usable as matrix entries.
pub trait Scalar: Clone + Debug + Display + Integer + Signed + FromPrimitive {}

impl<T> Scalar for T where T: Clone + Debug + Display + Integer + Signed + FromPrimitive {}

pub(crate) fn from_i64<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("every scalar type holds small integers")
}
