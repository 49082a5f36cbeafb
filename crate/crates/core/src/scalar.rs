//! Scalar abstractions shared by the numeric modules.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

/// Exact rational scalar used where identities must hold bit-for-bit.
pub type Exact = BigRational;

/// Field-like scalar for accounting identities: `f64`, `f32`, or an exact rational.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive {}

impl<T: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive> Scalar for T {}

/// Lift an integer share count into the scalar.
pub fn from_qty<S: Scalar>(q: u64) -> S {
    S::from_u64(q).expect("share count representable in scalar")
}

/// Exact rational for an integer tick price over a tick denominator,
/// e.g. `ticks(5050, 100)` is 50.50.
pub fn ticks(value: i64, per_unit: i64) -> Exact {
    BigRational::new(BigInt::from(value), BigInt::from(per_unit))
}

/// Exact value of an `f64` (every finite float is a dyadic rational).
pub fn exact_from_f64(x: f64) -> Exact {
    BigRational::from_float(x).expect("finite float")
}
