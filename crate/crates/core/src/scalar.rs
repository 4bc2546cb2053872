//! Floating-point abstraction the numeric layers are generic over.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Scalar type for sequence values, covariance entries, classifier
/// thresholds and probabilities. Implemented for `f32` and `f64`.
///
/// `Display`/`FromStr` must round-trip exactly (both standard float types
/// print the shortest representation that reparses to the same bits); the
/// text serializers rely on that for byte-stable artifacts.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr<Err = std::num::ParseFloatError>
    + Display
    + Debug
    + Default
    + Send
    + Sync
    + 'static
{
    /// Off-diagonal magnitude below which the Jacobi eigensolver treats a
    /// symmetric matrix as diagonal. The f64 value is the artifact's
    /// contract; f32 cannot reach it and uses its own precision floor.
    fn jacobi_tolerance() -> Self;

    /// Largest |m[i][j] - m[j][i]| the eigensolver accepts as symmetric.
    fn symmetry_tolerance() -> Self;
}

impl Scalar for f64 {
    fn jacobi_tolerance() -> Self {
        1e-10
    }

    fn symmetry_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn jacobi_tolerance() -> Self {
        1e-5
    }

    fn symmetry_tolerance() -> Self {
        1e-6
    }
}

/// Lossless for f64, rounding for f32. Panics only on NaN bookkeeping
/// values, which no caller produces.
pub fn from_f64<F: Scalar>(v: f64) -> F {
    F::from_f64(v).expect("f64 converts to scalar")
}

pub fn from_usize<F: Scalar>(n: usize) -> F {
    F::from_usize(n).expect("usize converts to scalar")
}

pub fn from_u64<F: Scalar>(n: u64) -> F {
    F::from_u64(n).expect("u64 converts to scalar")
}

pub fn to_f64<F: Scalar>(v: F) -> f64 {
    v.to_f64().expect("scalar converts to f64")
}
