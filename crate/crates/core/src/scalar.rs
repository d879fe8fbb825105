//! Floating-point scalar bound shared by the real-valued measure code.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, NumCast};

/// A real scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + NumCast + Debug + Send + Sync + 'static {
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize fits in a float")
    }

    fn from_u64_lossy(v: u64) -> Self {
        Self::from_u64(v).expect("u64 fits in a float")
    }

    fn ratio(num: u64, den: u64) -> Self {
        Self::from_u64_lossy(num) / Self::from_u64_lossy(den)
    }
}

impl Real for f32 {}
impl Real for f64 {}
