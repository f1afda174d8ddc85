use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::Float;

/// Element type for tensors.
///
/// `f32` is the training precision. `f64` is used by the finite-difference
/// gradient checks, where f32 cancellation noise would swamp the comparison.
pub trait Scalar: Float + Debug + Display + Default + Sum + 'static {
    /// Tag written into checkpoints and summaries.
    const DTYPE: &'static str;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_f64(v as f64)
    }
}

impl Scalar for f32 {
    const DTYPE: &'static str = "f32";

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const DTYPE: &'static str = "f64";

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(self) -> f64 {
        self
    }
}
