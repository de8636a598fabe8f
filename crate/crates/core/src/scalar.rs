//! Scalar abstraction over the floating-point type used for weights and scores.

use std::fmt::{Debug, Display};
use std::ops::{AddAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar for edge weights, degrees and criterion values.
///
/// Implemented for `f32` and `f64`; all core math is generic over this trait.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from `usize` counts (set sizes, node counts).
    fn from_count(c: usize) -> Self {
        Self::from_usize(c).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
