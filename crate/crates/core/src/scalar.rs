//! Scalar abstraction: every numerical routine in this crate is generic over
//! the floating-point type through [`Scalar`], so the whole pipeline can run
//! in `f32` or `f64`. The crate root exports `f64` aliases for the common
//! types; `f64` is what the command line and the experiment harness use.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Converts a numeric constant. Panics if the value is not representable,
    /// which for finite `f64` constants and the two implementors never happens.
    fn c(value: f64) -> Self {
        Self::from_f64(value).expect("constant not representable in this scalar type")
    }

    /// `f64` view of the value, used at I/O boundaries (CSV, SVG, JSON).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
