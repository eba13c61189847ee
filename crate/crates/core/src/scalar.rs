//! Floating-point abstraction for the numeric core.
//!
//! Everything in the linear-algebra, bandit, regression, and regret modules is
//! generic over [`Scalar`] so the same code runs in `f32` or `f64`. Concrete
//! `f64` aliases live at the crate root; the pipeline and all logged artifacts
//! use those.

use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// A real scalar the numeric core can compute with.
///
/// `cast` converts `f64` literals (tolerances, formula constants) into the
/// working precision; `as_f64` goes the other way for reporting.
pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    fn cast(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant")
    }

    fn as_f64(self) -> f64;

    fn from_usize_(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in scalar")
    }
}

impl Scalar for f32 {
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}
