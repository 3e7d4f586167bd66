use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point scalar the probability and MDP math is written against: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used when checking that a vector of `n` entries sums to one.
    fn simplex_tolerance(n: usize) -> Self {
        let base = Self::from_f64(1e-9).unwrap();
        let eps = Self::epsilon() * Self::from_usize(n.max(1) * 8).unwrap();
        base.max(eps)
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).unwrap()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
