use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    /// `max(v, 0)`
    #[inline]
    fn pos(self) -> Self {
        self.max(Self::zero())
    }

    /// `-min(v, 0)`
    #[inline]
    fn neg_part(self) -> Self {
        -(self.min(Self::zero()))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_and_negative_parts() {
        assert_eq!(2.5f64.pos(), 2.5);
        assert_eq!((-2.5f64).pos(), 0.0);
        assert_eq!((-2.5f64).neg_part(), 2.5);
        assert_eq!(2.5f32.neg_part(), 0.0);
        let a = -0.75f64;
        assert_eq!(a.pos() - a.neg_part(), a);
    }
}
