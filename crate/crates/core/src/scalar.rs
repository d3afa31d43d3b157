//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy widening used for error reports and CLI output.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `tol`, floored at a few hundred ulps so `f32` checks stay meaningful.
    fn tolerance(tol: f64) -> Self {
        Self::lit(tol).max(Self::epsilon() * Self::lit(256.0))
    }

    /// Threshold below which `x log x` is treated as its limit `0`.
    fn tiny() -> Self;
}

impl Real for f32 {
    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}

impl Real for f64 {
    fn tiny() -> Self {
        1e-300
    }
}

/// `x log2 x` with the convention `0 log 0 = 0`.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x < T::tiny() {
        T::zero()
    } else {
        x * x.log2()
    }
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xlog2x_limit() {
        assert_eq!(xlog2x(0.0_f64), 0.0);
        assert_eq!(xlog2x(1e-320_f64), 0.0);
        assert_eq!(xlog2x(2.0_f64), 2.0);
        assert_eq!(xlog2x(0.0_f32), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1.0_f64, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
        assert_eq!(v.iter().copied().sum::<f64>(), 0.0);
    }
}
