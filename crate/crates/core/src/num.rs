//! Scalar abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into `Self`.
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    /// Lossy conversion for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sign(u)|u|^(α+1)`, the zero-order nonlinearity `|u|^α u`.
pub fn odd_pow<T: Real>(u: T, alpha: T) -> T {
    if u == T::zero() {
        return T::zero();
    }
    u.signum() * u.abs().powf(alpha + T::one())
}

/// `max(x, 0)`.
pub(crate) fn pos<T: Real>(x: T) -> T {
    x.max(T::zero())
}

/// `max(-x, 0)`.
pub(crate) fn neg<T: Real>(x: T) -> T {
    (-x).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn odd_pow_zero_for_negative_alpha() {
        assert_eq!(odd_pow(0.0_f64, -0.5), 0.0);
    }

    proptest! {
        #[test]
        fn odd_pow_is_odd_and_increasing(u in -50.0f64..50.0, v in -50.0f64..50.0, alpha in -0.9f64..3.0) {
            prop_assert!((odd_pow(-u, alpha) + odd_pow(u, alpha)).abs() <= 1e-12 * (1.0 + u.abs().powf(alpha + 1.0)));
            prop_assert!(odd_pow(u, alpha) * u >= 0.0);
            if u < v {
                prop_assert!(odd_pow(u, alpha) < odd_pow(v, alpha));
            }
        }
    }
}
