//! Scalar abstraction shared by the physics and cost models.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar used throughout the models: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal or parameter into this scalar.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Trapezoid weights over `n` uniformly spaced samples with spacing `h`.
pub(crate) fn trapezoid<T: Real>(values: &[T], h: T) -> T {
    match values.len() {
        0 | 1 => T::zero(),
        n => {
            let inner: T = values[1..n - 1].iter().copied().sum();
            h * (inner + T::half() * (values[0] + values[n - 1]))
        }
    }
}

/// Linear interpolation on a strictly increasing abscissa. Returns `None`
/// outside `[xs[0], xs[last]]`.
pub(crate) fn interp_linear<T: Real>(xs: &[T], ys: &[T], x: T) -> Option<T> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    let i = match xs.iter().position(|&xi| xi >= x) {
        Some(0) => return Some(ys[0]),
        Some(i) => i,
        None => return Some(ys[n - 1]),
    };
    let (x0, x1) = (xs[i - 1], xs[i]);
    let f = (x - x0) / (x1 - x0);
    Some(ys[i - 1] + f * (ys[i] - ys[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_matches_linear_integral() {
        let ys: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * 0.1).collect();
        assert!((trapezoid(&ys, 0.1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interp_inside_and_outside() {
        let xs = [0.0_f32, 1.0, 2.0];
        let ys = [0.0_f32, 10.0, 30.0];
        assert_eq!(interp_linear(&xs, &ys, 1.5), Some(20.0));
        assert_eq!(interp_linear(&xs, &ys, 0.0), Some(0.0));
        assert_eq!(interp_linear(&xs, &ys, 2.0), Some(30.0));
        assert_eq!(interp_linear(&xs, &ys, 2.5), None);
    }
}
