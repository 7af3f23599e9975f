//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! Means, rewards and regret values are generic over [`Real`]; counts,
//! horizons and user-facing exponents (`alpha`, `beta`) are plain `usize`
//! and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type usable for arm means, rewards and regret.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Allowed deviation of mixture weights from summing to one.
    const WEIGHT_TOLERANCE: f64;

    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable")
    }

    #[inline]
    fn of_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar converts to f64")
    }

    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Real for f64 {
    const WEIGHT_TOLERANCE: f64 = 1e-9;
}

impl Real for f32 {
    const WEIGHT_TOLERANCE: f64 = 1e-5;
}

// Rounding of `powf`/`ln` can push an exact integer a few ulps across an
// integer boundary; snap values within 64 ulps of an integer first.
fn snap(x: f64) -> Option<f64> {
    let r = x.round();
    if (x - r).abs() <= 64.0 * f64::EPSILON * r.abs().max(1.0) {
        Some(r)
    } else {
        None
    }
}

/// Ceiling that treats near-integers as integers.
pub fn ceil_snapped(x: f64) -> f64 {
    snap(x).unwrap_or_else(|| x.ceil())
}

/// Floor that treats near-integers as integers.
pub fn floor_snapped(x: f64) -> f64 {
    snap(x).unwrap_or_else(|| x.floor())
}

/// Saturating `2^e` as a count.
pub(crate) fn pow2_saturating(e: usize) -> usize {
    if e >= usize::BITS as usize - 1 {
        usize::MAX
    } else {
        1usize << e
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<S> {
    sum: S,
    compensation: S,
}

impl<S: Real> CompensatedSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            compensation: S::zero(),
        }
    }

    pub fn add(&mut self, x: S) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation = self.compensation + ((self.sum - t) + x);
        } else {
            self.compensation = self.compensation + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> S {
        self.sum + self.compensation
    }
}

impl<S: Real> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
