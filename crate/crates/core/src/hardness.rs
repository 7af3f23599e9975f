//! Hardness arithmetic: the exponent `alpha` with `n/m <= 2 T^alpha`.

use crate::error::{Error, Result};
use crate::scalar::{ceil_snapped, Real};

/// Problem size together with its hardness level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardnessParams<S> {
    pub n: usize,
    pub m: usize,
    pub horizon: usize,
    pub alpha: S,
}

impl<S: Real> HardnessParams<S> {
    pub fn new(n: usize, m: usize, horizon: usize) -> Result<Self> {
        Ok(Self {
            n,
            m,
            horizon,
            alpha: hardness_alpha(n, m, horizon)?,
        })
    }
}

/// Smallest `alpha >= 0` with `n/m <= 2 T^alpha`.
///
/// Problems needing `alpha > 1` lie outside every hardness class and are
/// rejected.
pub fn hardness_alpha<S: Real>(n: usize, m: usize, horizon: usize) -> Result<S> {
    if m == 0 || m > n {
        return Err(Error::domain(format!(
            "best-arm count m={m} must satisfy 1 <= m <= n={n}"
        )));
    }
    if horizon < 2 {
        return Err(Error::domain(format!("horizon {horizon} must be at least 2")));
    }
    let ratio = S::of_count(n) / (S::of_count(2 * m));
    if ratio <= S::one() {
        return Ok(S::zero());
    }
    let alpha = ratio.ln() / S::of_count(horizon).ln();
    let slack = S::of(64.0) * S::epsilon();
    if alpha > S::one() + slack {
        return Err(Error::domain(format!(
            "n/m = {n}/{m} exceeds 2T at T={horizon}; hardness above 1"
        )));
    }
    Ok(alpha.min(S::one()))
}

/// Number of best arms `ceil(n / (2 T^alpha))`, clamped to `[1, n]`.
pub fn best_arm_count<S: Real>(n: usize, horizon: usize, alpha: S) -> usize {
    let alpha = alpha.as_f64().clamp(0.0, 1.0);
    let raw = n as f64 / (2.0 * (horizon as f64).powf(alpha));
    (ceil_snapped(raw) as usize).clamp(1, n.max(1))
}
