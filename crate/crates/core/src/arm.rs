use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reward law of a real arm.
///
/// Both variants are (1/4)-sub-Gaussian: Bernoulli rewards are bounded in
/// `[0, 1]` and the Gaussian variant has variance exactly 1/4.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ArmDistribution<S> {
    Bernoulli { mean: S },
    Gaussian { mean: S },
}

impl<S: Real> ArmDistribution<S> {
    pub fn bernoulli(mean: S) -> Result<Self> {
        check_mean(mean)?;
        Ok(Self::Bernoulli { mean })
    }

    pub fn gaussian(mean: S) -> Result<Self> {
        check_mean(mean)?;
        Ok(Self::Gaussian { mean })
    }

    pub fn mean(&self) -> S {
        match *self {
            Self::Bernoulli { mean } | Self::Gaussian { mean } => mean,
        }
    }

    pub fn variance(&self) -> S {
        match *self {
            Self::Bernoulli { mean } => mean * (S::one() - mean),
            Self::Gaussian { .. } => S::of(0.25),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> S {
        match *self {
            Self::Bernoulli { mean } => {
                if rng.random::<f64>() < mean.as_f64() {
                    S::one()
                } else {
                    S::zero()
                }
            }
            Self::Gaussian { mean } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + S::of(0.5 * z)
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        check_mean(self.mean())
    }
}

fn check_mean<S: Real>(mean: S) -> Result<()> {
    if mean >= S::zero() && mean <= S::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("arm mean {mean} outside [0, 1]")))
    }
}
