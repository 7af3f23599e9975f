//! Instance generators: the synthetic many-best-arms family and the
//! two-level Gaussian family used in the lower-bound construction.

use serde::{Deserialize, Serialize};

use crate::arm::ArmDistribution;
use crate::error::{Error, Result};
use crate::hardness::{best_arm_count, hardness_alpha};
use crate::instance::BanditInstance;
use crate::scalar::{ceil_snapped, floor_snapped, Real};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n: usize,
    pub horizon: usize,
    pub alpha: f64,
    #[serde(default = "default_best_mean")]
    pub best_mean: f64,
    #[serde(default = "default_suboptimal_means")]
    pub suboptimal_means: Vec<f64>,
    /// Width of the near-optimal band the best arms are spread over.
    #[serde(default)]
    pub epsilon: f64,
}

fn default_best_mean() -> f64 {
    0.9
}

fn default_suboptimal_means() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}

impl SyntheticSpec {
    pub fn new(n: usize, horizon: usize, alpha: f64) -> Self {
        Self {
            n,
            horizon,
            alpha,
            best_mean: default_best_mean(),
            suboptimal_means: default_suboptimal_means(),
            epsilon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::domain("synthetic instance needs n >= 1"));
        }
        if self.horizon < 2 {
            return Err(Error::domain("synthetic instance needs horizon >= 2"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::domain(format!("alpha={} outside [0, 1]", self.alpha)));
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.best_mean) || !self.suboptimal_means.iter().all(|&x| unit(x)) {
            return Err(Error::domain("synthetic means must lie in [0, 1]"));
        }
        if self.suboptimal_means.iter().any(|&x| x >= self.best_mean) {
            return Err(Error::domain("best_mean must exceed every suboptimal mean"));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 || self.best_mean - self.epsilon < 0.0 {
            return Err(Error::domain(format!("epsilon={} invalid", self.epsilon)));
        }
        let m = best_arm_count(self.n, self.horizon, self.alpha);
        if m < self.n && self.suboptimal_means.is_empty() {
            return Err(Error::domain("suboptimal_means must be nonempty"));
        }
        Ok(())
    }
}

/// Bernoulli instance with `m = best_arm_count(n, T, alpha)` best arms at
/// indices `0..m`, followed by the suboptimal levels assigned round-robin.
///
/// With `epsilon > 0` the best arms are spread evenly over
/// `[best_mean - epsilon, best_mean]`; only the top one stays exactly best.
pub fn make_synthetic<S: Real>(spec: &SyntheticSpec) -> Result<BanditInstance<S>> {
    spec.validate()?;
    let m = best_arm_count(spec.n, spec.horizon, spec.alpha);
    let best = (0..m).map(|j| {
        if spec.epsilon > 0.0 && m > 1 {
            spec.best_mean - spec.epsilon * j as f64 / (m - 1) as f64
        } else {
            spec.best_mean
        }
    });
    let levels = &spec.suboptimal_means;
    let rest = (0..spec.n - m).map(|j| levels[j % levels.len()]);
    let arms = best
        .chain(rest)
        .map(|mean| ArmDistribution::bernoulli(S::of(mean)))
        .collect::<Result<Vec<_>>>()?;
    BanditInstance::new(arms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LowerBoundFamilySpec {
    pub horizon: usize,
    pub alpha: f64,
    pub alpha_prime: f64,
    pub m: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.5
}

/// Shared layout of a lower-bound family: `S_0 = 0..m0`, then `K` groups
/// of `m` arms.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerBoundFamily<S> {
    pub k: usize,
    pub m0: usize,
    pub m: usize,
    pub n: usize,
    /// Instance 0 followed by instances `1..=K`.
    pub instances: Vec<BanditInstance<S>>,
}

impl<S> LowerBoundFamily<S> {
    /// Index range of group `S_i`.
    pub fn group(&self, i: usize) -> std::ops::Range<usize> {
        if i == 0 {
            0..self.m0
        } else {
            let start = self.m0 + (i - 1) * self.m;
            start..start + self.m
        }
    }
}

/// `K = floor(T^alpha) - 1`, `m0 = m ceil(T^(alpha - alpha'))`, `n = m0 + K m`.
pub fn lower_bound_layout(spec: &LowerBoundFamilySpec) -> Result<(usize, usize, usize)> {
    let LowerBoundFamilySpec {
        horizon,
        alpha,
        alpha_prime,
        m,
        delta,
    } = *spec;
    if !(0.0 <= alpha_prime && alpha_prime < alpha && alpha <= 1.0) {
        return Err(Error::domain(format!(
            "need 0 <= alpha'={alpha_prime} < alpha={alpha} <= 1"
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta={delta} outside (0, 1]")));
    }
    if m == 0 || horizon < 2 {
        return Err(Error::domain("need m >= 1 and horizon >= 2"));
    }
    let t = horizon as f64;
    let k = floor_snapped(t.powf(alpha)) as usize;
    if k < 3 {
        return Err(Error::domain(format!(
            "K = floor(T^alpha) - 1 = {} < 2 at T={horizon}, alpha={alpha}",
            k.saturating_sub(1)
        )));
    }
    let k = k - 1;
    let m0 = m * ceil_snapped(t.powf(alpha - alpha_prime)) as usize;
    Ok((k, m0, m0 + k * m))
}

pub fn make_lower_bound_family<S: Real>(spec: &LowerBoundFamilySpec) -> Result<LowerBoundFamily<S>> {
    let (k, m0, n) = lower_bound_layout(spec)?;
    let m = spec.m;
    let delta = S::of(spec.delta);
    let base: Vec<S> = (0..n)
        .map(|j| if j < m0 { delta * S::half() } else { S::zero() })
        .collect();
    let build = |means: &[S]| {
        means
            .iter()
            .map(|&mu| ArmDistribution::gaussian(mu))
            .collect::<Result<Vec<_>>>()
            .and_then(BanditInstance::new)
    };
    let mut instances = Vec::with_capacity(k + 1);
    instances.push(build(&base)?);
    for i in 1..=k {
        let mut means = base.clone();
        let start = m0 + (i - 1) * m;
        means[start..start + m].fill(delta);
        instances.push(build(&means)?);
    }
    let family = LowerBoundFamily {
        k,
        m0,
        m,
        n,
        instances,
    };
    let easy: S = hardness_alpha(n, family.instances[0].m(), spec.horizon)?;
    let slack = 1e-9;
    if easy.as_f64() > spec.alpha_prime + slack {
        return Err(Error::domain(format!("instance 0 has hardness {easy} > alpha'")));
    }
    for inst in &family.instances[1..] {
        let hard: S = hardness_alpha(n, inst.m(), spec.horizon)?;
        if hard.as_f64() > spec.alpha + slack {
            return Err(Error::domain(format!("instance hardness {hard} > alpha")));
        }
    }
    Ok(family)
}
