use rand::Rng;

use crate::algorithms::Policy;
use crate::error::{Error, Result};
use crate::pool::ArmPool;
use crate::scalar::{CompensatedSum, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step<S> {
    pub arm: usize,
    pub reward: S,
    /// True mean of the chosen pool entry.
    pub mean: S,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace<S> {
    pub steps: Vec<Step<S>>,
}

impl<S: Real> RunTrace<S> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `T mu* - sum of realized rewards`; noisy, for diagnostics only.
    pub fn realized_regret(&self, mu_star: S) -> S {
        let rewards: CompensatedSum<S> = self.steps.iter().map(|s| s.reward).collect();
        S::of_count(self.len()) * mu_star - rewards.value()
    }
}

/// Run `policy` for `horizon` steps, drawing rewards from `pool` with `rng`.
pub fn simulate<S: Real, R: Rng + ?Sized>(
    policy: &mut dyn Policy<S>,
    pool: &mut ArmPool<S>,
    horizon: usize,
    rng: &mut R,
) -> Result<RunTrace<S>> {
    let mut steps = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let arm = policy.choose(pool);
        let reward = pool.sample_arm(arm, rng)?;
        policy.observe(arm, reward);
        steps.push(Step {
            arm,
            reward,
            mean: pool.mean_of(arm),
        });
    }
    policy.finish(pool);
    Ok(RunTrace { steps })
}

/// Cumulative pseudo-regret of one run, one value per step.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretCurve<S> {
    pub values: Vec<S>,
}

impl<S: Real> RegretCurve<S> {
    pub fn final_value(&self) -> S {
        self.values.last().copied().unwrap_or_else(S::zero)
    }

    /// Value after `t` steps (`t >= 1`).
    pub fn at(&self, t: usize) -> S {
        self.values[t - 1]
    }
}

/// Running sum of `mu* - mean(A_t)`, using true means rather than rewards.
pub fn pseudo_regret<S: Real>(trace: &RunTrace<S>, mu_star: S) -> RegretCurve<S> {
    let mut acc = CompensatedSum::new();
    let values = trace
        .steps
        .iter()
        .map(|s| {
            acc.add(mu_star - s.mean);
            acc.value()
        })
        .collect();
    RegretCurve { values }
}

/// Regret of a subset-restricted run split into the cost of the subset
/// choice and the cost of learning inside it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegretDecomposition<S> {
    pub approximation: S,
    pub learning: S,
}

impl<S: Real> RegretDecomposition<S> {
    pub fn total(&self) -> S {
        self.approximation + self.learning
    }
}

pub fn regret_decomposition<S: Real>(
    trace: &RunTrace<S>,
    subset: &[usize],
    pool: &ArmPool<S>,
) -> Result<RegretDecomposition<S>> {
    if subset.is_empty() {
        return Err(Error::domain("subset must be nonempty"));
    }
    let mut best_in_subset = S::neg_infinity();
    for &i in subset {
        best_in_subset = best_in_subset.max(pool.mixture_mean(i)?);
    }
    let mu_star = pool.instance().mu_star();
    let t = S::of_count(trace.len());
    let chosen: CompensatedSum<S> = trace.steps.iter().map(|s| s.mean).collect();
    Ok(RegretDecomposition {
        approximation: t * (mu_star - best_in_subset),
        learning: t * best_in_subset - chosen.value(),
    })
}
