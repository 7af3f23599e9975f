//! Parallel: `ceil(ln T)` SR subroutines sharing one horizon, scheduled in
//! blocks of `ceil(sqrt T)` pulls by lowest empirical regret.

use super::subset::{make_sr, SubsetMoss};
use super::Policy;
use crate::error::{Error, Result};
use crate::pool::ArmRegistry;
use crate::rng::SimRng;
use crate::scalar::{ceil_snapped, Real};

/// One scheduling decision: which subroutine ran, and the empirical regrets
/// it was chosen from.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRecord<S> {
    pub start: usize,
    pub subroutine: usize,
    pub regrets: Vec<S>,
}

#[derive(Clone, Debug)]
pub struct Parallel<S> {
    subroutines: Vec<SubsetMoss<S>>,
    pulls: Vec<usize>,
    reward_sums: Vec<S>,
    mu_star: S,
    block_len: usize,
    horizon: usize,
    total: usize,
    active: Option<(usize, usize)>,
    blocks: Vec<BlockRecord<S>>,
}

fn ceil_sqrt(t: usize) -> usize {
    let mut r = (t as f64).sqrt() as usize;
    while r * r < t {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= t {
        r -= 1;
    }
    r
}

impl<S: Real> Parallel<S> {
    /// Parallel with an explicit subroutine count; SR_i uses `alpha = i/count`.
    pub fn with_subroutines(
        horizon: usize,
        mu_star: S,
        n: usize,
        count: usize,
        rng: &mut SimRng,
    ) -> Result<Self> {
        if !(mu_star >= S::zero() && mu_star <= S::one()) {
            return Err(Error::domain(format!("mu_star={mu_star} outside [0, 1]")));
        }
        if horizon == 0 || count == 0 || n == 0 {
            return Err(Error::domain("Parallel needs horizon, arms and subroutines >= 1"));
        }
        let subroutines = (1..=count)
            .map(|i| make_sr(horizon, i as f64 / count as f64, n, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            subroutines,
            pulls: vec![0; count],
            reward_sums: vec![S::zero(); count],
            mu_star,
            block_len: ceil_sqrt(horizon).max(1),
            horizon,
            total: 0,
            active: None,
            blocks: Vec::new(),
        })
    }

    pub fn subroutine_count(&self) -> usize {
        self.subroutines.len()
    }

    pub fn subroutine(&self, i: usize) -> &SubsetMoss<S> {
        &self.subroutines[i]
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn pulls(&self, i: usize) -> usize {
        self.pulls[i]
    }

    pub fn reward_sum(&self, i: usize) -> S {
        self.reward_sums[i]
    }

    /// `T_i * mu_star - (sum of rewards collected by SR_i)`.
    pub fn empirical_regret(&self, i: usize) -> S {
        S::of_count(self.pulls[i]) * self.mu_star - self.reward_sums[i]
    }

    pub fn blocks(&self) -> &[BlockRecord<S>] {
        &self.blocks
    }

    fn start_block(&mut self) {
        let regrets: Vec<S> = (0..self.subroutines.len()).map(|i| self.empirical_regret(i)).collect();
        let mut best = 0;
        for (i, &r) in regrets.iter().enumerate() {
            if r < regrets[best] {
                best = i;
            }
        }
        let len = self.block_len.min(self.horizon - self.total);
        self.active = Some((best, len));
        self.blocks.push(BlockRecord {
            start: self.total,
            subroutine: best,
            regrets,
        });
    }
}

impl<S: Real> Policy<S> for Parallel<S> {
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize {
        assert!(self.total < self.horizon, "Parallel ran past its horizon");
        if !matches!(self.active, Some((_, left)) if left > 0) {
            self.start_block();
        }
        let (k, _) = self.active.expect("block is open");
        self.subroutines[k].choose(arms)
    }

    fn observe(&mut self, index: usize, reward: S) {
        let (k, left) = self.active.expect("observe without an open block");
        self.subroutines[k].observe(index, reward);
        self.pulls[k] += 1;
        self.reward_sums[k] = self.reward_sums[k] + reward;
        self.total += 1;
        self.active = Some((k, left - 1));
    }
}

/// Parallel with `ceil(ln T)` subroutines (at least one).
pub fn make_parallel<S: Real>(horizon: usize, mu_star: S, n: usize, rng: &mut SimRng) -> Result<Parallel<S>> {
    let count = (ceil_snapped((horizon.max(1) as f64).ln()) as usize).max(1);
    Parallel::with_subroutines(horizon, mu_star, n, count, rng)
}
