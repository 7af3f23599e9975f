use super::index_tree::IndexTree;
use super::Policy;
use crate::error::{Error, Result};
use crate::pool::ArmRegistry;
use crate::scalar::Real;

/// MOSS upper-confidence index for (1/4)-sub-Gaussian rewards:
/// `mean + sqrt(log+(budget / (arms * pulls)) / pulls)`, and `+inf` for an
/// arm that has never been pulled.
pub fn moss_index<S: Real>(mean_hat: S, pulls: u64, budget: usize, arm_count: usize) -> S {
    if pulls == 0 {
        return S::infinity();
    }
    let s = S::from_u64(pulls).expect("count is representable");
    let ratio = S::of_count(budget) / (S::of_count(arm_count) * s);
    mean_hat + (ratio.ln().max(S::zero()) / s).sqrt()
}

/// Per-arm statistics of a MOSS run over a fixed, ascending arm set.
#[derive(Clone, Debug)]
pub struct MossState<S> {
    arms: Vec<usize>,
    counts: Vec<u64>,
    sums: Vec<S>,
    budget: usize,
}

impl<S: Real> MossState<S> {
    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn mean(&self, slot: usize) -> S {
        if self.counts[slot] == 0 {
            S::zero()
        } else {
            self.sums[slot] / S::from_u64(self.counts[slot]).expect("count is representable")
        }
    }

    pub fn means(&self) -> Vec<S> {
        (0..self.arms.len()).map(|s| self.mean(s)).collect()
    }

    pub fn total_pulls(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn slot_of(&self, index: usize) -> Option<usize> {
        self.arms.binary_search(&index).ok()
    }

    fn index(&self, slot: usize) -> S {
        moss_index(self.mean(slot), self.counts[slot], self.budget, self.arms.len())
    }
}

/// MOSS restricted to an arm set. Ties between equal indices resolve to
/// the lowest pool index.
#[derive(Clone, Debug)]
pub struct Moss<S> {
    state: MossState<S>,
    tree: IndexTree<S>,
    pending: Option<usize>,
}

impl<S: Real> Moss<S> {
    pub fn new(arms: Vec<usize>, budget: usize) -> Result<Self> {
        Self::with_prior(arms, budget, |_| (0, S::zero()))
    }

    /// MOSS whose per-arm statistics start from `prior(index) = (pulls, mean)`.
    pub fn with_prior(
        mut arms: Vec<usize>,
        budget: usize,
        prior: impl Fn(usize) -> (u64, S),
    ) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::domain("MOSS needs a nonempty arm set"));
        }
        if budget == 0 {
            return Err(Error::domain("MOSS budget must be at least 1"));
        }
        arms.sort_unstable();
        arms.dedup();
        let (counts, sums): (Vec<u64>, Vec<S>) = arms
            .iter()
            .map(|&i| {
                let (c, mean) = prior(i);
                (c, mean * S::from_u64(c).expect("count is representable"))
            })
            .unzip();
        let state = MossState {
            arms,
            counts,
            sums,
            budget,
        };
        let tree = IndexTree::new((0..state.arms.len()).map(|s| state.index(s)).collect());
        Ok(Self {
            state,
            tree,
            pending: None,
        })
    }

    pub fn state(&self) -> &MossState<S> {
        &self.state
    }

    /// Slot of the arm returned by the last `choose`, until it is observed.
    pub fn pending_slot(&self) -> Option<usize> {
        self.pending
    }

    pub(crate) fn select(&mut self) -> usize {
        let slot = self.tree.best();
        self.pending = Some(slot);
        self.state.arms[slot]
    }

    pub(crate) fn record(&mut self, index: usize, reward: S) -> usize {
        let slot = self.pending.take().expect("observe without a pending choice");
        assert_eq!(self.state.arms[slot], index, "observed arm differs from chosen arm");
        self.state.counts[slot] += 1;
        self.state.sums[slot] = self.state.sums[slot] + reward;
        self.tree.update(slot, self.state.index(slot));
        slot
    }
}

impl<S: Real> Policy<S> for Moss<S> {
    fn choose(&mut self, _arms: &mut dyn ArmRegistry<S>) -> usize {
        self.select()
    }

    fn observe(&mut self, index: usize, reward: S) {
        self.record(index, reward);
    }

    fn arm_set(&self) -> Option<&[usize]> {
        Some(&self.state.arms)
    }
}

/// MOSS over `arm_set` with budget `horizon`.
pub fn make_moss<S: Real>(arm_set: Vec<usize>, horizon: usize) -> Result<Moss<S>> {
    Moss::new(arm_set, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::BanditInstance;
    use crate::pool::ArmPool;
    use crate::rng::{stream_rng, Stream};
    use std::sync::Arc;

    #[test]
    fn index_examples() {
        assert_eq!(moss_index(0.3f64, 0, 100, 4), f64::INFINITY);
        assert_eq!(moss_index(0.5f64, 25, 100, 4), 0.5);
        // Past the log+ boundary the bonus stays zero.
        assert_eq!(moss_index(0.5f64, 50, 100, 4), 0.5);
        let v = moss_index(0.2f64, 1, 100, 4);
        assert!((v - (0.2 + 25f64.ln().sqrt())).abs() < 1e-15);
    }

    #[test]
    fn empty_arm_set_rejected() {
        assert!(make_moss::<f64>(vec![], 10).is_err());
    }

    #[test]
    fn first_pulls_follow_ascending_index() {
        let inst = Arc::new(BanditInstance::bernoulli(&[0.1, 0.9, 0.5, 0.3, 0.7]).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut moss = make_moss::<f64>(vec![4, 2, 0, 3, 1], 100).unwrap();
        let mut rng = stream_rng(1, Stream::Reward);
        let mut order = vec![];
        for _ in 0..5 {
            let a = moss.choose(&mut pool);
            order.push(a);
            let r = pool.sample_arm(a, &mut rng).unwrap();
            moss.observe(a, r);
        }
        assert_eq!(order, vec![0, 1, 2, 3, 4]);
        assert_eq!(moss.state().counts(), &[1, 1, 1, 1, 1]);
    }

    #[test]
    fn single_arm_always_chosen() {
        let inst = Arc::new(BanditInstance::bernoulli(&[0.4, 0.9]).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut moss = make_moss::<f64>(vec![1], 50).unwrap();
        let mut rng = stream_rng(2, Stream::Reward);
        for _ in 0..50 {
            let a = moss.choose(&mut pool);
            assert_eq!(a, 1);
            moss.observe(a, pool.sample_arm(a, &mut rng).unwrap());
        }
    }

    #[test]
    fn running_means_track_rewards() {
        let mut moss = Moss::<f64>::new(vec![0, 1], 10).unwrap();
        let rewards = [(0, 1.0), (1, 0.0), (0, 0.0), (0, 1.0)];
        for &(arm, r) in &rewards {
            moss.pending = moss.state.slot_of(arm);
            moss.record(arm, r);
        }
        assert_eq!(moss.state().counts(), &[3, 1]);
        assert!((moss.state().mean(0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(moss.state().total_pulls(), 4);
    }

    #[test]
    fn argmax_invariant_to_reward_shift() {
        let mut rng = stream_rng(3, Stream::Reward);
        for trial in 0..200 {
            let k = 2 + trial % 6;
            let mut base = Moss::<f64>::new((0..k).collect(), 500).unwrap();
            let mut shifted = Moss::<f64>::new((0..k).collect(), 500).unwrap();
            for _ in 0..40 {
                let arm = rng.random_range(0..k);
                let r: f64 = if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 };
                base.pending = Some(arm);
                base.record(arm, r);
                shifted.pending = Some(arm);
                shifted.record(arm, r + 0.25);
            }
            let mut scores: Vec<f64> = (0..k).map(|s| base.state.index(s)).collect();
            scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
            // Skip histories whose leaders are separated by rounding only.
            if scores[0] - scores[1] > 1e-9 || scores[0] == scores[1] {
                assert_eq!(base.tree.best(), shifted.tree.best());
            }
        }
    }

    use rand::Rng;
}
