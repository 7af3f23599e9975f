//! Bandit policies.
//!
//! Every policy is a state machine driven by alternating
//! [`Policy::choose`] / [`Policy::observe`] calls. A policy only ever sees
//! pool indices and rewards; [`Parallel`] is the one policy that is also
//! told the best mean.

mod anytime;
mod index_tree;
mod moss;
mod mosspp;
mod parallel;
mod subset;

pub use anytime::{make_anytime, Anytime, AnytimeKind, PolicyFactory};
pub use moss::{make_moss, moss_index, Moss, MossState};
pub use mosspp::{
    make_empmosspp, make_mosspp, mosspp_schedule, IterationRecord, MossPPSchedule, MossPlusPlus,
    SubsetRule,
};
pub use parallel::{make_parallel, BlockRecord, Parallel};
pub use subset::{make_sr, make_subset_moss_baseline, sr_subset_size, SubsetMoss};

use crate::pool::ArmRegistry;
use crate::scalar::Real;

pub trait Policy<S: Real>: Send {
    /// Pool index to pull next. May register mixture arms in `arms`.
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize;

    /// Reward for the index returned by the preceding `choose`.
    fn observe(&mut self, index: usize, reward: S);

    /// Called once after the last observation of a run.
    fn finish(&mut self, _arms: &mut dyn ArmRegistry<S>) {}

    /// The fixed arm set this policy restricts itself to, if any.
    fn arm_set(&self) -> Option<&[usize]> {
        None
    }
}

impl<S: Real> Policy<S> for Box<dyn Policy<S>> {
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize {
        (**self).choose(arms)
    }

    fn observe(&mut self, index: usize, reward: S) {
        (**self).observe(index, reward)
    }

    fn finish(&mut self, arms: &mut dyn ArmRegistry<S>) {
        (**self).finish(arms)
    }

    fn arm_set(&self) -> Option<&[usize]> {
        (**self).arm_set()
    }
}
