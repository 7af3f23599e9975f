//! Doubling-trick wrapper: segment `i` runs a fresh fixed-horizon policy
//! for `2^i` pulls, for as long as the caller keeps asking.

use super::mosspp::make_mosspp;
use super::parallel::make_parallel;
use super::Policy;
use crate::error::{Error, Result};
use crate::pool::ArmRegistry;
use crate::rng::{fork, SimRng};
use crate::scalar::{pow2_saturating, Real};

/// Builds the inner policy for a segment of the given horizon.
pub type PolicyFactory<S> = Box<dyn FnMut(usize, &mut SimRng) -> Result<Box<dyn Policy<S>>> + Send>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnytimeKind<S> {
    MossPlusPlus { beta: f64 },
    Parallel { mu_star: S },
}

pub struct Anytime<S> {
    factory: PolicyFactory<S>,
    rng: SimRng,
    inner: Option<Box<dyn Policy<S>>>,
    next_segment: usize,
    remaining: usize,
    segments: Vec<usize>,
}

impl<S: Real> Anytime<S> {
    pub fn new(factory: PolicyFactory<S>, rng: &mut SimRng) -> Self {
        Self {
            factory,
            rng: fork(rng),
            inner: None,
            next_segment: 0,
            remaining: 0,
            segments: Vec::new(),
        }
    }

    /// Pulls executed in each segment so far.
    pub fn segments(&self) -> &[usize] {
        &self.segments
    }

    fn start_segment(&mut self, arms: &mut dyn ArmRegistry<S>) {
        if let Some(inner) = self.inner.as_mut() {
            inner.finish(arms);
        }
        let horizon = pow2_saturating(self.next_segment);
        let inner = (self.factory)(horizon, &mut self.rng).expect("anytime factory validated at construction");
        self.inner = Some(inner);
        self.remaining = horizon;
        self.next_segment += 1;
        self.segments.push(0);
    }
}

impl<S: Real> Policy<S> for Anytime<S> {
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize {
        if self.remaining == 0 {
            self.start_segment(arms);
        }
        self.inner.as_mut().expect("segment is running").choose(arms)
    }

    fn observe(&mut self, index: usize, reward: S) {
        self.inner.as_mut().expect("observe without a segment").observe(index, reward);
        self.remaining -= 1;
        *self.segments.last_mut().expect("segment is running") += 1;
    }

    fn finish(&mut self, arms: &mut dyn ArmRegistry<S>) {
        if let Some(inner) = self.inner.as_mut() {
            inner.finish(arms);
        }
    }
}

/// Anytime MOSS++ (segment `i` uses `p = ceil(i * beta)`) or anytime Parallel.
pub fn make_anytime<S: Real>(kind: AnytimeKind<S>, n: usize, rng: &mut SimRng) -> Result<Anytime<S>> {
    let factory: PolicyFactory<S> = match kind {
        AnytimeKind::MossPlusPlus { beta } => {
            let mut probe = fork(rng);
            make_mosspp::<S>(2, beta, n, &mut probe)?;
            Box::new(move |horizon, rng| Ok(Box::new(make_mosspp::<S>(horizon, beta, n, rng)?) as Box<dyn Policy<S>>))
        }
        AnytimeKind::Parallel { mu_star } => {
            if !(mu_star >= S::zero() && mu_star <= S::one()) || n == 0 {
                return Err(Error::domain(format!("mu_star={mu_star} outside [0, 1] or no arms")));
            }
            Box::new(move |horizon, rng| Ok(Box::new(make_parallel(horizon, mu_star, n, rng)?) as Box<dyn Policy<S>>))
        }
    };
    Ok(Anytime::new(factory, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::mosspp_schedule;
    use crate::instance::BanditInstance;
    use crate::pool::ArmPool;
    use crate::rng::{stream_rng, Stream};
    use std::sync::{Arc, Mutex};

    fn run(policy: &mut dyn Policy<f64>, inst: &Arc<BanditInstance<f64>>, horizon: usize) -> Vec<usize> {
        let mut pool = ArmPool::new(inst.clone());
        let mut rng = stream_rng(0, Stream::Reward);
        let chosen = (0..horizon)
            .map(|_| {
                let a = policy.choose(&mut pool);
                policy.observe(a, pool.sample_arm(a, &mut rng).unwrap());
                a
            })
            .collect();
        policy.finish(&mut pool);
        chosen
    }

    #[test]
    fn segment_lengths_double() {
        let inst = Arc::new(BanditInstance::bernoulli(&vec![0.5; 30]).unwrap());
        for kind in [AnytimeKind::MossPlusPlus { beta: 0.5 }, AnytimeKind::Parallel { mu_star: 0.5 }] {
            let mut policy = make_anytime(kind, 30, &mut stream_rng(1, Stream::Policy)).unwrap();
            run(&mut policy, &inst, 100);
            assert_eq!(policy.segments(), &[1, 2, 4, 8, 16, 32, 37]);
        }
    }

    #[test]
    fn first_segment_regret_at_most_one() {
        let inst = Arc::new(BanditInstance::bernoulli(&[0.0, 1.0, 0.3]).unwrap());
        let mut policy = make_anytime(AnytimeKind::MossPlusPlus { beta: 0.7 }, 3, &mut stream_rng(2, Stream::Policy)).unwrap();
        let chosen = run(&mut policy, &inst, 1);
        assert_eq!(chosen.len(), 1);
        assert!(inst.mu_star() - inst.mean(chosen[0]) <= 1.0);
    }

    #[test]
    fn each_segment_gets_a_fresh_policy_with_its_own_horizon() {
        let horizons = Arc::new(Mutex::new(Vec::new()));
        let seen = horizons.clone();
        let factory: PolicyFactory<f64> = Box::new(move |h, rng| {
            seen.lock().unwrap().push(h);
            Ok(Box::new(make_mosspp::<f64>(h, 0.6, 20, rng)?) as Box<dyn Policy<f64>>)
        });
        let mut policy = Anytime::new(factory, &mut stream_rng(3, Stream::Policy));
        let inst = Arc::new(BanditInstance::bernoulli(&[0.4; 20]).unwrap());
        run(&mut policy, &inst, 40);
        assert_eq!(*horizons.lock().unwrap(), vec![1, 2, 4, 8, 16, 32]);
        // Segment i of anytime MOSS++ runs ceil(i * beta) iterations.
        for i in 1..12usize {
            let s = mosspp_schedule(1 << i, 0.6).unwrap();
            assert_eq!(s.p, (i as f64 * 0.6 - 1e-9).ceil() as usize);
        }
    }

    #[test]
    fn invalid_parameters_rejected_up_front() {
        let mut rng = stream_rng(4, Stream::Policy);
        assert!(make_anytime::<f64>(AnytimeKind::MossPlusPlus { beta: 0.2 }, 10, &mut rng).is_err());
        assert!(make_anytime::<f64>(AnytimeKind::Parallel { mu_star: 2.0 }, 10, &mut rng).is_err());
    }
}
