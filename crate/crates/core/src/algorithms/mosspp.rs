//! MOSS++ and its empirical variant.
//!
//! The run is split into `p` iterations of geometrically growing length.
//! Iteration `i` restarts MOSS on `K_i` real arms plus one virtual arm per
//! earlier iteration; each virtual arm replays that iteration's empirical
//! pull frequencies.

use std::cmp::Ordering;

use super::moss::{Moss, MossState};
use super::Policy;
use crate::error::{Error, Result};
use crate::pool::{ArmRegistry, MixtureArm};
use crate::rng::{fork, SimRng};
use crate::scalar::{ceil_snapped, pow2_saturating, Real};
use crate::selection::sample_subset;

#[derive(Clone, Debug, PartialEq)]
pub struct MossPPSchedule {
    pub beta: f64,
    pub horizon: usize,
    /// Number of iterations, `ceil(log2 T^beta)` and at least one.
    pub p: usize,
    /// Real arms per iteration, `K_i = 2^(p + 2 - i)`.
    pub arm_counts: Vec<usize>,
    /// Iteration lengths, `min(2^(p + i), T)`.
    pub lengths: Vec<usize>,
}

impl MossPPSchedule {
    pub fn total_length(&self) -> usize {
        self.lengths.iter().fold(0usize, |acc, &l| acc.saturating_add(l))
    }
}

pub fn mosspp_schedule(horizon: usize, beta: f64) -> Result<MossPPSchedule> {
    if !(0.5..=1.0).contains(&beta) {
        return Err(Error::domain(format!("beta={beta} outside [1/2, 1]")));
    }
    if horizon == 0 {
        return Err(Error::domain("horizon must be at least 1"));
    }
    let p = (ceil_snapped(beta * (horizon as f64).log2()) as usize).max(1);
    let arm_counts = (1..=p).map(|i| pow2_saturating(p + 2 - i)).collect();
    let lengths = (1..=p).map(|i| pow2_saturating(p + i).min(horizon)).collect();
    Ok(MossPPSchedule {
        beta,
        horizon,
        p,
        arm_counts,
        lengths,
    })
}

/// How each iteration picks its real arms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetRule {
    /// Fresh uniform subset every iteration (MOSS++).
    Uniform,
    /// After the first iteration, the arms with the highest empirical mean
    /// so far, with statistics carried across iterations (empMOSS++).
    Empirical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub real_arms: Vec<usize>,
    pub mixture_arms: Vec<usize>,
    /// Pulls executed in this iteration.
    pub pulls: usize,
    /// Pool index of the virtual arm built from this iteration.
    pub mixture: Option<usize>,
}

#[derive(Clone, Debug, Default)]
struct ArmStats<S> {
    counts: Vec<u64>,
    sums: Vec<S>,
}

impl<S: Real> ArmStats<S> {
    fn record(&mut self, index: usize, reward: S) {
        if index >= self.counts.len() {
            self.counts.resize(index + 1, 0);
            self.sums.resize(index + 1, S::zero());
        }
        self.counts[index] += 1;
        self.sums[index] = self.sums[index] + reward;
    }

    fn get(&self, index: usize) -> (u64, S) {
        match self.counts.get(index) {
            Some(&c) if c > 0 => (c, self.sums[index] / S::from_u64(c).expect("count is representable")),
            _ => (0, S::zero()),
        }
    }
}

#[derive(Clone, Debug)]
struct Iteration<S> {
    moss: Moss<S>,
    pulls: Vec<u64>,
    executed: usize,
    budget: usize,
    closed: bool,
}

#[derive(Clone, Debug)]
pub struct MossPlusPlus<S> {
    schedule: MossPPSchedule,
    n: usize,
    rule: SubsetRule,
    rng: SimRng,
    current: Option<Iteration<S>>,
    mixtures: Vec<usize>,
    records: Vec<IterationRecord>,
    stats: ArmStats<S>,
    total: usize,
}

impl<S: Real> MossPlusPlus<S> {
    pub fn new(horizon: usize, beta: f64, n: usize, rule: SubsetRule, rng: &mut SimRng) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("MOSS++ needs at least one arm"));
        }
        Ok(Self {
            schedule: mosspp_schedule(horizon, beta)?,
            n,
            rule,
            rng: fork(rng),
            current: None,
            mixtures: Vec::new(),
            records: Vec::new(),
            stats: ArmStats {
                counts: vec![0; n],
                sums: vec![S::zero(); n],
            },
            total: 0,
        })
    }

    pub fn schedule(&self) -> &MossPPSchedule {
        &self.schedule
    }

    pub fn records(&self) -> &[IterationRecord] {
        &self.records
    }

    /// Pool indices of the virtual arms built so far.
    pub fn mixtures(&self) -> &[usize] {
        &self.mixtures
    }

    /// Pulls and empirical mean of a pool entry across all iterations.
    pub fn arm_statistics(&self, index: usize) -> (u64, S) {
        self.stats.get(index)
    }

    pub fn current_state(&self) -> Option<&MossState<S>> {
        self.current.as_ref().map(|it| it.moss.state())
    }

    fn close_iteration(&mut self, arms: &mut dyn ArmRegistry<S>) {
        let Some(it) = self.current.as_mut() else {
            return;
        };
        if it.closed || it.executed == 0 {
            return;
        }
        it.closed = true;
        let counts = it.moss.state().arms().iter().copied().zip(it.pulls.iter().copied());
        let mixture = MixtureArm::from_counts(counts).expect("iteration pulled at least one arm");
        let index = arms
            .add_mixture(mixture)
            .expect("iteration members precede the new mixture");
        self.mixtures.push(index);
        if let Some(record) = self.records.last_mut() {
            record.mixture = Some(index);
        }
    }

    fn top_empirical(&mut self, k: usize) -> Vec<usize> {
        let mut observed: Vec<(usize, S)> = (0..self.n)
            .filter_map(|i| match self.stats.get(i) {
                (0, _) => None,
                (_, mean) => Some((i, mean)),
            })
            .collect();
        observed.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        let mut chosen: Vec<usize> = observed.iter().take(k).map(|&(i, _)| i).collect();
        if chosen.len() < k {
            let unseen: Vec<usize> = (0..self.n).filter(|&i| self.stats.get(i).0 == 0).collect();
            let fill = sample_subset(unseen.len(), k - chosen.len(), &mut self.rng)
                .expect("fill size bounded by unseen arms");
            chosen.extend(fill.into_iter().map(|j| unseen[j]));
        }
        chosen.sort_unstable();
        chosen
    }

    fn open_iteration(&mut self) {
        let i = self.records.len();
        assert!(i < self.schedule.p, "MOSS++ ran past its horizon");
        let k = self.schedule.arm_counts[i].min(self.n);
        let real = if self.rule == SubsetRule::Empirical && i > 0 {
            self.top_empirical(k)
        } else {
            sample_subset(self.n, k, &mut self.rng).expect("k <= n")
        };
        let mut members = real.clone();
        members.extend_from_slice(&self.mixtures);
        let length = self.schedule.lengths[i];
        let moss = match self.rule {
            SubsetRule::Uniform => Moss::new(members, length),
            SubsetRule::Empirical => Moss::with_prior(members, length, |idx| self.stats.get(idx)),
        }
        .expect("iteration arm set is nonempty");
        let slots = moss.state().arms().len();
        self.current = Some(Iteration {
            moss,
            pulls: vec![0; slots],
            executed: 0,
            budget: length.min(self.schedule.horizon - self.total),
            closed: false,
        });
        self.records.push(IterationRecord {
            real_arms: real,
            mixture_arms: self.mixtures.clone(),
            pulls: 0,
            mixture: None,
        });
    }
}

impl<S: Real> Policy<S> for MossPlusPlus<S> {
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize {
        assert!(self.total < self.schedule.horizon, "MOSS++ ran past its horizon");
        let exhausted = self.current.as_ref().is_none_or(|it| it.executed == it.budget);
        if exhausted {
            self.close_iteration(arms);
            self.open_iteration();
        }
        self.current.as_mut().expect("iteration is open").moss.select()
    }

    fn observe(&mut self, index: usize, reward: S) {
        let it = self.current.as_mut().expect("observe without an open iteration");
        let slot = it.moss.record(index, reward);
        it.pulls[slot] += 1;
        it.executed += 1;
        self.total += 1;
        if let Some(record) = self.records.last_mut() {
            record.pulls += 1;
        }
        self.stats.record(index, reward);
    }

    fn finish(&mut self, arms: &mut dyn ArmRegistry<S>) {
        self.close_iteration(arms);
    }
}

pub fn make_mosspp<S: Real>(horizon: usize, beta: f64, n: usize, rng: &mut SimRng) -> Result<MossPlusPlus<S>> {
    MossPlusPlus::new(horizon, beta, n, SubsetRule::Uniform, rng)
}

pub fn make_empmosspp<S: Real>(horizon: usize, beta: f64, n: usize, rng: &mut SimRng) -> Result<MossPlusPlus<S>> {
    MossPlusPlus::new(horizon, beta, n, SubsetRule::Empirical, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::BanditInstance;
    use crate::pool::ArmPool;
    use crate::rng::{stream_rng, Stream};
    use std::sync::Arc;

    fn drive(policy: &mut MossPlusPlus<f64>, pool: &mut ArmPool<f64>, horizon: usize, seed: u64) -> Vec<usize> {
        let mut rng = stream_rng(seed, Stream::Reward);
        let mut chosen = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let a = policy.choose(pool);
            let r = pool.sample_arm(a, &mut rng).unwrap();
            policy.observe(a, r);
            chosen.push(a);
        }
        policy.finish(pool);
        chosen
    }

    #[test]
    fn schedule_at_full_scale() {
        let s = mosspp_schedule(50_000, 0.5).unwrap();
        assert_eq!(s.p, 8);
        assert_eq!(s.arm_counts, vec![512, 256, 128, 64, 32, 16, 8, 4]);
        assert_eq!(s.lengths, vec![512, 1024, 2048, 4096, 8192, 16384, 32768, 50000]);
    }

    #[test]
    fn schedule_tiny_horizon() {
        let s = mosspp_schedule(4, 1.0).unwrap();
        assert_eq!((s.p, s.arm_counts, s.lengths), (2, vec![8, 4], vec![4, 4]));
        let s = mosspp_schedule(1, 0.5).unwrap();
        assert_eq!((s.p, s.lengths), (1, vec![1]));
    }

    #[test]
    fn schedule_rejects_beta() {
        assert!(mosspp_schedule(100, 0.4).is_err());
        assert!(mosspp_schedule(100, 1.01).is_err());
        assert!(mosspp_schedule(0, 0.5).is_err());
    }

    #[test]
    fn schedule_identities_over_range() {
        for step in 0..=5 {
            let beta = 0.5 + 0.1 * step as f64;
            let mut t = 2usize;
            while t <= 1 << 20 {
                let s = mosspp_schedule(t, beta).unwrap();
                let expected_p = (beta * (t as f64).log2() - 1e-9).ceil().max(1.0) as usize;
                assert_eq!(s.p, expected_p, "t={t} beta={beta}");
                for i in 1..=s.p {
                    assert_eq!(s.arm_counts[i - 1], 1 << (s.p + 2 - i));
                    assert_eq!(s.lengths[i - 1], (1usize << (s.p + i)).min(t));
                }
                assert!(s.total_length() >= t);
                // Sparse sweep with dense coverage near powers of two.
                t = if t < 4096 { t + 1 } else { t + t / 97 + 1 };
            }
        }
    }

    #[test]
    fn truncation_at_full_scale() {
        let n = 2000;
        let inst = Arc::new(BanditInstance::bernoulli(&vec![0.5; n]).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut rng = stream_rng(1, Stream::Policy);
        let mut policy = make_mosspp::<f64>(50_000, 0.5, n, &mut rng).unwrap();
        drive(&mut policy, &mut pool, 50_000, 1);
        let pulls: Vec<usize> = policy.records().iter().map(|r| r.pulls).collect();
        assert_eq!(pulls, vec![512, 1024, 2048, 4096, 8192, 16384, 17744]);
        assert_eq!(pulls[..6].iter().sum::<usize>(), 32256);
        assert_eq!(pulls.iter().sum::<usize>(), 50_000);
    }

    #[test]
    fn iteration_sets_and_mixtures() {
        let means: Vec<f64> = (0..300).map(|i| (i % 10) as f64 / 10.0).collect();
        let inst = Arc::new(BanditInstance::bernoulli(&means).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut rng = stream_rng(2, Stream::Policy);
        let horizon = 3000;
        let mut policy = make_mosspp::<f64>(horizon, 0.5, 300, &mut rng).unwrap();
        drive(&mut policy, &mut pool, horizon, 2);
        let schedule = policy.schedule().clone();
        for (i, rec) in policy.records().iter().enumerate() {
            assert_eq!(rec.real_arms.len(), schedule.arm_counts[i].min(300));
            assert_eq!(rec.mixture_arms.len(), i);
            assert_eq!(rec.mixture_arms, policy.mixtures()[..i]);
            let mix = rec.mixture.expect("every executed iteration yields a mixture");
            let flat = pool.flatten_mixture(mix).unwrap();
            let total: f64 = flat.iter().map(|&(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-9);
            let mean = pool.mixture_mean(mix).unwrap();
            let members: Vec<f64> = rec
                .real_arms
                .iter()
                .chain(&rec.mixture_arms)
                .map(|&j| pool.mixture_mean(j).unwrap())
                .collect();
            let lo = members.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = members.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!(mean >= lo - 1e-12 && mean <= hi + 1e-12);
        }
        assert_eq!(policy.records().iter().map(|r| r.pulls).sum::<usize>(), horizon);
    }

    #[test]
    fn chooses_only_visible_arms() {
        let inst = Arc::new(BanditInstance::bernoulli(&vec![0.3; 64]).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut rng = stream_rng(3, Stream::Policy);
        let mut policy = make_empmosspp::<f64>(700, 0.7, 64, &mut rng).unwrap();
        let mut reward_rng = stream_rng(3, Stream::Reward);
        for _ in 0..700 {
            let a = policy.choose(&mut pool);
            assert!(a < ArmRegistry::len(&pool));
            assert!(policy.current_state().unwrap().slot_of(a).is_some());
            let r = pool.sample_arm(a, &mut reward_rng).unwrap();
            policy.observe(a, r);
        }
    }

    #[test]
    fn empirical_variant_keeps_global_counts() {
        let means: Vec<f64> = (0..50).map(|i| (i % 7) as f64 / 7.0).collect();
        let inst = Arc::new(BanditInstance::bernoulli(&means).unwrap());
        let mut pool = ArmPool::new(inst);
        let mut rng = stream_rng(4, Stream::Policy);
        let mut policy = make_empmosspp::<f64>(2000, 0.5, 50, &mut rng).unwrap();
        let chosen = drive(&mut policy, &mut pool, 2000, 4);
        for idx in 0..ArmRegistry::len(&pool) {
            let expected = chosen.iter().filter(|&&a| a == idx).count() as u64;
            assert_eq!(policy.arm_statistics(idx).0, expected, "arm {idx}");
        }
    }

    #[test]
    fn empirical_selection_keeps_the_leader() {
        // n=4 with one strong arm; iteration 1 (16 pulls, K_1 capped at 4)
        // sees every arm, then a K=2 selection is made from its statistics.
        let inst = Arc::new(BanditInstance::bernoulli(&[0.9, 0.1, 0.1, 0.1]).unwrap());
        let mut contained = 0;
        for rep in 0..100u64 {
            let mut pool = ArmPool::new(inst.clone());
            let mut rng = stream_rng(rep, Stream::Policy);
            let mut policy = make_empmosspp::<f64>(64, 0.5, 4, &mut rng).unwrap();
            assert_eq!(policy.schedule().lengths[0], 16);
            drive(&mut policy, &mut pool, 16, rep);
            assert!((0..4).all(|i| policy.arm_statistics(i).0 > 0));
            if policy.top_empirical(2).contains(&0) {
                contained += 1;
            }
        }
        assert!(contained >= 95, "{contained}");
    }

    #[test]
    fn empirical_top_k_is_by_mean() {
        let mut rng = stream_rng(5, Stream::Policy);
        let mut policy = make_empmosspp::<f64>(100, 0.5, 6, &mut rng).unwrap();
        for (arm, r) in [(0, 0.2), (1, 0.9), (2, 0.9), (3, 0.5), (4, 0.1)] {
            policy.stats.record(arm, r);
        }
        assert_eq!(policy.top_empirical(2), vec![1, 2]);
        assert_eq!(policy.top_empirical(3), vec![1, 2, 3]);
        // Only arm 5 is unseen, so it fills the sixth slot.
        assert_eq!(policy.top_empirical(6), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn deterministic_given_seed() {
        let means: Vec<f64> = (0..200).map(|i| (i % 5) as f64 / 5.0).collect();
        let inst = Arc::new(BanditInstance::bernoulli(&means).unwrap());
        let run = |seed| {
            let mut pool = ArmPool::new(inst.clone());
            let mut rng = stream_rng(seed, Stream::Policy);
            let mut policy = make_mosspp::<f64>(1500, 0.6, 200, &mut rng).unwrap();
            drive(&mut policy, &mut pool, 1500, seed)
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}
