//! Real arms plus virtual mixture arms, addressed by a single pool index.
//!
//! Indices `0..n` are the instance's real arms; mixtures are appended after
//! them. A mixture may only reference entries that already exist, so the
//! pool is acyclic by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::arm::ArmDistribution;
use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::scalar::Real;

/// Weighted mixture over earlier pool entries.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureArm<S> {
    components: Vec<(usize, S)>,
}

impl<S: Real> MixtureArm<S> {
    pub fn new(components: Vec<(usize, S)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        let mut total = S::zero();
        for &(index, w) in &components {
            if !w.is_finite() || w < S::zero() {
                return Err(Error::domain(format!("mixture weight {w} for entry {index} is invalid")));
            }
            total = total + w;
        }
        if (total.as_f64() - 1.0).abs() > S::WEIGHT_TOLERANCE {
            return Err(Error::domain(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    /// Mixture with weights proportional to `counts`; zero counts are dropped.
    pub fn from_counts(entries: impl IntoIterator<Item = (usize, u64)>) -> Result<Self> {
        let entries: Vec<(usize, u64)> = entries.into_iter().filter(|&(_, c)| c > 0).collect();
        let total: u64 = entries.iter().map(|&(_, c)| c).sum();
        if total == 0 {
            return Err(Error::domain("mixture needs at least one pulled component"));
        }
        let denom = S::from_u64(total).expect("count is representable");
        Self::new(
            entries
                .into_iter()
                .map(|(i, c)| (i, S::from_u64(c).expect("count is representable") / denom))
                .collect(),
        )
    }

    pub fn components(&self) -> &[(usize, S)] {
        &self.components
    }
}

#[derive(Clone, Copy, Debug)]
pub enum PoolEntry<'a, S> {
    Real(&'a ArmDistribution<S>),
    Mixture(&'a MixtureArm<S>),
}

/// What a policy may do with the pool: learn its shape and register
/// mixtures. True means stay hidden behind this interface.
pub trait ArmRegistry<S: Real> {
    fn real_arm_count(&self) -> usize;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Append a mixture and return its pool index.
    fn add_mixture(&mut self, mixture: MixtureArm<S>) -> Result<usize>;
}

#[derive(Clone, Debug)]
struct MixtureEntry<S> {
    arm: MixtureArm<S>,
    flat: Vec<(usize, S)>,
    mean: S,
    sampler: WeightedIndex<f64>,
}

#[derive(Clone, Debug)]
pub struct ArmPool<S> {
    instance: Arc<BanditInstance<S>>,
    mixtures: Vec<MixtureEntry<S>>,
}

impl<S: Real> ArmPool<S> {
    pub fn new(instance: Arc<BanditInstance<S>>) -> Self {
        Self {
            instance,
            mixtures: Vec::new(),
        }
    }

    pub fn instance(&self) -> &BanditInstance<S> {
        &self.instance
    }

    pub fn entry(&self, index: usize) -> Result<PoolEntry<'_, S>> {
        let n = self.instance.n();
        if index < n {
            Ok(PoolEntry::Real(&self.instance.arms()[index]))
        } else {
            self.mixtures
                .get(index - n)
                .map(|m| PoolEntry::Mixture(&m.arm))
                .ok_or_else(|| self.bad_index(index))
        }
    }

    fn bad_index(&self, index: usize) -> Error {
        Error::domain(format!("pool index {index} out of range (len {})", ArmRegistry::len(self)))
    }

    /// Expected reward of an entry. For a mixture this is the weighted sum of
    /// its components' means, resolved when the mixture was added.
    pub fn mixture_mean(&self, index: usize) -> Result<S> {
        let n = self.instance.n();
        if index < n {
            Ok(self.instance.mean(index))
        } else {
            self.mixtures
                .get(index - n)
                .map(|m| m.mean)
                .ok_or_else(|| self.bad_index(index))
        }
    }

    /// Unchecked variant of [`Self::mixture_mean`] for hot loops.
    pub(crate) fn mean_of(&self, index: usize) -> S {
        let n = self.instance.n();
        if index < n {
            self.instance.mean(index)
        } else {
            self.mixtures[index - n].mean
        }
    }

    /// Distribution of an entry expressed as weights over real arms,
    /// sorted by real-arm index.
    pub fn flatten_mixture(&self, index: usize) -> Result<Vec<(usize, S)>> {
        let n = self.instance.n();
        if index < n {
            Ok(vec![(index, S::one())])
        } else {
            self.mixtures
                .get(index - n)
                .map(|m| m.flat.clone())
                .ok_or_else(|| self.bad_index(index))
        }
    }

    pub fn sample_arm<R: Rng + ?Sized>(&self, index: usize, rng: &mut R) -> Result<S> {
        let n = self.instance.n();
        if index < n {
            return Ok(self.instance.arms()[index].sample(rng));
        }
        let mixture = self.mixtures.get(index - n).ok_or_else(|| self.bad_index(index))?;
        let real = mixture.flat[mixture.sampler.sample(rng)].0;
        Ok(self.instance.arms()[real].sample(rng))
    }
}

impl<S: Real> ArmRegistry<S> for ArmPool<S> {
    fn real_arm_count(&self) -> usize {
        self.instance.n()
    }

    fn len(&self) -> usize {
        self.instance.n() + self.mixtures.len()
    }

    fn add_mixture(&mut self, mixture: MixtureArm<S>) -> Result<usize> {
        let len = ArmRegistry::len(self);
        let mut mean = S::zero();
        let mut flat: BTreeMap<usize, S> = BTreeMap::new();
        for &(index, w) in mixture.components() {
            if index >= len {
                return Err(Error::domain(format!(
                    "mixture component {index} does not precede new entry {len}"
                )));
            }
            mean = mean + w * self.mean_of(index);
            for (real, v) in self.flatten_mixture(index)? {
                let slot = flat.entry(real).or_insert_with(S::zero);
                *slot = *slot + w * v;
            }
        }
        let flat: Vec<(usize, S)> = flat.into_iter().filter(|&(_, w)| w > S::zero()).collect();
        let sampler = WeightedIndex::new(flat.iter().map(|&(_, w)| w.as_f64()))
            .map_err(|e| Error::domain(format!("mixture weights unusable: {e}")))?;
        self.mixtures.push(MixtureEntry {
            arm: mixture,
            flat,
            mean,
            sampler,
        });
        Ok(len)
    }
}
