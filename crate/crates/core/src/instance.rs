use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arm::ArmDistribution;
use crate::error::{Error, Result};
use crate::hardness::hardness_alpha;
use crate::scalar::Real;

/// An ordered list of real arms with cached best-arm metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct BanditInstance<S> {
    arms: Vec<ArmDistribution<S>>,
    mu_star: S,
    best_set: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture<S> {
    arms: Vec<ArmDistribution<S>>,
}

impl<S: Real> BanditInstance<S> {
    pub fn new(arms: Vec<ArmDistribution<S>>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::domain("an instance needs at least one arm"));
        }
        for arm in &arms {
            arm.validate()?;
        }
        let mu_star = arms
            .iter()
            .map(ArmDistribution::mean)
            .fold(S::neg_infinity(), S::max);
        let best_set = arms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.mean() == mu_star)
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            arms,
            mu_star,
            best_set,
        })
    }

    pub fn bernoulli(means: &[S]) -> Result<Self> {
        means
            .iter()
            .map(|&m| ArmDistribution::bernoulli(m))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    pub fn arms(&self) -> &[ArmDistribution<S>] {
        &self.arms
    }

    pub fn arm(&self, index: usize) -> Option<&ArmDistribution<S>> {
        self.arms.get(index)
    }

    pub fn n(&self) -> usize {
        self.arms.len()
    }

    pub fn m(&self) -> usize {
        self.best_set.len()
    }

    pub fn mu_star(&self) -> S {
        self.mu_star
    }

    pub fn best_set(&self) -> &[usize] {
        &self.best_set
    }

    pub fn mean(&self, index: usize) -> S {
        self.arms[index].mean()
    }

    pub fn means(&self) -> Vec<S> {
        self.arms.iter().map(ArmDistribution::mean).collect()
    }

    /// Hardness level of this instance at `horizon`.
    pub fn hardness(&self, horizon: usize) -> Result<S> {
        hardness_alpha(self.n(), self.m(), horizon)
    }

    /// Same arms in a uniformly random order.
    pub fn shuffled<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut arms = self.arms.clone();
        arms.shuffle(rng);
        Self::new(arms).expect("permutation of a valid instance is valid")
    }

    pub fn to_json(&self) -> Result<String> {
        let fixture = Fixture {
            arms: self.arms.clone(),
        };
        Ok(serde_json::to_string_pretty(&fixture)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let fixture: Fixture<S> = serde_json::from_str(text)?;
        Self::new(fixture.arms)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
