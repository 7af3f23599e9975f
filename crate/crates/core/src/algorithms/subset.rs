use rand::Rng;

use super::moss::{Moss, MossState};
use super::Policy;
use crate::error::{Error, Result};
use crate::pool::ArmRegistry;
use crate::scalar::{ceil_snapped, Real};
use crate::selection::sample_subset;

/// MOSS on a uniformly drawn subset of the real arms.
///
/// This is the `SR` subroutine when the subset size comes from
/// [`sr_subset_size`], and the fixed-exponent baseline when it is
/// `ceil(T^exponent)`.
#[derive(Clone, Debug)]
pub struct SubsetMoss<S> {
    moss: Moss<S>,
}

impl<S: Real> SubsetMoss<S> {
    pub fn with_size<R: Rng + ?Sized>(n: usize, size: usize, horizon: usize, rng: &mut R) -> Result<Self> {
        let subset = sample_subset(n, size.clamp(1, n.max(1)), rng)?;
        Ok(Self {
            moss: Moss::new(subset, horizon)?,
        })
    }

    pub fn subset(&self) -> &[usize] {
        self.moss.state().arms()
    }

    pub fn state(&self) -> &MossState<S> {
        self.moss.state()
    }
}

impl<S: Real> Policy<S> for SubsetMoss<S> {
    fn choose(&mut self, arms: &mut dyn ArmRegistry<S>) -> usize {
        self.moss.choose(arms)
    }

    fn observe(&mut self, index: usize, reward: S) {
        self.moss.observe(index, reward)
    }

    fn arm_set(&self) -> Option<&[usize]> {
        Some(self.subset())
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name}={value} outside [0, 1]")))
    }
}

/// `min{ceil(2 T^alpha ln sqrt(T)), T, n}`, and at least one arm.
pub fn sr_subset_size(horizon: usize, alpha: f64, n: usize) -> usize {
    let t = horizon as f64;
    let raw = ceil_snapped(2.0 * t.powf(alpha) * t.sqrt().ln());
    let size = if raw.is_finite() && raw < usize::MAX as f64 {
        raw as usize
    } else {
        usize::MAX
    };
    size.min(horizon).min(n).max(1)
}

pub fn make_sr<S: Real, R: Rng + ?Sized>(
    horizon: usize,
    alpha: f64,
    n: usize,
    rng: &mut R,
) -> Result<SubsetMoss<S>> {
    check_exponent("alpha", alpha)?;
    SubsetMoss::with_size(n, sr_subset_size(horizon, alpha, n), horizon, rng)
}

/// MOSS on `min{ceil(T^exponent), n}` uniformly drawn arms.
pub fn make_subset_moss_baseline<S: Real, R: Rng + ?Sized>(
    horizon: usize,
    exponent: f64,
    n: usize,
    rng: &mut R,
) -> Result<SubsetMoss<S>> {
    check_exponent("exponent", exponent)?;
    let size = ceil_snapped((horizon as f64).powf(exponent)) as usize;
    SubsetMoss::with_size(n, size.min(n), horizon, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};
    use crate::selection::no_best_selection_prob;

    #[test]
    fn subset_size_examples() {
        assert_eq!(sr_subset_size(100, 0.0, 1_000_000), 5);
        assert_eq!(sr_subset_size(100, 1.0, 1_000_000), 100);
        assert_eq!(sr_subset_size(10_000, 0.5, 50), 50);
        assert_eq!(sr_subset_size(1, 1.0, 10), 1);
    }

    #[test]
    fn baseline_subset_sizes() {
        let mut rng = stream_rng(0, Stream::Policy);
        let p = make_subset_moss_baseline::<f64, _>(50_000, 0.347, 20_000, &mut rng).unwrap();
        assert_eq!(p.subset().len(), 43);
        let p = make_subset_moss_baseline::<f64, _>(50_000, 0.0, 20_000, &mut rng).unwrap();
        assert_eq!(p.subset().len(), 1);
        let p = make_subset_moss_baseline::<f64, _>(500, 1.0, 80, &mut rng).unwrap();
        assert_eq!(p.subset(), (0..80).collect::<Vec<_>>().as_slice());
        assert!(make_subset_moss_baseline::<f64, _>(500, 1.5, 80, &mut rng).is_err());
    }

    #[test]
    fn full_alpha_covers_every_arm() {
        let mut rng = stream_rng(1, Stream::Policy);
        let sr = make_sr::<f64, _>(1000, 1.0, 40, &mut rng).unwrap();
        assert_eq!(sr.subset(), (0..40).collect::<Vec<_>>().as_slice());
    }

    #[test]
    fn same_seed_same_subset() {
        let a = make_sr::<f64, _>(5000, 0.3, 10_000, &mut stream_rng(4, Stream::Policy)).unwrap();
        let b = make_sr::<f64, _>(5000, 0.3, 10_000, &mut stream_rng(4, Stream::Policy)).unwrap();
        assert_eq!(a.subset(), b.subset());
    }

    #[test]
    fn miss_frequency_matches_exact_probability() {
        // Best arms are {0, 1} of 10; SR with a size-3 subset.
        let exact = no_best_selection_prob::<f64>(10, 2, 3).unwrap().exact;
        let mut rng = stream_rng(8, Stream::Policy);
        let trials = 40_000;
        let misses = (0..trials)
            .filter(|_| {
                let p = SubsetMoss::<f64>::with_size(10, 3, 100, &mut rng).unwrap();
                !p.subset().iter().any(|&i| i < 2)
            })
            .count();
        let freq = misses as f64 / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((freq - exact).abs() < 3.0 * se, "freq={freq}");
    }
}
