//! Uniform subset selection and the probability that it misses every best arm.

use std::collections::HashMap;

use num_traits::{FromPrimitive, Num};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probability that a uniform `k`-subset of `n` arms contains none of the
/// `m` best arms, with its exponential upper bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MissProbability<S> {
    pub exact: S,
    pub bound: S,
}

fn check_selection(n: usize, m: usize, k: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::domain(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    if k > n {
        return Err(Error::domain(format!("subset size k={k} exceeds n={n}")));
    }
    Ok(())
}

/// `prod_{i<k} (n-m-i)/(n-i)`, evaluated in any numeric field.
///
/// With an exact rational type this is the hypergeometric probability
/// `C(n-m, k) / C(n, k)` without rounding.
pub fn exact_miss_probability<Q>(n: usize, m: usize, k: usize) -> Result<Q>
where
    Q: Num + FromPrimitive,
{
    check_selection(n, m, k)?;
    if k > n - m {
        return Ok(Q::zero());
    }
    let count = |x: usize| Q::from_usize(x).expect("count is representable");
    Ok((0..k).fold(Q::one(), |acc, i| acc * count(n - m - i) / count(n - i)))
}

pub fn no_best_selection_prob<S: Real>(n: usize, m: usize, k: usize) -> Result<MissProbability<S>> {
    let exact = exact_miss_probability::<S>(n, m, k)?;
    let bound = (-(S::of_count(m) * S::of_count(k)) / S::of_count(n)).exp();
    Ok(MissProbability { exact, bound })
}

/// Uniform `k`-subset of `0..n`, returned in ascending order.
///
/// Partial Fisher-Yates over a virtual identity array; only displaced
/// positions are stored, so memory is `O(k)`.
pub fn sample_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::domain(format!("subset size k={k} exceeds n={n}")));
    }
    let mut displaced: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
    let mut picked = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let at_j = *displaced.get(&j).unwrap_or(&j);
        let at_i = *displaced.get(&i).unwrap_or(&i);
        displaced.insert(j, at_i);
        picked.push(at_j);
    }
    picked.sort_unstable();
    Ok(picked)
}
