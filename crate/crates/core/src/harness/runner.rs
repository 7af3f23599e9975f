//! Monte-Carlo driver: replications in parallel, aggregation in order.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::{ExperimentConfig, InstanceConfig, MuStarMode, PolicyConfig};
use super::trace::{pseudo_regret, simulate};
use crate::algorithms::{
    make_anytime, make_empmosspp, make_moss, make_mosspp, make_parallel, make_sr, make_subset_moss_baseline,
    AnytimeKind, Policy,
};
use crate::error::{Error, Result};
use crate::instance::BanditInstance;
use crate::instances::{make_lower_bound_family, make_synthetic};
use crate::pool::ArmPool;
use crate::rng::{replication_seed, stream_rng, SimRng, Stream};
use crate::scalar::{CompensatedSum, Real};

/// Steps at which curves are persisted: `ceil(j T / count)` for
/// `j = 1..=count`, deduplicated. The last entry is always `T`.
pub fn checkpoint_steps(horizon: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, horizon.max(1));
    let mut steps: Vec<usize> = (1..=count)
        .map(|j| (j as u128 * horizon as u128).div_ceil(count as u128) as usize)
        .collect();
    steps.dedup();
    steps
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std<S: Real>(values: &[S]) -> (S, S) {
    if values.is_empty() {
        return (S::zero(), S::zero());
    }
    let count = S::of_count(values.len());
    let mean = values.iter().copied().collect::<CompensatedSum<S>>().value() / count;
    if values.len() == 1 {
        return (mean, S::zero());
    }
    let ss = values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .collect::<CompensatedSum<S>>()
        .value();
    (mean, (ss / S::of_count(values.len() - 1)).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyResult<S> {
    pub label: String,
    pub beta: Option<f64>,
    /// `curves[r][j]`: cumulative pseudo-regret of replication `r` at checkpoint `j`.
    pub curves: Vec<Vec<S>>,
    /// Realized-reward regret at `T` per replication.
    pub realized: Vec<S>,
    pub mean: Vec<S>,
    pub std: Vec<S>,
}

impl<S: Real> PolicyResult<S> {
    pub fn final_values(&self) -> Vec<S> {
        self.curves.iter().map(|c| *c.last().expect("nonempty curve")).collect()
    }

    pub fn final_mean(&self) -> S {
        *self.mean.last().expect("nonempty curve")
    }

    pub fn final_std(&self) -> S {
        *self.std.last().expect("nonempty curve")
    }

    pub fn final_realized_mean(&self) -> S {
        mean_std(&self.realized).0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult<S> {
    pub horizon: usize,
    pub n: usize,
    pub m: usize,
    /// Hardness level reported with the results: the configured level for
    /// synthetic instances, the computed one otherwise.
    pub alpha: f64,
    pub base_seed: u64,
    pub replications: usize,
    pub checkpoints: Vec<usize>,
    pub policies: Vec<PolicyResult<S>>,
}

impl<S: Real> ExperimentResult<S> {
    pub fn policy(&self, label: &str) -> Option<&PolicyResult<S>> {
        self.policies.iter().find(|p| p.label == label)
    }
}

/// Builds the base instance described by the config.
pub fn build_instance<S: Real>(config: &ExperimentConfig) -> Result<BanditInstance<S>> {
    let horizon = config.horizon;
    match &config.instance {
        InstanceConfig::Synthetic { .. } => {
            make_synthetic(&config.instance.synthetic_spec(horizon).expect("synthetic"))
        }
        InstanceConfig::Fixture { path } => BanditInstance::load(path),
        InstanceConfig::LowerBound { .. } => {
            let (spec, member) = config.instance.lower_bound_spec(horizon).expect("lower bound");
            let family = make_lower_bound_family::<S>(&spec)?;
            family
                .instances
                .into_iter()
                .nth(member)
                .ok_or_else(|| Error::config(format!("instance.member={member} exceeds K={}", family.k)))
        }
    }
}

fn resolve_mu_star<S: Real>(mode: MuStarMode, instance: &BanditInstance<S>, label: &str) -> Result<S> {
    let mu = match mode {
        MuStarMode::Exact => instance.mu_star(),
        MuStarMode::Perturbed(delta) => instance.mu_star() + S::of(delta),
    };
    if mu >= S::zero() && mu <= S::one() {
        Ok(mu)
    } else {
        Err(Error::config(format!("policies.{label}.mu_star resolves to {mu}, outside [0, 1]")))
    }
}

fn build_policy<S: Real>(
    policy: &PolicyConfig,
    instance: &BanditInstance<S>,
    horizon: usize,
    rng: &mut SimRng,
) -> Result<Box<dyn Policy<S>>> {
    let n = instance.n();
    let label = policy.label();
    Ok(match *policy {
        PolicyConfig::Moss { .. } => Box::new(make_moss::<S>((0..n).collect(), horizon)?),
        PolicyConfig::Mosspp { beta, .. } => Box::new(make_mosspp::<S>(horizon, beta, n, rng)?),
        PolicyConfig::Empmosspp { beta, .. } => Box::new(make_empmosspp::<S>(horizon, beta, n, rng)?),
        PolicyConfig::Parallel { mu_star, .. } => {
            let mu = resolve_mu_star(mu_star, instance, &label)?;
            Box::new(make_parallel(horizon, mu, n, rng)?)
        }
        PolicyConfig::SubsetMoss { exponent, .. } => {
            Box::new(make_subset_moss_baseline::<S, _>(horizon, exponent, n, rng)?)
        }
        PolicyConfig::Oracle { .. } => {
            let alpha = instance.hardness(horizon)?.as_f64();
            Box::new(make_sr::<S, _>(horizon, alpha, n, rng)?)
        }
        PolicyConfig::AnytimeMosspp { beta, .. } => {
            Box::new(make_anytime(AnytimeKind::MossPlusPlus { beta }, n, rng)?)
        }
        PolicyConfig::AnytimeParallel { mu_star, .. } => {
            let mu = resolve_mu_star(mu_star, instance, &label)?;
            Box::new(make_anytime(AnytimeKind::Parallel { mu_star: mu }, n, rng)?)
        }
    })
}

struct ReplicationOutput<S> {
    curves: Vec<Vec<S>>,
    realized: Vec<S>,
}

fn run_replication<S: Real>(
    config: &ExperimentConfig,
    base: &BanditInstance<S>,
    checkpoints: &[usize],
    replication: usize,
) -> Result<ReplicationOutput<S>> {
    let seed = replication_seed(config.base_seed, replication);
    let instance = if config.shuffle {
        base.shuffled(&mut stream_rng(seed, Stream::Instance))
    } else {
        base.clone()
    };
    let instance = Arc::new(instance);
    let mu_star = instance.mu_star();
    let mut curves = Vec::with_capacity(config.policies.len());
    let mut realized = Vec::with_capacity(config.policies.len());
    for policy_config in &config.policies {
        // Every policy sees the same policy and reward streams.
        let mut policy_rng = stream_rng(seed, Stream::Policy);
        let mut reward_rng = stream_rng(seed, Stream::Reward);
        let mut policy = build_policy(policy_config, &instance, config.horizon, &mut policy_rng)?;
        let mut pool = ArmPool::new(Arc::clone(&instance));
        let trace = simulate(policy.as_mut(), &mut pool, config.horizon, &mut reward_rng)?;
        let curve = pseudo_regret(&trace, mu_star);
        curves.push(checkpoints.iter().map(|&t| curve.at(t)).collect());
        realized.push(trace.realized_regret(mu_star));
    }
    Ok(ReplicationOutput { curves, realized })
}

/// Mean and std per checkpoint across replications.
pub fn aggregate<S: Real>(curves: &[Vec<S>]) -> (Vec<S>, Vec<S>) {
    let width = curves.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| {
            let column: Vec<S> = curves.iter().map(|c| c[j]).collect();
            mean_std(&column)
        })
        .unzip()
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

/// Runs every policy for every replication. `threads` caps the worker
/// count (`None`: all cores); results do not depend on it.
pub fn run_experiment<S: Real>(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentResult<S>> {
    config.validate()?;
    let base = build_instance::<S>(config)?;
    // Surface parameter errors once, before any replication starts.
    for policy in &config.policies {
        build_policy(policy, &base, config.horizon, &mut stream_rng(config.base_seed, Stream::Policy))?;
    }
    let checkpoints = checkpoint_steps(config.horizon, config.checkpoints);
    let outputs: Vec<ReplicationOutput<S>> = thread_pool(threads)?.install(|| {
        (0..config.replications)
            .into_par_iter()
            .map(|r| run_replication(config, &base, &checkpoints, r))
            .collect::<Result<_>>()
    })?;

    let policies = config
        .policies
        .iter()
        .enumerate()
        .map(|(p, policy)| {
            let curves: Vec<Vec<S>> = outputs.iter().map(|o| o.curves[p].clone()).collect();
            let realized = outputs.iter().map(|o| o.realized[p]).collect();
            let (mean, std) = aggregate(&curves);
            PolicyResult {
                label: policy.label(),
                beta: policy.beta(),
                curves,
                realized,
                mean,
                std,
            }
        })
        .collect();

    let alpha = match &config.instance {
        InstanceConfig::Synthetic { alpha, .. } => *alpha,
        _ => base.hardness(config.horizon)?.as_f64(),
    };
    Ok(ExperimentResult {
        horizon: config.horizon,
        n: base.n(),
        m: base.m(),
        alpha,
        base_seed: config.base_seed,
        replications: config.replications,
        checkpoints,
        policies,
    })
}

/// One `run_experiment` per entry of `alpha_grid`, on the synthetic family.
pub fn sweep_alpha<S: Real>(config: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<ExperimentResult<S>>> {
    let grid = match &config.alpha_grid {
        Some(grid) if !grid.is_empty() => grid,
        _ => return Err(Error::config("alpha_grid must be a nonempty list for a sweep")),
    };
    if !matches!(config.instance, InstanceConfig::Synthetic { .. }) {
        return Err(Error::config("sweep requires instance.kind = \"synthetic\""));
    }
    config.validate()?;
    grid.iter()
        .map(|&a| {
            let mut point = config.clone();
            if let InstanceConfig::Synthetic { alpha, .. } = &mut point.instance {
                *alpha = a;
            }
            run_experiment(&point, threads)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(policies: Vec<PolicyConfig>, horizon: usize, replications: usize) -> ExperimentConfig {
        ExperimentConfig {
            instance: InstanceConfig::Synthetic {
                n: 50,
                alpha: 0.3,
                best_mean: 0.9,
                suboptimal_means: vec![0.1, 0.5],
                epsilon: 0.0,
            },
            policies,
            horizon,
            replications,
            base_seed: 7,
            alpha_grid: None,
            output: None,
            checkpoints: 10,
            shuffle: true,
        }
    }

    #[test]
    fn checkpoints_end_at_horizon() {
        assert_eq!(checkpoint_steps(10, 100), (1..=10).collect::<Vec<_>>());
        assert_eq!(checkpoint_steps(1000, 4), vec![250, 500, 750, 1000]);
        assert_eq!(checkpoint_steps(7, 3), vec![3, 5, 7]);
        let steps = checkpoint_steps(50000, 100);
        assert_eq!(steps.len(), 100);
        assert_eq!(*steps.last().unwrap(), 50000);
    }

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[3.0_f64]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0_f64, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0_f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = config(
            vec![
                PolicyConfig::Moss { label: None },
                PolicyConfig::Mosspp { beta: 0.5, label: None },
                PolicyConfig::Parallel { mu_star: MuStarMode::Exact, label: None },
            ],
            400,
            6,
        );
        let one = run_experiment::<f64>(&c, Some(1)).unwrap();
        let four = run_experiment::<f64>(&c, Some(4)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.policies.len(), 3);
        assert_eq!(one.policies[0].curves.len(), 6);
    }

    #[test]
    fn perturbed_mu_star_out_of_range_rejected() {
        let c = config(
            vec![PolicyConfig::Parallel { mu_star: MuStarMode::Perturbed(0.2), label: None }],
            100,
            1,
        );
        assert!(matches!(run_experiment::<f64>(&c, Some(1)), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_requires_grid() {
        let mut c = config(vec![PolicyConfig::Moss { label: None }], 100, 1);
        let err = sweep_alpha::<f64>(&c, Some(1)).unwrap_err();
        assert!(err.to_string().contains("alpha_grid"));
        c.alpha_grid = Some(vec![]);
        assert!(sweep_alpha::<f64>(&c, Some(1)).unwrap_err().to_string().contains("alpha_grid"));
        c.alpha_grid = Some(vec![0.2, 0.6]);
        let rows = sweep_alpha::<f64>(&c, Some(1)).unwrap();
        assert_eq!(rows.iter().map(|r| r.alpha).collect::<Vec<_>>(), vec![0.2, 0.6]);
    }
}
