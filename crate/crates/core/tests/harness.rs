use std::path::Path;

use bandit_bench::harness::{
    run_experiment, sweep_alpha, ExperimentConfig, InstanceConfig, MuStarMode, PolicyConfig,
};
use bandit_bench::{BanditInstance, Instance};

fn fixture_config(path: &Path, policies: Vec<PolicyConfig>, horizon: usize, replications: usize) -> ExperimentConfig {
    ExperimentConfig {
        instance: InstanceConfig::Fixture { path: path.to_path_buf() },
        policies,
        horizon,
        replications,
        base_seed: 1,
        alpha_grid: None,
        output: None,
        checkpoints: 50,
        shuffle: true,
    }
}

fn write_fixture(dir: &Path, means: &[f64]) -> std::path::PathBuf {
    let path = dir.join("instance.json");
    Instance::bernoulli(means).unwrap().save(&path).unwrap();
    path
}

fn every_policy() -> Vec<PolicyConfig> {
    vec![
        PolicyConfig::Moss { label: None },
        PolicyConfig::Mosspp { beta: 0.5, label: None },
        PolicyConfig::Empmosspp { beta: 0.5, label: None },
        PolicyConfig::Parallel { mu_star: MuStarMode::Exact, label: None },
        PolicyConfig::SubsetMoss { exponent: 0.347, label: None },
        PolicyConfig::Oracle { label: None },
        PolicyConfig::AnytimeMosspp { beta: 0.5, label: None },
        PolicyConfig::AnytimeParallel { mu_star: MuStarMode::Exact, label: None },
    ]
}

#[test]
fn single_arm_gives_zero_curve() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fixture(dir.path(), &[0.7]);
    let mut config = fixture_config(&path, every_policy(), 64, 1);
    config.checkpoints = 64;
    let result = run_experiment::<f64>(&config, None).unwrap();
    assert_eq!((result.n, result.m), (1, 1));
    for p in &result.policies {
        assert!(p.curves[0].iter().all(|&v| v == 0.0), "{}", p.label);
        assert!(p.std.iter().all(|&v| v == 0.0), "{}", p.label);
    }
}

#[test]
fn moss_two_arms_agrees_with_larger_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_fixture(dir.path(), &[0.9, 0.1]);
    let moss = vec![PolicyConfig::Moss { label: None }];
    let small = run_experiment::<f64>(&fixture_config(&path, moss.clone(), 5000, 100), None).unwrap();
    let mut big_config = fixture_config(&path, moss, 5000, 1000);
    big_config.base_seed = 1 << 40;
    let big = run_experiment::<f64>(&big_config, None).unwrap();
    let (a, b) = (&small.policies[0], &big.policies[0]);
    let se = (a.final_std().powi(2) / 100.0 + b.final_std().powi(2) / 1000.0).sqrt();
    let gap = (a.final_mean() - b.final_mean()).abs();
    assert!(gap <= 3.0 * se, "gap {gap} vs 3 se {}", 3.0 * se);
    assert!(a.final_mean() > 0.0);
}

#[test]
fn curves_nondecreasing_and_end_at_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let means: Vec<f64> = (0..40).map(|i| 0.2 + 0.7 * (i % 7) as f64 / 6.0).collect();
    let path = write_fixture(dir.path(), &means);
    let result = run_experiment::<f64>(&fixture_config(&path, every_policy(), 700, 3), None).unwrap();
    assert_eq!(*result.checkpoints.last().unwrap(), 700);
    for p in &result.policies {
        for curve in &p.curves {
            assert!(curve.windows(2).all(|w| w[1] >= w[0] - 1e-12), "{}", p.label);
        }
    }
}

#[test]
fn single_point_sweep_matches_run() {
    let config = ExperimentConfig {
        instance: InstanceConfig::Synthetic {
            n: 200,
            alpha: 0.0,
            best_mean: 0.9,
            suboptimal_means: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            epsilon: 0.0,
        },
        policies: vec![PolicyConfig::Moss { label: None }, PolicyConfig::Mosspp { beta: 0.5, label: None }],
        horizon: 1000,
        replications: 4,
        base_seed: 9,
        alpha_grid: Some(vec![0.0]),
        output: None,
        checkpoints: 10,
        shuffle: true,
    };
    let sweep = sweep_alpha::<f64>(&config, Some(2)).unwrap();
    assert_eq!(sweep.len(), 1);
    assert_eq!(sweep[0], run_experiment::<f64>(&config, Some(3)).unwrap());
}

#[test]
fn sweep_has_one_row_per_alpha_and_policy() {
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let config = ExperimentConfig {
        instance: InstanceConfig::Synthetic {
            n: 20000,
            alpha: 0.5,
            best_mean: 0.9,
            suboptimal_means: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            epsilon: 0.0,
        },
        policies: vec![PolicyConfig::SubsetMoss { exponent: 0.347, label: None }],
        horizon: 50000,
        replications: 1,
        base_seed: 3,
        alpha_grid: Some(grid.clone()),
        output: None,
        checkpoints: 1,
        shuffle: false,
    };
    let sweep = sweep_alpha::<f64>(&config, None).unwrap();
    assert_eq!(sweep.iter().map(|r| r.alpha).collect::<Vec<_>>(), grid);
    for r in &sweep {
        let expected = bandit_bench::best_arm_count::<f64>(20000, 50000, r.alpha);
        assert_eq!(r.m, expected);
    }
}

#[test]
fn single_precision_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("i.json");
    BanditInstance::<f32>::bernoulli(&[0.9, 0.5, 0.4, 0.1]).unwrap().save(&path).unwrap();
    let config = fixture_config(&path, every_policy(), 2000, 4);
    let single = run_experiment::<f32>(&config, None).unwrap();
    let double = run_experiment::<f64>(&config, None).unwrap();
    for (s, d) in single.policies.iter().zip(&double.policies) {
        assert!(s.final_mean() >= 0.0 && s.final_mean() <= 2000.0 * 0.8);
        assert_eq!(s.curves.len(), d.curves.len());
    }
}

#[test]
fn lower_bound_member_runs() {
    let config = ExperimentConfig {
        instance: InstanceConfig::LowerBound {
            alpha: 0.5,
            alpha_prime: 0.0,
            m: 2,
            delta: 0.5,
            member: 3,
        },
        policies: vec![PolicyConfig::Moss { label: None }],
        horizon: 100,
        replications: 2,
        base_seed: 5,
        alpha_grid: None,
        output: None,
        checkpoints: 5,
        shuffle: false,
    };
    let result = run_experiment::<f64>(&config, None).unwrap();
    assert_eq!((result.n, result.m), (38, 2));
}

#[test]
fn missing_fixture_is_io_error() {
    let config = fixture_config(Path::new("/nonexistent/instance.json"), every_policy(), 10, 1);
    assert!(run_experiment::<f64>(&config, None).unwrap_err().is_io());
}
