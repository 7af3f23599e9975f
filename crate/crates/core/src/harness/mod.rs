//! Experiment harness: simulation, regret accounting, configuration,
//! the replication runner and persisted outputs.

pub mod config;
pub mod output;
pub mod runner;
pub mod trace;

pub use config::{ExperimentConfig, InstanceConfig, MuStarMode, PolicyConfig, DEFAULT_CHECKPOINTS, DEFAULT_SEED};
pub use output::{load_curves, load_summary, write_run, write_sweep, CurveRow, SummaryEntry};
pub use runner::{
    aggregate, build_instance, checkpoint_steps, mean_std, run_experiment, sweep_alpha, ExperimentResult,
    PolicyResult,
};
pub use trace::{pseudo_regret, regret_decomposition, simulate, RegretCurve, RegretDecomposition, RunTrace, Step};
