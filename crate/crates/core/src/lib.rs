//! Simulation library for many-armed stochastic bandits with unknown
//! hardness: instance generators, MOSS and its adaptive variants, and a
//! seeded, parallel experiment harness.
//!
//! Numeric code is generic over [`Real`] (`f64` or `f32`); the aliases
//! below fix `f64`, with `F32` variants for the single-precision build.
//!
//! ```
//! use bandit_bench::{make_synthetic, SyntheticSpec, Instance};
//!
//! let instance: Instance = make_synthetic(&SyntheticSpec::new(1000, 10_000, 0.5)).unwrap();
//! assert_eq!(instance.m(), 5);
//! ```

pub mod algorithms;
pub mod arm;
pub mod error;
pub mod hardness;
pub mod harness;
pub mod ingest;
pub mod instance;
pub mod instances;
pub mod pool;
pub mod rng;
pub mod scalar;
pub mod selection;

pub use algorithms::Policy;
pub use arm::ArmDistribution;
pub use error::{Error, Result};
pub use hardness::{best_arm_count, hardness_alpha, HardnessParams};
pub use harness::{run_experiment, sweep_alpha, ExperimentConfig};
pub use ingest::{load_ratings, parse_ratings, ratings_to_means, RatingsTable};
pub use instance::BanditInstance;
pub use instances::{make_lower_bound_family, make_synthetic, LowerBoundFamily, LowerBoundFamilySpec, SyntheticSpec};
pub use pool::{ArmPool, ArmRegistry, MixtureArm};
pub use rng::{SimRng, Stream};
pub use scalar::Real;
pub use selection::{exact_miss_probability, no_best_selection_prob, sample_subset, MissProbability};

pub type Arm = ArmDistribution<f64>;
pub type Instance = BanditInstance<f64>;
pub type Pool = ArmPool<f64>;
pub type Mixture = MixtureArm<f64>;
pub type Results = harness::ExperimentResult<f64>;
pub type Trace = harness::RunTrace<f64>;

pub type ArmF32 = ArmDistribution<f32>;
pub type InstanceF32 = BanditInstance<f32>;
pub type PoolF32 = ArmPool<f32>;
pub type ResultsF32 = harness::ExperimentResult<f32>;
