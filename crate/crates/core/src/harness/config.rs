//! Experiment configuration, read from TOML or JSON.
//!
//! ```toml
//! horizon = 20000
//! replications = 50
//! base_seed = 2020
//! alpha_grid = [0.1, 0.3, 0.5, 0.7]
//!
//! [instance]
//! kind = "synthetic"
//! n = 8000
//! alpha = 0.25
//!
//! [[policies]]
//! kind = "moss"
//!
//! [[policies]]
//! kind = "mosspp"
//! beta = 0.5
//!
//! [[policies]]
//! kind = "parallel"
//! mu_star = { perturbed = 0.001 }
//! ```
//!
//! Unknown keys are rejected everywhere.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::{LowerBoundFamilySpec, SyntheticSpec};

/// Base seed used when a configuration does not name one.
pub const DEFAULT_SEED: u64 = 2020;

pub const DEFAULT_CHECKPOINTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    pub policies: Vec<PolicyConfig>,
    pub horizon: usize,
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Evenly spaced steps persisted per curve; the final step is always kept.
    #[serde(default = "default_checkpoints")]
    pub checkpoints: usize,
    /// Randomly permute arm positions in every replication.
    #[serde(default = "default_shuffle")]
    pub shuffle: bool,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_checkpoints() -> usize {
    DEFAULT_CHECKPOINTS
}

fn default_shuffle() -> bool {
    true
}

fn default_beta() -> f64 {
    0.5
}

fn default_exponent() -> f64 {
    0.347
}

fn default_best_mean() -> f64 {
    0.9
}

fn default_suboptimal_means() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}

fn default_delta() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceConfig {
    Synthetic {
        n: usize,
        alpha: f64,
        #[serde(default = "default_best_mean")]
        best_mean: f64,
        #[serde(default = "default_suboptimal_means")]
        suboptimal_means: Vec<f64>,
        #[serde(default)]
        epsilon: f64,
    },
    /// A JSON instance fixture; relative paths resolve against the config file.
    Fixture { path: PathBuf },
    /// One member (0..=K) of the lower-bound family.
    LowerBound {
        alpha: f64,
        alpha_prime: f64,
        m: usize,
        #[serde(default = "default_delta")]
        delta: f64,
        #[serde(default)]
        member: usize,
    },
}

impl InstanceConfig {
    pub fn synthetic_spec(&self, horizon: usize) -> Option<SyntheticSpec> {
        match self {
            InstanceConfig::Synthetic {
                n,
                alpha,
                best_mean,
                suboptimal_means,
                epsilon,
            } => Some(SyntheticSpec {
                n: *n,
                horizon,
                alpha: *alpha,
                best_mean: *best_mean,
                suboptimal_means: suboptimal_means.clone(),
                epsilon: *epsilon,
            }),
            _ => None,
        }
    }

    pub fn lower_bound_spec(&self, horizon: usize) -> Option<(LowerBoundFamilySpec, usize)> {
        match *self {
            InstanceConfig::LowerBound {
                alpha,
                alpha_prime,
                m,
                delta,
                member,
            } => Some((
                LowerBoundFamilySpec {
                    horizon,
                    alpha,
                    alpha_prime,
                    m,
                    delta,
                },
                member,
            )),
            _ => None,
        }
    }
}

/// How Parallel learns the best mean.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuStarMode {
    #[default]
    Exact,
    /// The true best mean plus a fixed offset.
    Perturbed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    Moss {
        #[serde(default)]
        label: Option<String>,
    },
    Mosspp {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        label: Option<String>,
    },
    Empmosspp {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        label: Option<String>,
    },
    Parallel {
        #[serde(default)]
        mu_star: MuStarMode,
        #[serde(default)]
        label: Option<String>,
    },
    /// MOSS on `ceil(T^exponent)` uniformly drawn arms.
    SubsetMoss {
        #[serde(default = "default_exponent")]
        exponent: f64,
        #[serde(default)]
        label: Option<String>,
    },
    /// SR with the instance's true hardness level.
    Oracle {
        #[serde(default)]
        label: Option<String>,
    },
    AnytimeMosspp {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default)]
        label: Option<String>,
    },
    AnytimeParallel {
        #[serde(default)]
        mu_star: MuStarMode,
        #[serde(default)]
        label: Option<String>,
    },
}

impl PolicyConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PolicyConfig::Moss { .. } => "moss",
            PolicyConfig::Mosspp { .. } => "mosspp",
            PolicyConfig::Empmosspp { .. } => "empmosspp",
            PolicyConfig::Parallel { .. } => "parallel",
            PolicyConfig::SubsetMoss { .. } => "subset_moss",
            PolicyConfig::Oracle { .. } => "oracle",
            PolicyConfig::AnytimeMosspp { .. } => "anytime_mosspp",
            PolicyConfig::AnytimeParallel { .. } => "anytime_parallel",
        }
    }

    /// Name used in output files.
    pub fn label(&self) -> String {
        let explicit = match self {
            PolicyConfig::Moss { label }
            | PolicyConfig::Mosspp { label, .. }
            | PolicyConfig::Empmosspp { label, .. }
            | PolicyConfig::Parallel { label, .. }
            | PolicyConfig::SubsetMoss { label, .. }
            | PolicyConfig::Oracle { label }
            | PolicyConfig::AnytimeMosspp { label, .. }
            | PolicyConfig::AnytimeParallel { label, .. } => label.clone(),
        };
        explicit.unwrap_or_else(|| self.kind_name().to_string())
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            PolicyConfig::Mosspp { beta, .. }
            | PolicyConfig::Empmosspp { beta, .. }
            | PolicyConfig::AnytimeMosspp { beta, .. } => Some(beta),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let label = self.label();
        if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
            return Err(Error::config(format!("policy label `{label}` must be nonempty plain text")));
        }
        if let Some(beta) = self.beta() {
            if !(0.5..=1.0).contains(&beta) {
                return Err(Error::config(format!("policies.{label}.beta={beta} outside [0.5, 1]")));
            }
        }
        match *self {
            PolicyConfig::SubsetMoss { exponent, .. } if !(0.0..=1.0).contains(&exponent) => Err(Error::config(
                format!("policies.{label}.exponent={exponent} outside [0, 1]"),
            )),
            PolicyConfig::Parallel { mu_star: MuStarMode::Perturbed(d), .. }
            | PolicyConfig::AnytimeParallel { mu_star: MuStarMode::Perturbed(d), .. }
                if !d.is_finite() =>
            {
                Err(Error::config(format!("policies.{label}.mu_star perturbation must be finite")))
            }
            _ => Ok(()),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Load by extension (`.json`, otherwise TOML). Relative fixture paths
    /// are rebased onto the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut config = if is_json {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
        .map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        if let InstanceConfig::Fixture { path: fixture } = &mut config.instance {
            if fixture.is_relative() {
                if let Some(dir) = path.parent() {
                    *fixture = dir.join(&*fixture);
                }
            }
        }
        Ok(config)
    }

    /// Checks everything that can be checked without loading the instance.
    pub fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(Error::config(format!("horizon={} must be at least 2", self.horizon)));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.checkpoints == 0 {
            return Err(Error::config("checkpoints must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies must list at least one policy"));
        }
        let mut seen = HashSet::new();
        for policy in &self.policies {
            policy.validate()?;
            if !seen.insert(policy.label()) {
                return Err(Error::config(format!(
                    "duplicate policy label `{}`; set `label` to disambiguate",
                    policy.label()
                )));
            }
        }
        if let Some(grid) = &self.alpha_grid {
            if let Some(a) = grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(Error::config(format!("alpha_grid entry {a} outside [0, 1]")));
            }
        }
        if let Some(spec) = self.instance.synthetic_spec(self.horizon) {
            spec.validate().map_err(|e| Error::config(format!("instance: {e}")))?;
        }
        if let Some((spec, member)) = self.instance.lower_bound_spec(self.horizon) {
            let (k, _, _) = crate::instances::lower_bound_layout(&spec)
                .map_err(|e| Error::config(format!("instance: {e}")))?;
            if member > k {
                return Err(Error::config(format!("instance.member={member} exceeds K={k}")));
            }
        }
        Ok(())
    }
}
