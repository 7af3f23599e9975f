use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandit_bench::harness::{self, ExperimentConfig};
use bandit_bench::ingest::{self, DEFAULT_THRESHOLD};
use bandit_bench::instances::{make_lower_bound_family, make_synthetic, LowerBoundFamilySpec, SyntheticSpec};
use bandit_bench::{hardness_alpha, Error, Instance};
use clap::{Args, Parser, Subcommand};

/// Many-armed bandit experiments: simulate, sweep hardness, ingest ratings.
#[derive(Debug, Parser)]
#[command(name = "bandit-bench", version)]
struct Cli {
    /// Maximum worker threads [default: available cores]
    #[arg(long, global = true, env = "BANDIT_BENCH_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured policy on the configured instance
    Run(RunArgs),
    /// Run the configuration once per entry of `alpha_grid`
    Sweep(RunArgs),
    /// Turn a star-ratings CSV (id,stars1,stars2,stars3) into an instance fixture
    Ingest(IngestArgs),
    /// Write generated instances as JSON fixtures
    #[command(subcommand)]
    ExportFixture(ExportCommand),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment config (.toml or .json)
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: config `output`, else "results"]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's base_seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Ratings CSV
    #[arg(long)]
    ratings: PathBuf,
    /// Destination JSON fixture
    #[arg(long)]
    out: PathBuf,
    /// Scores at or above this become 1
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Horizon used to report the hardness level
    #[arg(long, default_value_t = 100_000)]
    horizon: usize,
}

#[derive(Debug, Subcommand)]
enum ExportCommand {
    /// Synthetic instance: best arms at one level, the rest spread over others
    Synthetic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.9)]
        best_mean: f64,
        /// Comma-separated suboptimal levels
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5])]
        suboptimal_means: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Destination JSON fixture
        #[arg(long)]
        out: PathBuf,
    },
    /// All members of the lower-bound family, as member_<i>.json
    LowerBound {
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        alpha_prime: f64,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Destination directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(err: &Error) -> u8 {
    if err.is_io() {
        2
    } else {
        1
    }
}

fn load_config(args: &RunArgs) -> bandit_bench::Result<(ExperimentConfig, PathBuf)> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.base_seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    Ok((config, out))
}

fn report(result: &bandit_bench::Results) {
    for p in &result.policies {
        println!(
            "alpha={} policy={} final_mean={:.3} final_std={:.3}",
            result.alpha,
            p.label,
            p.final_mean(),
            p.final_std()
        );
    }
}

fn wrote(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}

fn ensure_parent(path: &Path) -> bandit_bench::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })
        }
        _ => Ok(()),
    }
}

fn execute(cli: Cli) -> bandit_bench::Result<()> {
    let threads = cli.threads.map(|t| t as usize);
    match cli.command {
        Command::Run(args) => {
            let (config, out) = load_config(&args)?;
            let result = harness::run_experiment::<f64>(&config, threads)?;
            report(&result);
            wrote(&harness::write_run(&out, &result)?);
        }
        Command::Sweep(args) => {
            let (config, out) = load_config(&args)?;
            let results = harness::sweep_alpha::<f64>(&config, threads)?;
            results.iter().for_each(report);
            wrote(&harness::write_sweep(&out, &results)?);
        }
        Command::Ingest(args) => {
            let table = ingest::load_ratings(&args.ratings)?;
            let ingested = ingest::ratings_to_means::<f64>(&table, args.threshold)?;
            let instance = ingest::means_to_instance(&ingested.means)?;
            let n = instance.n();
            let alpha = hardness_alpha::<f64>(n, ingested.m, args.horizon)
                .map(|a| format!("{a:.4}"))
                .unwrap_or_else(|e| format!("undefined ({e})"));
            ensure_parent(&args.out)?;
            instance.save(&args.out)?;
            println!("n={n} m={} alpha={alpha}", ingested.m);
        }
        Command::ExportFixture(ExportCommand::Synthetic {
            n,
            horizon,
            alpha,
            best_mean,
            suboptimal_means,
            epsilon,
            out,
        }) => {
            let spec = SyntheticSpec {
                n,
                horizon,
                alpha,
                best_mean,
                suboptimal_means,
                epsilon,
            };
            let instance: Instance = make_synthetic(&spec)?;
            ensure_parent(&out)?;
            instance.save(&out)?;
            println!("n={} m={}", instance.n(), instance.m());
            wrote(&[out]);
        }
        Command::ExportFixture(ExportCommand::LowerBound {
            horizon,
            alpha,
            alpha_prime,
            m,
            delta,
            out,
        }) => {
            let spec = LowerBoundFamilySpec {
                horizon,
                alpha,
                alpha_prime,
                m,
                delta,
            };
            let family = make_lower_bound_family::<f64>(&spec)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            let mut paths = Vec::new();
            for (i, instance) in family.instances.iter().enumerate() {
                let path = out.join(format!("member_{i}.json"));
                instance.save(&path)?;
                paths.push(path);
            }
            println!("K={} m0={} n={}", family.k, family.m0, family.n);
            wrote(&paths);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
