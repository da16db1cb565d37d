//! Run configuration: TOML file sections, flag overrides, defaults.
//!
//! Resolution order is flags over file over defaults. Relative data paths
//! in a config file are taken relative to the file's directory.

use std::path::{Path, PathBuf};

use clap::Args;
use laws_vqa::experiments::{ExperimentKind, DEFAULT_IRIS_ITERATIONS, DEFAULT_PQC_ITERATIONS};
use laws_vqa::optim::{DeltaVariant, Schedule, WarmStartStrategy};
use laws_vqa::{OptimizerConfig, OptimizerName};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_QUBITS: [usize; 4] = [2, 4, 6, 8];
pub const DEFAULT_BP_SAMPLES: usize = 200;
pub const DEFAULT_LAYERS_PER_QUBIT: usize = 5;
pub const DEFAULT_ETA_GRID: [f64; 3] = [0.1, 0.5, 1.0];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(default)]
    experiment: ExperimentSection,
    #[serde(default)]
    optimizer: OptimizerSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    kind: Option<String>,
    optimizer: Option<String>,
    seed: Option<u64>,
    iterations: Option<usize>,
    hamiltonian: Option<PathBuf>,
    circuit: Option<PathBuf>,
    iris: Option<PathBuf>,
    train_fraction: Option<f64>,
    batch_size: Option<usize>,
    qubits: Option<Vec<usize>>,
    samples: Option<usize>,
    layers_per_qubit: Option<usize>,
    optimizers: Option<Vec<String>>,
    seeds: Option<Vec<u64>>,
    threshold: Option<f64>,
    eta_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizerSection {
    eta: Option<f64>,
    lambda: Option<f64>,
    mu: Option<f64>,
    k: Option<usize>,
    alpha: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    beta: Option<f64>,
    epsilon: Option<f64>,
    delta: Option<f64>,
    cutoff: Option<f64>,
    c0: Option<f64>,
    schedule: Option<String>,
    warm_start: Option<String>,
    delta_variant: Option<String>,
    inner: Option<String>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// Flags shared by every subcommand. Each one overrides the matching
/// config-file key.
#[derive(Debug, Default, Clone, Args)]
pub struct ConfigArgs {
    /// TOML config file with [experiment], [optimizer] and [output] sections.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// random-pqc, h2-vqe, iris or bp-scan.
    #[arg(long)]
    pub experiment: Option<String>,
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Pauli-sum Hamiltonian file (h2-vqe, random-pqc).
    #[arg(long, value_name = "FILE")]
    pub hamiltonian: Option<PathBuf>,
    /// Circuit description file (h2-vqe, random-pqc).
    #[arg(long, value_name = "FILE")]
    pub circuit: Option<PathBuf>,
    /// Iris CSV file.
    #[arg(long, value_name = "FILE")]
    pub iris: Option<PathBuf>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Register sizes for bp-scan, e.g. 2,4,6.
    #[arg(long, value_delimiter = ',')]
    pub qubits: Option<Vec<usize>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub layers_per_qubit: Option<usize>,
    /// Outer learning rate η.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Outer rate as λ = η/K; sets η = λ·K.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Warm-start learning rate μ.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Warm-start steps K.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Metric damping δ.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub cutoff: Option<f64>,
    #[arg(long)]
    pub c0: Option<f64>,
    /// constant or theorem1.
    #[arg(long)]
    pub schedule: Option<String>,
    /// inner-sgd, averaged-at-theta or ema.
    #[arg(long)]
    pub warm_start: Option<String>,
    /// lookahead, fisher or adam-like.
    #[arg(long)]
    pub delta_variant: Option<String>,
    /// Warm-start optimizer for wssgd and lookahead.
    #[arg(long)]
    pub inner: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Resolve and print the configuration without running.
    #[arg(long)]
    pub validate: bool,
}

/// Extra flags of `compare`.
#[derive(Debug, Default, Clone, Args)]
pub struct CompareArgs {
    /// Optimizers to compare, e.g. sgd,qng,laws.
    #[arg(long, value_delimiter = ',')]
    pub optimizers: Option<Vec<String>>,
    /// Seeds, e.g. 0,1,2.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Cost threshold for the iters_to_threshold column.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Also sweep η over the configured grid.
    #[arg(long)]
    pub sweep_eta: bool,
    /// η grid for --sweep-eta, e.g. 0.1,0.5,1.0.
    #[arg(long, value_delimiter = ',')]
    pub eta_grid: Option<Vec<f64>>,
}

/// Fully resolved configuration, echoed into every metadata sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub optimizer: OptimizerName,
    pub seed: u64,
    pub iterations: usize,
    pub optimizer_config: OptimizerConfig,
    pub hamiltonian: Option<PathBuf>,
    pub circuit: Option<PathBuf>,
    pub iris: Option<PathBuf>,
    pub train_fraction: f64,
    pub batch_size: usize,
    pub qubits: Vec<usize>,
    pub samples: usize,
    pub layers_per_qubit: usize,
    pub optimizers: Vec<OptimizerName>,
    pub seeds: Vec<u64>,
    pub threshold: Option<f64>,
    pub eta_grid: Vec<f64>,
    pub output_dir: PathBuf,
}

fn parse_name<T>(text: &str) -> Result<T, CliError>
where
    T: std::str::FromStr<Err = laws_vqa::Error>,
{
    text.parse().map_err(CliError::from)
}

fn parse_experiment(text: &str) -> Result<ExperimentKind, CliError> {
    parse_name(text)
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn rebase(base: Option<&Path>, p: Option<PathBuf>) -> Option<PathBuf> {
    match (base, p) {
        (Some(dir), Some(p)) if p.is_relative() => Some(dir.join(p)),
        (_, p) => p,
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// Merges flags, file and defaults, then validates everything that can be
/// checked without running.
pub fn resolve(args: &ConfigArgs, compare: Option<&CompareArgs>) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => read_file_config(path)?,
        None => FileConfig::default(),
    };
    let base = args.config.as_deref().and_then(Path::parent);
    let e = file.experiment;
    let o = file.optimizer;

    let experiment = match pick(args.experiment.clone(), e.kind) {
        Some(s) => parse_experiment(&s)?,
        None => ExperimentKind::RandomPqc,
    };
    let optimizer = match pick(args.optimizer.clone(), e.optimizer) {
        Some(s) => parse_name(&s)?,
        None => OptimizerName::Laws,
    };

    let d = OptimizerConfig::default();
    let k = pick(args.k, o.k).unwrap_or(d.k);
    let eta = pick(args.eta, o.eta);
    let lambda = pick(args.lambda, o.lambda);
    let eta = match (eta, lambda) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config("give either eta or lambda, not both".into()));
        }
        (Some(eta), None) => eta,
        (None, Some(l)) => l * k as f64,
        (None, None) => d.eta,
    };
    let optimizer_config = OptimizerConfig {
        eta,
        mu: pick(args.mu, o.mu).unwrap_or(d.mu),
        k,
        alpha: pick(args.alpha, o.alpha).unwrap_or(d.alpha),
        beta1: pick(args.beta1, o.beta1).unwrap_or(d.beta1),
        beta2: pick(args.beta2, o.beta2).unwrap_or(d.beta2),
        beta: pick(args.beta, o.beta).unwrap_or(d.beta),
        epsilon: pick(args.epsilon, o.epsilon).unwrap_or(d.epsilon),
        delta: pick(args.delta, o.delta).unwrap_or(d.delta),
        cutoff: pick(args.cutoff, o.cutoff).unwrap_or(d.cutoff),
        c0: pick(args.c0, o.c0).unwrap_or(d.c0),
        schedule: match pick(args.schedule.clone(), o.schedule) {
            Some(s) => parse_name::<Schedule>(&s)?,
            None => d.schedule,
        },
        warm_start: match pick(args.warm_start.clone(), o.warm_start) {
            Some(s) => parse_name::<WarmStartStrategy>(&s)?,
            None => d.warm_start,
        },
        delta_variant: match pick(args.delta_variant.clone(), o.delta_variant) {
            Some(s) => parse_name::<DeltaVariant>(&s)?,
            None => d.delta_variant,
        },
        inner: match pick(args.inner.clone(), o.inner) {
            Some(s) => parse_name(&s)?,
            None => d.inner,
        },
    };
    optimizer_config.validate()?;

    let iterations = pick(args.iterations, e.iterations).unwrap_or(match experiment {
        ExperimentKind::Iris => DEFAULT_IRIS_ITERATIONS,
        _ => DEFAULT_PQC_ITERATIONS,
    });

    let compare = compare.cloned().unwrap_or_default();
    let optimizers = match pick(compare.optimizers, e.optimizers) {
        Some(names) => names.iter().map(|s| parse_name(s)).collect::<Result<Vec<_>, _>>()?,
        None => vec![OptimizerName::Sgd, OptimizerName::Qng, OptimizerName::Laws],
    };
    let seed = pick(args.seed, e.seed).unwrap_or(0);
    let seeds = pick(compare.seeds, e.seeds).unwrap_or_else(|| (0..20).collect());
    let eta_grid = pick(compare.eta_grid, e.eta_grid).unwrap_or_else(|| DEFAULT_ETA_GRID.to_vec());
    if eta_grid.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
        return Err(CliError::Config("eta_grid entries must be positive".into()));
    }

    let cfg = RunConfig {
        experiment,
        optimizer,
        seed,
        iterations,
        optimizer_config,
        hamiltonian: pick(args.hamiltonian.clone(), rebase(base, e.hamiltonian)),
        circuit: pick(args.circuit.clone(), rebase(base, e.circuit)),
        iris: pick(args.iris.clone(), rebase(base, e.iris)),
        train_fraction: pick(args.train_fraction, e.train_fraction).unwrap_or(0.75),
        batch_size: pick(args.batch_size, e.batch_size).unwrap_or(laws_vqa::classifier::DEFAULT_BATCH_SIZE),
        qubits: pick(args.qubits.clone(), e.qubits).unwrap_or_else(|| DEFAULT_QUBITS.to_vec()),
        samples: pick(args.samples, e.samples).unwrap_or(DEFAULT_BP_SAMPLES),
        layers_per_qubit: pick(args.layers_per_qubit, e.layers_per_qubit).unwrap_or(DEFAULT_LAYERS_PER_QUBIT),
        optimizers,
        seeds,
        threshold: pick(compare.threshold, e.threshold),
        eta_grid,
        output_dir: pick(args.output_dir.clone(), file.output.dir).unwrap_or_else(|| PathBuf::from("results")),
    };
    check(&cfg)?;
    Ok(cfg)
}

fn check(cfg: &RunConfig) -> Result<(), CliError> {
    for (key, path) in [("hamiltonian", &cfg.hamiltonian), ("circuit", &cfg.circuit), ("iris", &cfg.iris)] {
        if let Some(p) = path {
            if !p.is_file() {
                return Err(CliError::Config(format!("{key}: file {} does not exist", p.display())));
            }
        }
    }
    if !(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0) {
        return Err(CliError::Config(format!("train_fraction must lie in (0, 1), got {}", cfg.train_fraction)));
    }
    if cfg.batch_size == 0 {
        return Err(CliError::Config("batch_size must be at least 1".into()));
    }
    if cfg.qubits.is_empty() || cfg.qubits.iter().any(|&n| n == 0 || n > laws_vqa::state::MAX_QUBITS) {
        return Err(CliError::Config(format!(
            "qubits must be between 1 and {}",
            laws_vqa::state::MAX_QUBITS
        )));
    }
    if cfg.samples < 30 {
        return Err(CliError::Config(format!("samples must be at least 30, got {}", cfg.samples)));
    }
    if cfg.layers_per_qubit == 0 {
        return Err(CliError::Config("layers_per_qubit must be at least 1".into()));
    }
    if cfg.seeds.is_empty() {
        return Err(CliError::Config("seeds must not be empty".into()));
    }
    Ok(())
}
