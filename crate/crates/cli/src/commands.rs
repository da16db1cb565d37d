use std::fmt::Write as _;
use std::path::PathBuf;

use laws_vqa::ansatz::build_h2_ansatz;
use laws_vqa::classifier::{bundled_iris, load_iris};
use laws_vqa::diff::{bp_rows_to_csv, fit_log_variance_slope};
use laws_vqa::experiments::{
    check_h2_hamiltonian, random_pqc_cost, run_bp_scan, run_iris_classifier, run_vqe, uniform_start,
    ExperimentKind, ExperimentResult, H2_GROUND_ENERGY,
};
use laws_vqa::{CostFunction, OptimizerConfig, OptimizerName, ParameterizedCircuit, PauliSumHamiltonian};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{write_atomic, write_json, write_run};

/// Cost function of a VQE experiment, honoring custom circuit and
/// Hamiltonian files.
fn vqe_cost(cfg: &RunConfig) -> Result<CostFunction, CliError> {
    let circuit = cfg.circuit.as_deref().map(ParameterizedCircuit::from_file).transpose()?;
    let hamiltonian = cfg
        .hamiltonian
        .as_deref()
        .map(|p| PauliSumHamiltonian::from_file(p, circuit.as_ref().map(|c| c.n_qubits())))
        .transpose()?;
    let cf = match cfg.experiment {
        ExperimentKind::H2Vqe => {
            let h = hamiltonian.unwrap_or_else(PauliSumHamiltonian::h2_sto3g);
            check_h2_hamiltonian(&h)?;
            CostFunction::new(circuit.unwrap_or_else(build_h2_ansatz), h)?
        }
        _ => {
            let reference = random_pqc_cost()?;
            CostFunction::new(
                circuit.unwrap_or_else(|| reference.circuit().clone()),
                hamiltonian.unwrap_or_else(|| reference.observable().clone()),
            )?
        }
    };
    Ok(cf)
}

/// One optimizer run; `cf` is shared across cells of a comparison.
fn execute(
    cfg: &RunConfig,
    cf: Option<&CostFunction>,
    name: OptimizerName,
    opt: &OptimizerConfig,
    seed: u64,
) -> Result<ExperimentResult, CliError> {
    let result = match cfg.experiment {
        ExperimentKind::Iris => {
            let data = match &cfg.iris {
                Some(p) => load_iris(p, seed, cfg.train_fraction)?,
                None => bundled_iris(seed, cfg.train_fraction)?,
            };
            run_iris_classifier(name, opt, seed, cfg.iterations, &data, cfg.batch_size)?
        }
        ExperimentKind::H2Vqe | ExperimentKind::RandomPqc => {
            let cf = cf.ok_or_else(|| CliError::Config("missing cost function".into()))?;
            let theta0 = match cfg.experiment {
                ExperimentKind::H2Vqe => vec![0.0; cf.n_params()],
                _ => uniform_start(cf.n_params(), seed),
            };
            run_vqe(cfg.experiment, cf, theta0, name, opt, seed, cfg.iterations)?
        }
        ExperimentKind::BpScan => {
            return Err(CliError::Config("bp-scan has no optimizer runs; use the bp-scan subcommand".into()));
        }
    };
    Ok(result)
}

fn stem(cfg: &RunConfig, label: &str, seed: u64) -> String {
    format!("{}_{label}_seed{seed}", cfg.experiment.as_str())
}

fn shared_cost(cfg: &RunConfig) -> Result<Option<CostFunction>, CliError> {
    match cfg.experiment {
        ExperimentKind::H2Vqe | ExperimentKind::RandomPqc => vqe_cost(cfg).map(Some),
        _ => Ok(None),
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.experiment == ExperimentKind::BpScan {
        return bp_scan(cfg);
    }
    let cf = shared_cost(cfg)?;
    let result = execute(cfg, cf.as_ref(), cfg.optimizer, &cfg.optimizer_config, cfg.seed)?;
    let path = write_run(&cfg.output_dir, &stem(cfg, cfg.optimizer.as_str(), cfg.seed), &result, cfg)?;
    println!("{}", path.display());
    match &result.aborted {
        Some(msg) => Err(CliError::Numeric(msg.clone())),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct BpMetadata<'a> {
    experiment: &'static str,
    seed: u64,
    slope: Option<f64>,
    slope_p_value: Option<f64>,
    table: String,
    provenance: String,
    config: &'a RunConfig,
}

pub fn bp_scan(cfg: &RunConfig) -> Result<(), CliError> {
    let rows = run_bp_scan(&cfg.qubits, cfg.samples, cfg.layers_per_qubit, cfg.seed)?;
    let table = bp_rows_to_csv(&rows);
    let path = cfg.output_dir.join(format!("bp-scan_seed{}.csv", cfg.seed));
    write_atomic(&path, table.as_bytes())?;
    let fit = if rows.len() >= 3 { fit_log_variance_slope(&rows).ok() } else { None };
    let meta = BpMetadata {
        experiment: ExperimentKind::BpScan.as_str(),
        seed: cfg.seed,
        slope: fit.as_ref().map(|f| f.slope),
        slope_p_value: fit.as_ref().map(|f| f.p_value),
        table: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        provenance: laws_vqa::experiments::provenance(),
        config: cfg,
    };
    write_json(&path.with_extension("json"), &meta)?;
    print!("{table}");
    if let Some(f) = fit {
        println!("# slope {:.6} per qubit, p = {:.4}", f.slope, f.p_value);
    }
    Ok(())
}

struct Cell {
    label: String,
    name: OptimizerName,
    config: OptimizerConfig,
    seed: u64,
}

/// Threshold for `iters_to_threshold`: explicit, or 1e-3 above the exact
/// ground energy for VQE experiments.
fn threshold(cfg: &RunConfig, cf: Option<&CostFunction>) -> Result<Option<f64>, CliError> {
    if cfg.threshold.is_some() {
        return Ok(cfg.threshold);
    }
    Ok(match (cfg.experiment, cf) {
        (ExperimentKind::H2Vqe, _) if cfg.hamiltonian.is_none() => Some(H2_GROUND_ENERGY + 1e-3),
        (ExperimentKind::H2Vqe | ExperimentKind::RandomPqc, Some(cf)) => {
            Some(cf.observable().exact_ground_energy()? + 1e-3)
        }
        _ => None,
    })
}

pub fn compare(cfg: &RunConfig, sweep_eta: bool) -> Result<(), CliError> {
    // An η sweep of a single optimizer is also a comparison.
    if cfg.optimizers.len() < 2 && !(sweep_eta && cfg.eta_grid.len() >= 2) {
        return Err(CliError::Config("compare needs at least two optimizers".into()));
    }
    let cf = shared_cost(cfg)?;
    let threshold = threshold(cfg, cf.as_ref())?;

    let mut cells = Vec::new();
    for &name in &cfg.optimizers {
        let variants: Vec<(String, OptimizerConfig)> = if sweep_eta {
            cfg.eta_grid
                .iter()
                .map(|&eta| (format!("{name}@eta={eta}"), OptimizerConfig { eta, ..cfg.optimizer_config.clone() }))
                .collect()
        } else {
            vec![(name.to_string(), cfg.optimizer_config.clone())]
        };
        for (label, config) in variants {
            config.validate()?;
            for &seed in &cfg.seeds {
                cells.push(Cell { label: label.clone(), name, config: config.clone(), seed });
            }
        }
    }

    let outcomes: Vec<Result<ExperimentResult, CliError>> = cells
        .par_iter()
        .map(|c| {
            let r = execute(cfg, cf.as_ref(), c.name, &c.config, c.seed)?;
            let echo = RunConfig {
                optimizer: c.name,
                seed: c.seed,
                optimizer_config: c.config.clone(),
                ..cfg.clone()
            };
            let file_label = c.label.replace("@eta=", "_eta");
            write_run(&cfg.output_dir, &stem(cfg, &file_label, c.seed), &r, &echo)?;
            Ok(r)
        })
        .collect();

    let mut summary = String::from("optimizer,seed,final_cost,iters_to_threshold\n");
    let mut aborted = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        let r = outcome?;
        let hit = threshold.and_then(|t| r.iters_to_threshold(t)).map(|i| i.to_string()).unwrap_or_default();
        let _ = writeln!(summary, "{},{},{},{}", cell.label, cell.seed, r.final_cost(), hit);
        if let Some(msg) = &r.aborted {
            aborted.push(format!("{} seed {}: {msg}", cell.label, cell.seed));
        }
    }
    let path: PathBuf = cfg.output_dir.join(format!("{}_summary.csv", cfg.experiment.as_str()));
    write_atomic(&path, summary.as_bytes())?;
    println!("{}", path.display());
    if aborted.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numeric(aborted.join("; ")))
    }
}
