//! Atomic file output and metadata sidecars.

use std::io::Write;
use std::path::{Path, PathBuf};

use laws_vqa::experiments::ExperimentResult;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("cannot create a temporary file in {}: {e}", dir.display())))?;
    tmp.write_all(contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

#[derive(Serialize)]
struct Metadata<'a> {
    experiment: &'static str,
    optimizer: &'a str,
    seed: u64,
    iterations: usize,
    completed_iterations: usize,
    aborted: Option<&'a str>,
    final_cost: f64,
    final_theta: &'a [f64],
    trace: String,
    provenance: &'a str,
    config: &'a RunConfig,
}

/// Trace CSV plus its JSON sidecar; returns the CSV path.
pub fn write_run(dir: &Path, stem: &str, result: &ExperimentResult, config: &RunConfig) -> Result<PathBuf, CliError> {
    let csv = dir.join(format!("{stem}.csv"));
    write_atomic(&csv, result.trace_csv().as_bytes())?;
    let meta = Metadata {
        experiment: result.experiment.as_str(),
        optimizer: result.optimizer.as_str(),
        seed: result.seed,
        iterations: result.iterations,
        completed_iterations: result.trace.len().saturating_sub(1),
        aborted: result.aborted.as_deref(),
        final_cost: result.final_cost(),
        final_theta: &result.final_theta,
        trace: csv.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        provenance: &result.provenance,
        config,
    };
    write_json(&dir.join(format!("{stem}.json")), &meta)?;
    Ok(csv)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
