use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::experiments::{run_experiment, OutputFile};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub toolkit_version: String,
    pub experiment: String,
    pub label: String,
    pub seed: u64,
    pub threads: usize,
    pub duration_s: f64,
    /// every default filled in
    pub config: ScenarioConfig,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.partial"));
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

/// Runs the experiment, then writes its CSVs and finally the manifest into
/// the config's output directory. Nothing is written if the experiment fails.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let files = run_experiment(config)?;
    let dir = Path::new(config.output_dir());
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let mut outputs = Vec::with_capacity(files.len());
    for OutputFile { name, contents } in &files {
        write_atomic(dir, name, contents)?;
        outputs.push(OutputDigest { file: name.clone(), bytes: contents.len() as u64, sha256: sha256_hex(contents) });
    }
    let manifest = RunManifest {
        toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: config.experiment.name().to_string(),
        label: config.label().to_string(),
        seed: config.seed,
        threads: rayon::current_num_threads(),
        duration_s: start.elapsed().as_secs_f64(),
        config: config.clone(),
        outputs,
    };
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::io(dir.join(MANIFEST_NAME), e))?;
    write_atomic(dir, MANIFEST_NAME, &json)?;
    Ok(manifest)
}
