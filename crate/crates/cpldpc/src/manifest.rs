use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::report::write_json;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CPLDPC_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub cmd: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub artifact_hashes: BTreeMap<String, String>,
    pub input_hashes: BTreeMap<String, String>,
    pub versions: BTreeMap<String, String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("hashing {}", path.display()), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn hashes(paths: &[PathBuf]) -> Result<BTreeMap<String, String>> {
    paths.iter().map(|p| Ok((p.display().to_string(), sha256_file(p)?))).collect()
}

impl Manifest {
    pub fn new(cmd: &str, args: Vec<String>, seed: Option<u64>, artifacts: &[PathBuf], inputs: &[PathBuf]) -> Result<Self> {
        let versions = BTreeMap::from([
            ("cpldpc".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("format.cptable".to_string(), "1".to_string()),
            ("format.cpsim".to_string(), "1".to_string()),
        ]);
        Ok(Manifest {
            cmd: cmd.to_string(),
            args,
            seed,
            artifact_hashes: hashes(artifacts)?,
            input_hashes: hashes(inputs)?,
            versions,
        })
    }

    /// Writes `<out_dir>/<cmd>.manifest.json` and returns its path.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(format!("creating {}", out_dir.display()), e))?;
        let path = out_dir.join(format!("{}.manifest.json", self.cmd.replace(' ', "-")));
        write_json(&path, self)?;
        Ok(path)
    }
}
