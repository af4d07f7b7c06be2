//! Output directory bookkeeping: every written file is hashed and listed in
//! a per-command manifest next to an echo of the configuration.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of a file, or of a directory's regular files taken in name order.
pub fn digest_path(path: &Path) -> CliResult<FileDigest> {
    let mut hasher = Sha256::new();
    let mut total = 0u64;
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| CliError::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        for f in files {
            let data = fs::read(&f).map_err(|e| CliError::io(&f, e))?;
            hasher.update(
                f.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .as_bytes(),
            );
            hasher.update([0]);
            hasher.update(&data);
            total += data.len() as u64;
        }
    } else {
        let data = fs::read(path).map_err(|e| CliError::io(path, e))?;
        hasher.update(&data);
        total = data.len() as u64;
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex(&hasher.finalize()),
        bytes: total,
    })
}

/// Writes files into the run directory and remembers their digests.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<FileDigest>,
    inputs: Vec<FileDigest>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            inputs: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn record_input(&mut self, path: &Path) -> CliResult<()> {
        self.inputs.push(digest_path(path)?);
        Ok(())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.path(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(FileDigest {
            path: name.to_string(),
            sha256: hex(&Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    /// Write `<command>.manifest.json` and return every output path.
    pub fn finish(mut self, config: &RunConfig) -> CliResult<Vec<PathBuf>> {
        let command = config.command.name();
        let manifest = Manifest {
            tool: "poslens",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: &self.inputs,
            outputs: &self.written,
        };
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        let name = format!("{command}.manifest.json");
        let mut paths: Vec<PathBuf> = self
            .written
            .iter()
            .map(|f| self.dir.join(&f.path))
            .collect();
        paths.push(self.write(&name, json.as_bytes())?);
        Ok(paths)
    }
}
