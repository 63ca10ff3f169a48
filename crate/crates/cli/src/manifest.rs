//! Output files and the manifest that lists them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Written {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Files named `<stem><suffix>` inside one directory.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    stem: String,
    files: Vec<Written>,
}

impl Artifacts {
    pub fn new(dir: &Path, stem: &str) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    pub fn files(&self) -> &[Written] {
        &self.files
    }

    pub fn write(&mut self, suffix: &str, bytes: &[u8]) -> Result<PathBuf> {
        let name = format!("{}{suffix}", self.stem);
        let path = self.dir.join(&name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(Written {
            name,
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(path)
    }

    /// Render with a core writer, then write.
    pub fn write_with<F>(&mut self, suffix: &str, f: F) -> Result<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> scatter_core::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(suffix, &buf)
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub experiment: String,
    pub anchor: &'static str,
    pub config_hash: String,
    pub seed: u64,
    /// `(label, path, sha256)` of every input read.
    pub inputs: Vec<(String, String, String)>,
    pub wall_time: Duration,
    /// `None` on success.
    pub failure: Option<String>,
    /// Set when the run stopped early, so the outputs may be incomplete.
    pub partial: bool,
}

impl Manifest {
    pub fn render(&self, outputs: &[Written]) -> String {
        let mut s = String::new();
        let status = match (&self.failure, self.partial) {
            (None, _) => "ok",
            (Some(_), false) => "failed",
            (Some(_), true) => "aborted",
        };
        let _ = writeln!(s, "[run]");
        let _ = writeln!(s, "experiment = {}", self.experiment);
        let _ = writeln!(s, "anchor = {}", self.anchor);
        let _ = writeln!(s, "config_hash = {}", self.config_hash);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "status = {status}");
        if let Some(f) = &self.failure {
            let _ = writeln!(s, "error = {}", f.replace('\n', " "));
        }
        let _ = writeln!(s, "wall_time_s = {:.3}", self.wall_time.as_secs_f64());
        let _ = writeln!(s, "\n[inputs]");
        for (label, path, sha) in &self.inputs {
            let _ = writeln!(s, "{label} = {path} sha256:{sha}");
        }
        let _ = writeln!(s, "\n[outputs]");
        for w in outputs {
            let flag = if self.partial { " partial" } else { "" };
            let _ = writeln!(
                s,
                "{} = sha256:{} bytes:{}{flag}",
                w.name, w.sha256, w.bytes
            );
        }
        s
    }

    /// Write `<stem>.manifest` next to the outputs.
    pub fn write(&self, artifacts: &Artifacts) -> Result<PathBuf> {
        let path = artifacts
            .dir()
            .join(format!("{}.manifest", artifacts.stem()));
        std::fs::write(&path, self.render(artifacts.files()))
            .map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
