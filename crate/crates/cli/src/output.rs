//! Run directories, manifests and CSV writers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Version of the CSV column layouts. Bump when a column changes.
pub const CSV_SCHEMA: u32 = 1;

/// Written beside every run's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub config: serde_json::Value,
    pub artifact_version: &'static str,
    pub csv_schema: u32,
    pub started_utc: String,
    pub outputs: Vec<String>,
    pub exit_code: u8,
}

/// `<out>/<subcommand>/<timestamp>-<seed>/`, created on construction.
pub struct RunDir {
    path: PathBuf,
    subcommand: String,
    seed: u64,
    started: String,
    outputs: Vec<String>,
}

impl RunDir {
    pub fn create(out: &Path, subcommand: &str, seed: u64) -> Result<Self> {
        let started = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();
        let base = out.join(subcommand);
        let mut path = base.join(format!("{started}-{seed}"));
        let mut k = 2;
        while path.exists() {
            path = base.join(format!("{started}-{seed}-{k}"));
            k += 1;
        }
        fs::create_dir_all(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(RunDir { path, subcommand: subcommand.into(), seed, started, outputs: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
        let p = self.path.join(name);
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        self.write(name, serde_json::to_string_pretty(value)? + "\n")
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        self.write(name, bytes)
    }

    /// Writes `manifest.json` and returns the directory.
    pub fn finish(self, config: serde_json::Value, exit_code: u8) -> Result<PathBuf> {
        let manifest = RunManifest {
            subcommand: self.subcommand,
            argv: std::env::args().collect(),
            seed: self.seed,
            config,
            artifact_version: env!("CARGO_PKG_VERSION"),
            csv_schema: CSV_SCHEMA,
            started_utc: self.started,
            outputs: self.outputs,
            exit_code,
        };
        let p = self.path.join("manifest.json");
        fs::write(&p, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", p.display()))?;
        Ok(self.path)
    }
}
