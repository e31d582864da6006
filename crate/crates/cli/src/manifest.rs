//! Run manifest: configuration hash, versions and timings, written next to
//! the data artifacts. The hash covers the resolved configuration and every
//! input file, so hash plus seed pins the outputs; timings are informative
//! only and excluded from any reproducibility comparison.

use anyhow::{Context, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// FNV-1a, 64 bit.
fn fnv1a(bytes: &[u8], mut state: u64) -> u64 {
    for &b in bytes {
        state ^= b as u64;
        state = state.wrapping_mul(0x100000001b3);
    }
    state
}

pub struct Manifest {
    command: String,
    seed: u64,
    hash_state: u64,
    timings: BTreeMap<String, u128>,
    started: Instant,
    out_dir: PathBuf,
}

impl Manifest {
    pub fn new(command: &str, seed: u64, out_dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        let mut hash_state = 0xcbf29ce484222325u64;
        hash_state = fnv1a(command.as_bytes(), hash_state);
        hash_state = fnv1a(&seed.to_le_bytes(), hash_state);
        Ok(Manifest {
            command: command.to_string(),
            seed,
            hash_state,
            timings: BTreeMap::new(),
            started: Instant::now(),
            out_dir: out_dir.to_path_buf(),
        })
    }

    /// Folds a configuration fragment into the hash.
    pub fn absorb(&mut self, label: &str, payload: &str) {
        self.hash_state = fnv1a(label.as_bytes(), self.hash_state);
        self.hash_state = fnv1a(payload.as_bytes(), self.hash_state);
    }

    /// Folds an input file's contents into the hash and returns them.
    pub fn absorb_file(&mut self, path: &Path) -> Result<String> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.absorb(&path.display().to_string(), &text);
        Ok(text)
    }

    pub fn record_timing(&mut self, label: &str) {
        self.timings
            .insert(label.to_string(), self.started.elapsed().as_millis());
    }

    /// Writes a data artifact into the run directory.
    pub fn write_artifact(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn finish(mut self) -> Result<()> {
        self.record_timing("total");
        let json = serde_json::json!({
            "command": self.command,
            "seed": self.seed,
            "config_hash": format!("{:016x}", self.hash_state),
            "version": env!("CARGO_PKG_VERSION"),
            "timings_ms": self.timings,
        });
        std::fs::write(
            self.out_dir.join("manifest.json"),
            serde_json::to_string_pretty(&json)?,
        )?;
        Ok(())
    }
}
