use std::path::Path;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use bswet_core::config::Grid;

/// Everything needed to rerun a command and get byte-identical data files.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub scenario: Option<String>,
    pub scenario_sha256: Option<String>,
    pub seed: u64,
    pub runs: usize,
    pub epsilon: f64,
    pub q_grid: Option<Grid>,
    pub version: &'static str,
    pub created: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(
        command: &str,
        scenario: Option<&Path>,
        seed: u64,
        runs: usize,
        epsilon: f64,
        q_grid: Option<Grid>,
    ) -> anyhow::Result<Self> {
        let scenario_sha256 = match scenario {
            Some(p) => {
                let bytes = std::fs::read(p).with_context(|| format!("reading {}", p.display()))?;
                Some(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
            }
            None => None,
        };
        Ok(Self {
            command: command.to_string(),
            scenario: scenario.map(|p| p.display().to_string()),
            scenario_sha256,
            seed,
            runs,
            epsilon,
            q_grid,
            version: env!("CARGO_PKG_VERSION"),
            created: chrono::Utc::now().to_rfc3339(),
            outputs: Vec::new(),
        })
    }
}
