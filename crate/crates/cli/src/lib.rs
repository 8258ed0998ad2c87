//! Command-line and HTTP front ends for fuzzyrank.
//!
//! The binary is a thin layer over this library so that the API router and
//! the response types can be tested without spawning processes.

pub mod api;
pub mod evaluate;
pub mod response;

use std::path::{Path, PathBuf};

use fuzzyrank_core::engine::{Engine, EngineConfig};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "FUZZYRANK_CONFIG";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
}

/// An error with the exit code it should produce.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: exit::USAGE,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: exit::RUNTIME,
            error: error.into(),
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Loads the config file if one is given (flag first, then the environment,
/// which clap folds into the same option), applies the taxonomy directory
/// override and builds the engine. Every failure here is a usage error.
pub fn load_engine(config: Option<&Path>, taxonomy_dir: Option<PathBuf>) -> Result<Engine, Failure> {
    let mut cfg = match config {
        Some(p) => EngineConfig::load(p).map_err(|e| Failure::usage(anyhow::anyhow!("config {}: {e}", p.display())))?,
        None => EngineConfig::default(),
    };
    if let Some(dir) = taxonomy_dir {
        if !dir.is_dir() {
            return Err(Failure::usage(anyhow::anyhow!(
                "taxonomy directory not found: {}",
                dir.display()
            )));
        }
        cfg.ontology.taxonomy_dir = Some(dir);
    }
    Engine::new(cfg).map_err(|e| Failure::usage(anyhow::anyhow!("invalid configuration: {e}")))
}
