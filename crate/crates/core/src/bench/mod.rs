//! Experiment harness behind the `cimbench` binary: config files, seeded
//! instances, method runs with rate audits, and report files.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod instance;
pub mod output;
pub mod rng;

use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, ExperimentReport, RunOptions};
pub use instance::{generate_instance, Instance, RandomSpec};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Library(#[from] crate::Error),
}
