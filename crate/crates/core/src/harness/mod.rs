//! Experiment plumbing: dataset ingestion, synthetic stream generators,
//! experiment runners, and tabular output.
//!
//! Everything here is deterministic given the config: the same seed produces
//! byte-identical result files. The runners drive the learners from the
//! algorithm modules and write plain comma-separated tables that plotting
//! tools can consume directly.

mod config;
mod hadamard;
mod libsvm;
mod output;
mod runner;
mod synthetic;

pub use config::{EtaGrid, ExperimentConfig, Task};
pub use hadamard::{hadamard_experts, sylvester_matrix, ExpertsStream, GapMode};
pub use libsvm::{max_feature_index, normalize_dataset, normalize_l2, parse_libsvm, SparseExample};
pub use output::RegretTrace;
pub use runner::{run_coin_game, run_lea_experiment, run_olo_experiment, RunArtifacts};
pub use synthetic::{
    random_binary_coins, random_expert_stream, random_real_coins, random_unit_vector,
    synthetic_linear_stream, SyntheticRegression,
};

/// Malformed text input, reported with its 1-based line number.
#[derive(Debug, Clone, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}
