//! Experiment configuration: a small TOML-backed struct with per-task
//! defaults. The effective (fully resolved) config is echoed next to every
//! result set so a run can be reproduced from its output directory alone.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::hadamard::GapMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Single-pass absolute-loss regression: count-based learner vs tuned
    /// gradient descent.
    OloRegression,
    /// Planted-experts stream: parameter-free experts algorithm vs tuned
    /// exponential weights.
    LeaSynthetic,
    /// Scripted coin game: count-based bettor vs hindsight and Kelly
    /// baselines.
    CoinGame,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::OloRegression => "olo_regression",
            Task::LeaSynthetic => "lea_synthetic",
            Task::CoinGame => "coin_game",
        }
    }
}

/// Log-spaced learning-rate grid, written `lo:hi:points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct EtaGrid {
    lo: f64,
    hi: f64,
    points: usize,
}

impl EtaGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
            return Err(Error::Config(format!(
                "rate grid needs 0 < lo ≤ hi, got {lo}:{hi}"
            )));
        }
        if points == 0 {
            return Err(Error::Config("rate grid needs ≥ 1 point".to_string()));
        }
        if points == 1 && hi != lo {
            return Err(Error::Config(
                "a single-point rate grid needs lo = hi".to_string(),
            ));
        }
        Ok(EtaGrid { lo, hi, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let log_lo = self.lo.ln();
        let log_hi = self.hi.ln();
        (0..self.points)
            .map(|i| {
                let frac = i as f64 / (self.points - 1) as f64;
                (log_lo + frac * (log_hi - log_lo)).exp()
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for EtaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.points)
    }
}

impl FromStr for EtaGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "rate grid `{s}` is not lo:hi:points"
            )));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| Error::Config(format!("rate grid lo `{}` is not a number", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("rate grid hi `{}` is not a number", parts[1])))?;
        let points: usize = parts[2].parse().map_err(|_| {
            Error::Config(format!("rate grid points `{}` is not an integer", parts[2]))
        })?;
        EtaGrid::new(lo, hi, points)
    }
}

impl TryFrom<String> for EtaGrid {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<EtaGrid> for String {
    fn from(grid: EtaGrid) -> String {
        grid.to_string()
    }
}

/// Everything a run needs; omitted fields take the per-task defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    /// Horizon T; defaults to 100 (coin), 5000 (regression), 32768 (experts).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    /// Baseline learning-rate grid; defaults to 25 log-spaced points over
    /// 1e-2..1e2 (gradient descent) or 1e-2..1e1 (exponential weights).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_grid: Option<EtaGrid>,
    /// Betting endowment ε for the count-based learners.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// δ = fraction·T for the horizon-tuned experts algorithm.
    #[serde(default = "default_delta_fraction")]
    pub delta_fraction: f64,
    /// Planted good rows in the experts stream.
    #[serde(default = "default_experts_good")]
    pub experts_good: usize,
    /// Advantage subtracted for the planted rows.
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default)]
    pub gap_mode: GapMode,
    /// Run the anytime doubling wrapper alongside the experts algorithms.
    #[serde(default)]
    pub doubling: bool,
    /// Sparse text dataset; when absent the regression task synthesizes one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    /// Synthetic regression dimension.
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    /// Synthetic label noise (standard deviation).
    #[serde(default = "default_noise")]
    pub noise: f64,
    /// Norm of the planted regression target.
    #[serde(default = "default_target_norm")]
    pub target_norm: f64,
    /// Heads probability of the scripted coin (drives the Kelly baseline).
    #[serde(default = "default_heads_probability")]
    pub heads_probability: f64,
    /// Where result files go.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn default_epsilon() -> f64 {
    1.0
}

fn default_delta_fraction() -> f64 {
    0.5
}

fn default_experts_good() -> usize {
    5
}

fn default_gap() -> f64 {
    0.025
}

fn default_dimension() -> usize {
    10
}

fn default_noise() -> f64 {
    0.1
}

fn default_target_norm() -> f64 {
    5.0
}

fn default_heads_probability() -> f64 {
    0.6
}

impl ExperimentConfig {
    /// Fresh config for a task with every field at its default.
    pub fn for_task(task: Task) -> Self {
        ExperimentConfig {
            task,
            seed: 0,
            rounds: None,
            eta_grid: None,
            epsilon: default_epsilon(),
            delta_fraction: default_delta_fraction(),
            experts_good: default_experts_good(),
            gap: default_gap(),
            gap_mode: GapMode::default(),
            doubling: false,
            dataset: None,
            dimension: default_dimension(),
            noise: default_noise(),
            target_norm: default_target_norm(),
            heads_probability: default_heads_probability(),
            out_dir: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!(
                "epsilon {} must be finite and > 0",
                self.epsilon
            )));
        }
        if !(self.delta_fraction >= 0.0) || !self.delta_fraction.is_finite() {
            return Err(Error::Config(format!(
                "delta_fraction {} must be finite and ≥ 0",
                self.delta_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.gap) {
            return Err(Error::Config(format!("gap {} outside [0, 1]", self.gap)));
        }
        if !(0.0..=1.0).contains(&self.heads_probability) {
            return Err(Error::Config(format!(
                "heads_probability {} outside [0, 1]",
                self.heads_probability
            )));
        }
        if self.dimension == 0 {
            return Err(Error::Config("dimension must be ≥ 1".to_string()));
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::Config(format!(
                "noise {} must be finite and ≥ 0",
                self.noise
            )));
        }
        if !(self.target_norm >= 0.0) || !self.target_norm.is_finite() {
            return Err(Error::Config(format!(
                "target_norm {} must be finite and ≥ 0",
                self.target_norm
            )));
        }
        Ok(())
    }

    /// Horizon with the per-task default applied.
    pub fn resolved_rounds(&self) -> u64 {
        self.rounds.unwrap_or(match self.task {
            Task::CoinGame => 100,
            Task::OloRegression => 5000,
            Task::LeaSynthetic => 32768,
        })
    }

    /// Rate grid with the per-task default applied.
    pub fn resolved_eta_grid(&self) -> EtaGrid {
        self.eta_grid.clone().unwrap_or_else(|| match self.task {
            Task::LeaSynthetic => EtaGrid::new(1e-2, 1e1, 25).expect("static grid"),
            _ => EtaGrid::new(1e-2, 1e2, 25).expect("static grid"),
        })
    }

    /// Copy with the optional fields pinned to their resolved values, ready
    /// to be echoed next to the results.
    pub fn resolved(&self) -> Self {
        let mut resolved = self.clone();
        resolved.rounds = Some(self.resolved_rounds());
        resolved.eta_grid = Some(self.resolved_eta_grid());
        resolved
    }
}
