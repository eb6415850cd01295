//! The three experiment runners. Each takes a validated config, drives the
//! learners round by round, and writes one comma-separated trace per
//! algorithm plus `summary.csv` and `config_echo.toml` into the output
//! directory. Identical configs produce byte-identical files.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, Task};
use super::hadamard::hadamard_experts;
use super::libsvm::{max_feature_index, normalize_dataset, parse_libsvm};
use super::output::{write_summary, RegretTrace, SummaryRow};
use super::synthetic::synthetic_linear_stream;
use crate::coin_betting::{
    kelly_fraction, kt_fraction_from_state, optimal_fixed_fraction_wealth, BettingState,
    CoinSequence,
};
use crate::error::{Error, Result};
use crate::lea::{doubling_wrapper, hedge_predict, lea_predict, lea_update, LeaState};
use crate::numerics::ProbSimplex;
use crate::olo::{absolute_loss_reward, HilbertVector, KtOlo, Ogd, OloAlgorithm};
use crate::potentials::shifted_kt_value;

/// What a run produced: the output directory, every file written, and the
/// in-memory summary rows (final metric per algorithm).
#[derive(Debug)]
pub struct RunArtifacts {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<SummaryRow>,
}

impl RunArtifacts {
    /// First summary value for an (algorithm, metric) pair.
    pub fn summary_value(&self, algorithm: &str, metric: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|row| row.algorithm == algorithm && row.metric == metric)
            .map(|row| row.value)
    }

    /// Smallest value of a metric across all rows of one algorithm (the
    /// oracle-tuned baseline's best rate).
    pub fn best_value(&self, algorithm: &str, metric: &str) -> Option<f64> {
        self.summary
            .iter()
            .filter(|row| row.algorithm == algorithm && row.metric == metric)
            .map(|row| row.value)
            .min_by(f64::total_cmp)
    }
}

fn prepare_out_dir(config: &ExperimentConfig) -> Result<PathBuf> {
    let dir = config
        .out_dir
        .clone()
        .ok_or_else(|| Error::Config("out_dir is required to run an experiment".to_string()))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_echo(dir: &Path, config: &ExperimentConfig) -> Result<PathBuf> {
    let path = dir.join("config_echo.toml");
    fs::write(&path, config.resolved().to_toml_string()?)?;
    Ok(path)
}

fn expect_task(config: &ExperimentConfig, task: Task) -> Result<()> {
    config.validate()?;
    if config.task != task {
        return Err(Error::Config(format!(
            "config is for task {} but this runner executes {}",
            config.task.name(),
            task.name()
        )));
    }
    Ok(())
}

/// Scripted coin game: the count-based bettor with its running wealth floor,
/// the hindsight fixed-fraction oracle, and the Kelly bettor that knows the
/// coin's bias. Coins are ±1 with the configured heads probability.
pub fn run_coin_game(config: &ExperimentConfig) -> Result<RunArtifacts> {
    expect_task(config, Task::CoinGame)?;
    let out_dir = prepare_out_dir(config)?;
    let rounds = config.resolved_rounds();
    let epsilon = config.epsilon;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let coins: Vec<f64> = (0..rounds)
        .map(|_| {
            if rng.random::<f64>() < config.heads_probability {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let sequence = CoinSequence::new(coins.clone())?;

    let mut files = Vec::new();
    let mut summary = Vec::new();

    // Count-based bettor with its floor certified every round.
    let mut kt_trace = RegretTrace::new("kt", vec!["coin", "coin_sum", "wealth", "wealth_floor"]);
    let mut state = BettingState::new(epsilon)?;
    for (i, &g) in coins.iter().enumerate() {
        let beta = kt_fraction_from_state(&state, 0.0)?;
        state = state.bet_and_settle(beta, g)?;
        let floor = epsilon * shifted_kt_value(state.round(), state.coin_sum(), 0.0)?;
        kt_trace.push(
            (i + 1) as u64,
            vec![g, state.coin_sum(), state.wealth(), floor],
        );
    }
    let kt_final = state.wealth();
    let final_floor = epsilon * shifted_kt_value(state.round(), state.coin_sum(), 0.0)?;
    let path = out_dir.join("coin_kt.csv");
    kt_trace.write_csv(&path)?;
    files.push(path);
    summary.push(SummaryRow {
        algorithm: "kt".to_string(),
        rate: None,
        metric: "final_wealth".to_string(),
        value: kt_final,
    });
    summary.push(SummaryRow {
        algorithm: "kt".to_string(),
        rate: None,
        metric: "wealth_floor".to_string(),
        value: final_floor,
    });
    summary.push(SummaryRow {
        algorithm: "kt".to_string(),
        rate: None,
        metric: "floor_slack".to_string(),
        value: kt_final - final_floor,
    });

    if !coins.is_empty() {
        let (beta_star, oracle_final) = optimal_fixed_fraction_wealth(&sequence, epsilon)?;
        let mut oracle_trace = RegretTrace::new("oracle", vec!["coin", "wealth"]);
        let mut wealth = epsilon;
        for (i, &g) in coins.iter().enumerate() {
            wealth *= 1.0 + beta_star * g;
            oracle_trace.push((i + 1) as u64, vec![g, wealth]);
        }
        let path = out_dir.join("coin_oracle.csv");
        oracle_trace.write_csv(&path)?;
        files.push(path);
        summary.push(SummaryRow {
            algorithm: "oracle".to_string(),
            rate: Some(beta_star),
            metric: "final_wealth".to_string(),
            value: oracle_final,
        });
        let oracle_floor = oracle_final / (2.0 * (coins.len() as f64).sqrt());
        summary.push(SummaryRow {
            algorithm: "kt".to_string(),
            rate: None,
            metric: "oracle_floor".to_string(),
            value: oracle_floor,
        });
        summary.push(SummaryRow {
            algorithm: "kt".to_string(),
            rate: None,
            metric: "oracle_floor_slack".to_string(),
            value: kt_final - oracle_floor,
        });

        let beta_kelly = kelly_fraction(config.heads_probability)?;
        let mut kelly_trace = RegretTrace::new("kelly", vec!["coin", "wealth"]);
        let mut wealth = epsilon;
        for (i, &g) in coins.iter().enumerate() {
            wealth *= 1.0 + beta_kelly * g;
            kelly_trace.push((i + 1) as u64, vec![g, wealth]);
        }
        let path = out_dir.join("coin_kelly.csv");
        kelly_trace.write_csv(&path)?;
        files.push(path);
        summary.push(SummaryRow {
            algorithm: "kelly".to_string(),
            rate: Some(beta_kelly),
            metric: "final_wealth".to_string(),
            value: wealth,
        });
    }

    files.push(write_echo(&out_dir, config)?);
    let summary_path = out_dir.join("summary.csv");
    write_summary(&summary_path, config.seed, &summary)?;
    files.push(summary_path);
    Ok(RunArtifacts {
        out_dir,
        files,
        summary,
    })
}

fn drive_absolute_loss(
    algo: &mut dyn OloAlgorithm,
    name: &str,
    examples: &[(HilbertVector, f64)],
) -> Result<RegretTrace> {
    let mut trace = RegretTrace::new(name, vec!["cumulative_loss"]);
    let mut cumulative = 0.0;
    for (t, (x, y)) in examples.iter().enumerate() {
        let w = algo.predict();
        cumulative += (w.dot(x) - y).abs();
        let reward = absolute_loss_reward(&w, x, *y)?;
        algo.observe(&reward)?;
        trace.push((t + 1) as u64, vec![cumulative]);
    }
    Ok(trace)
}

/// Single online pass of absolute-loss regression: the count-based learner
/// against gradient descent at every rate in the grid. Uses the configured
/// dataset, or a seeded synthetic linear stream when none is given.
pub fn run_olo_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    expect_task(config, Task::OloRegression)?;
    let out_dir = prepare_out_dir(config)?;

    let mut dropped = 0usize;
    let examples: Vec<(HilbertVector, f64)> = match &config.dataset {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| Error::Config(format!("cannot open {}: {e}", path.display())))?;
            let parsed = parse_libsvm(BufReader::new(file))?;
            let (kept, dropped_count) = normalize_dataset(&parsed);
            dropped = dropped_count;
            let dim = max_feature_index(&kept).max(1);
            let mut examples: Vec<(HilbertVector, f64)> = kept
                .iter()
                .map(|example| (example.to_dense(dim), example.label))
                .collect();
            if let Some(rounds) = config.rounds {
                examples.truncate(rounds as usize);
            }
            examples
        }
        None => {
            synthetic_linear_stream(
                config.dimension,
                config.resolved_rounds(),
                config.noise,
                config.target_norm,
                config.seed,
            )?
            .examples
        }
    };
    let dim = examples.first().map_or(1, |(x, _)| x.dim());

    let mut files = Vec::new();
    let mut summary = Vec::new();

    let mut kt = KtOlo::new(config.epsilon, dim)?;
    let trace = drive_absolute_loss(&mut kt, "kt", &examples)?;
    let final_loss = trace.final_value("cumulative_loss").unwrap_or(0.0);
    let path = out_dir.join("olo_kt.csv");
    trace.write_csv(&path)?;
    files.push(path);
    summary.push(SummaryRow {
        algorithm: "kt".to_string(),
        rate: None,
        metric: "cumulative_loss".to_string(),
        value: final_loss,
    });

    for (i, eta) in config.resolved_eta_grid().values().iter().enumerate() {
        let mut ogd = Ogd::new(*eta, dim)?;
        let trace = drive_absolute_loss(&mut ogd, "ogd", &examples)?;
        let final_loss = trace.final_value("cumulative_loss").unwrap_or(0.0);
        let path = out_dir.join(format!("olo_ogd_{i:02}.csv"));
        trace.write_csv(&path)?;
        files.push(path);
        summary.push(SummaryRow {
            algorithm: "ogd".to_string(),
            rate: Some(*eta),
            metric: "cumulative_loss".to_string(),
            value: final_loss,
        });
    }

    if config.dataset.is_some() {
        summary.push(SummaryRow {
            algorithm: "dataset".to_string(),
            rate: None,
            metric: "dropped_zero_examples".to_string(),
            value: dropped as f64,
        });
    }

    files.push(write_echo(&out_dir, config)?);
    let summary_path = out_dir.join("summary.csv");
    write_summary(&summary_path, config.seed, &summary)?;
    files.push(summary_path);
    Ok(RunArtifacts {
        out_dir,
        files,
        summary,
    })
}

struct LeaAccounting {
    trace: RegretTrace,
    cum_alg: f64,
    cum_experts: Vec<f64>,
}

impl LeaAccounting {
    fn new(name: &str, experts: usize) -> Self {
        LeaAccounting {
            trace: RegretTrace::new(name, vec!["cumulative_reward", "regret"]),
            cum_alg: 0.0,
            cum_experts: vec![0.0; experts],
        }
    }

    fn record(&mut self, t: u64, prediction: &ProbSimplex, reward: &[f64]) {
        self.cum_alg += prediction.dot(reward);
        for (cum, &g) in self.cum_experts.iter_mut().zip(reward) {
            *cum += g;
        }
        let best = self
            .cum_experts
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        self.trace.push(t, vec![self.cum_alg, best - self.cum_alg]);
    }

    fn final_regret(&self) -> f64 {
        self.trace.final_value("regret").unwrap_or(0.0)
    }
}

/// Planted-experts run: the horizon-free count-based experts algorithm (no
/// rate to tune) against exponential weights across the rate grid, all on
/// the same tiled orthogonal-rows stream; optionally the anytime doubling
/// wrapper as well.
pub fn run_lea_experiment(config: &ExperimentConfig) -> Result<RunArtifacts> {
    expect_task(config, Task::LeaSynthetic)?;
    let out_dir = prepare_out_dir(config)?;
    let rounds = config.resolved_rounds();

    let stream = hadamard_experts(
        64,
        config.experts_good,
        config.gap,
        rounds,
        config.seed,
        config.gap_mode,
    )?;
    let experts = stream.experts();
    let rewards = stream.materialize();
    for (t, row) in rewards.iter().enumerate() {
        for (i, &g) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::InvariantViolated(format!(
                    "stream reward {g} for expert {i} at round {t} outside [0,1]"
                )));
            }
        }
    }
    let prior = ProbSimplex::uniform(experts)?;

    let mut files = Vec::new();
    let mut summary = Vec::new();

    // Count-based experts algorithm, horizon-free variant.
    let mut accounting = LeaAccounting::new("kt", experts);
    let mut state = LeaState::unshifted(prior.clone());
    for (t, reward) in rewards.iter().enumerate() {
        let p = lea_predict(&state)?;
        state = lea_update(&state, &p, reward)?;
        accounting.record((t + 1) as u64, &p, reward);
    }
    let path = out_dir.join("lea_kt.csv");
    accounting.trace.write_csv(&path)?;
    files.push(path);
    summary.push(SummaryRow {
        algorithm: "kt".to_string(),
        rate: None,
        metric: "final_regret".to_string(),
        value: accounting.final_regret(),
    });

    for (i, eta) in config.resolved_eta_grid().values().iter().enumerate() {
        let mut accounting = LeaAccounting::new("hedge", experts);
        let mut cum_rewards = vec![0.0; experts];
        for (t, reward) in rewards.iter().enumerate() {
            let p = hedge_predict(&prior, &cum_rewards, *eta)?;
            for (cum, &g) in cum_rewards.iter_mut().zip(reward) {
                *cum += g;
            }
            accounting.record((t + 1) as u64, &p, reward);
        }
        let path = out_dir.join(format!("lea_hedge_{i:02}.csv"));
        accounting.trace.write_csv(&path)?;
        files.push(path);
        summary.push(SummaryRow {
            algorithm: "hedge".to_string(),
            rate: Some(*eta),
            metric: "final_regret".to_string(),
            value: accounting.final_regret(),
        });
    }

    if config.doubling {
        let predictions = doubling_wrapper(&prior, &rewards, config.delta_fraction)?;
        let mut accounting = LeaAccounting::new("kt_doubling", experts);
        for (t, (p, reward)) in predictions.iter().zip(&rewards).enumerate() {
            accounting.record((t + 1) as u64, p, reward);
        }
        let path = out_dir.join("lea_kt_doubling.csv");
        accounting.trace.write_csv(&path)?;
        files.push(path);
        summary.push(SummaryRow {
            algorithm: "kt_doubling".to_string(),
            rate: None,
            metric: "final_regret".to_string(),
            value: accounting.final_regret(),
        });
    }

    files.push(write_echo(&out_dir, config)?);
    let summary_path = out_dir.join("summary.csv");
    write_summary(&summary_path, config.seed, &summary)?;
    files.push(summary_path);
    Ok(RunArtifacts {
        out_dir,
        files,
        summary,
    })
}
