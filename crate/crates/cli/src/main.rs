use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coinbet::harness::{
    run_coin_game, run_lea_experiment, run_olo_experiment, ExperimentConfig, GapMode, RunArtifacts,
    Task,
};
use coinbet::potentials::check_excellence;
use coinbet::PotentialDescriptor;

#[derive(Parser)]
#[command(
    name = "coinbet",
    version,
    about = "Parameter-free online learning via coin betting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scripted ±1 coin game: count-based bettor vs hindsight oracle and Kelly
    Coin(RunArgs),
    /// Online absolute-loss regression: parameter-free learner vs a gradient-descent rate grid
    Olo(RunArgs),
    /// Planted-experts stream: parameter-free experts algorithm vs a Hedge rate grid
    Lea(RunArgs),
    /// Grid-verify the structural conditions on the built-in potential families
    CheckPotentials(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config; explicit flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed for streams and tie-breaking
    #[arg(long)]
    seed: Option<u64>,
    /// Number of rounds
    #[arg(long = "T")]
    rounds: Option<u64>,
    /// How many planted good experts (lea)
    #[arg(long = "experts-k")]
    experts_good: Option<usize>,
    /// Reward advantage handed to the planted experts (lea)
    #[arg(long)]
    gap: Option<f64>,
    /// Where the gap is applied: good_loss or others_reward (lea)
    #[arg(long)]
    gap_mode: Option<String>,
    /// LibSVM-format dataset; omitted means a seeded synthetic stream (olo)
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Baseline learning-rate grid as lo:hi:points, log-spaced
    #[arg(long)]
    eta_grid: Option<String>,
    /// Initial endowment of the betting algorithms
    #[arg(long)]
    epsilon: Option<f64>,
    /// Horizon shift as a fraction of T for the doubling epochs (lea)
    #[arg(long)]
    delta_fraction: Option<f64>,
    /// Also run the anytime doubling wrapper (lea)
    #[arg(long)]
    doubling: bool,
    /// Output directory (default runs/<task>)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Largest round index to verify
    #[arg(long = "T", default_value_t = 20)]
    rounds: u64,
    /// Grid points per axis
    #[arg(long, default_value_t = 50)]
    density: usize,
}

fn parse_gap_mode(raw: &str) -> Result<GapMode> {
    match raw.replace('-', "_").as_str() {
        "good_loss" => Ok(GapMode::GoodLoss),
        "others_reward" => Ok(GapMode::OthersReward),
        other => bail!("unknown gap mode {other:?}; expected good_loss or others_reward"),
    }
}

fn build_config(task: Task, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let config = ExperimentConfig::from_path(path)
                .with_context(|| format!("loading config {}", path.display()))?;
            if config.task != task {
                bail!(
                    "config declares task {} but the {} subcommand was invoked",
                    config.task.name(),
                    task.name()
                );
            }
            config
        }
        None => ExperimentConfig::for_task(task),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(rounds) = args.rounds {
        config.rounds = Some(rounds);
    }
    if let Some(k) = args.experts_good {
        config.experts_good = k;
    }
    if let Some(gap) = args.gap {
        config.gap = gap;
    }
    if let Some(mode) = &args.gap_mode {
        config.gap_mode = parse_gap_mode(mode)?;
    }
    if let Some(dataset) = &args.dataset {
        config.dataset = Some(dataset.clone());
    }
    if let Some(grid) = &args.eta_grid {
        config.eta_grid = Some(grid.parse().context("parsing --eta-grid")?);
    }
    if let Some(epsilon) = args.epsilon {
        config.epsilon = epsilon;
    }
    if let Some(fraction) = args.delta_fraction {
        config.delta_fraction = fraction;
    }
    if args.doubling {
        config.doubling = true;
    }
    if let Some(out) = &args.out {
        config.out_dir = Some(out.clone());
    }
    if config.out_dir.is_none() {
        config.out_dir = Some(PathBuf::from("runs").join(task.name()));
    }
    config.validate()?;
    Ok(config)
}

/// Prints one line to stdout; exits quietly if the receiving end of a pipe
/// has already closed (`coinbet … | head` must not panic).
fn emit(line: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn report(artifacts: &RunArtifacts) {
    emit(format_args!(
        "wrote {} files to {}",
        artifacts.files.len(),
        artifacts.out_dir.display()
    ));
    for row in &artifacts.summary {
        match row.rate {
            Some(rate) => emit(format_args!(
                "  {} (rate {rate:.6}) {} = {}",
                row.algorithm, row.metric, row.value
            )),
            None => emit(format_args!(
                "  {} {} = {}",
                row.algorithm, row.metric, row.value
            )),
        }
    }
}

fn execute(task: Task, args: &RunArgs) -> Result<()> {
    let config = build_config(task, args)?;
    let artifacts = match task {
        Task::CoinGame => run_coin_game(&config)?,
        Task::OloRegression => run_olo_experiment(&config)?,
        Task::LeaSynthetic => run_lea_experiment(&config)?,
    };
    report(&artifacts);
    Ok(())
}

fn check_potentials(args: &CheckArgs) -> Result<()> {
    let families: Vec<(String, PotentialDescriptor)> = vec![
        (
            "kt endowment=0.5".to_string(),
            PotentialDescriptor::kt(0.5)?,
        ),
        ("kt endowment=1".to_string(), PotentialDescriptor::kt(1.0)?),
        ("kt endowment=2".to_string(), PotentialDescriptor::kt(2.0)?),
        (
            "shifted_kt shift=0".to_string(),
            PotentialDescriptor::shifted_kt(0.0)?,
        ),
        (
            "shifted_kt shift=1".to_string(),
            PotentialDescriptor::shifted_kt(1.0)?,
        ),
        (
            "shifted_kt shift=8".to_string(),
            PotentialDescriptor::shifted_kt(8.0)?,
        ),
        (
            "exp_square endowment=1".to_string(),
            PotentialDescriptor::exp_square(1.0)?,
        ),
    ];
    let mut all_clean = true;
    for (name, descriptor) in &families {
        let report = check_excellence(descriptor, args.rounds, args.density)?;
        if report.is_clean() {
            emit(format_args!(
                "{name}: ok ({} checks, t <= {})",
                report.checks_run, args.rounds
            ));
        } else {
            all_clean = false;
            emit(format_args!(
                "{name}: {} violations out of {} checks",
                report.violations.len(),
                report.checks_run
            ));
            for v in report.violations.iter().take(5) {
                match v.g {
                    Some(g) => emit(format_args!(
                        "  {} at t={} x={} g={} slack={}",
                        v.condition, v.t, v.x, g, v.slack
                    )),
                    None => emit(format_args!(
                        "  {} at t={} x={} slack={}",
                        v.condition, v.t, v.x, v.slack
                    )),
                }
            }
        }
    }
    if !all_clean {
        bail!("potential condition checks failed");
    }
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Coin(args) => execute(Task::CoinGame, args),
        Command::Olo(args) => execute(Task::OloRegression, args),
        Command::Lea(args) => execute(Task::LeaSynthetic, args),
        Command::CheckPotentials(args) => check_potentials(args),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
