//! The `ctmg` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid model or strategy,
//! 3 numeric failure or interval guard exceeded.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::io::{format_significant, print_model, read_model, ResultFile, ResultRow};
use crate::model::{
    build_chain_game, build_erlang, build_running_example, normalise, ChainGameParams, MarkovGame, Normalisation,
    Player,
};
use crate::nets::{self, step_budget_table, NetLevel, SolverConfig, DEFAULT_INTERVAL_GUARD};
use crate::oracle::{convergence_study, fine_single_net};
use crate::strategy::{count_switch_points, evaluate_best_response, simulate, TimedPositionalStrategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ctmg", version, about = "Time-bounded reachability for continuous-time Markov games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Benchmark {
    RunningExample,
    Erlang,
    ChainGame,
}

#[derive(Debug, clap::Args)]
struct ModelArgs {
    /// Model file
    #[arg(long)]
    model: PathBuf,
    /// Time bound T in the model's own time scale
    #[arg(long)]
    horizon: f64,
}

#[derive(Debug, clap::Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write results here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Clamp displayed values to [0, 1]
    #[arg(long)]
    clamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximate optimal values and strategies
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Target precision π of the value
        #[arg(long, required_unless_present = "epsilon", conflicts_with = "epsilon")]
        precision: Option<f64>,
        /// Explicit interval width, in normed time
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=4))]
        level: u32,
        #[arg(long, default_value_t = DEFAULT_INTERVAL_GUARD)]
        guard: u64,
        #[command(flatten)]
        output: OutputArgs,
        /// Write the strategies to PREFIX.R and PREFIX.S
        #[arg(long, value_name = "PREFIX")]
        strategy_out: Option<PathBuf>,
        /// List switch points (CSV comment lines)
        #[arg(long)]
        switch_points: bool,
    },
    /// Value of a fixed strategy against a best-responding opponent
    Evaluate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        precision: f64,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=4))]
        level: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate under a fixed strategy pair
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        strategy_r: Option<PathBuf>,
        #[arg(long)]
        strategy_s: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a benchmark model
    Gen {
        #[arg(long, value_enum)]
        benchmark: Benchmark,
        /// Erlang stages
        #[arg(long, default_value_t = 30)]
        stages: usize,
        /// Erlang stage rate
        #[arg(long, default_value_t = 10.0)]
        stage_rate: f64,
        /// Chain-game length
        #[arg(long, default_value_t = ChainGameParams::default().n)]
        length: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interval counts per level and precision
    Table {
        #[arg(long)]
        horizon: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        precisions: Vec<f64>,
    },
    /// Fine-grid single-net reference values
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        /// Step width in normed time
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Empirical convergence orders
    Study {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        levels: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05,0.025,0.0125")]
        epsilons: Vec<f64>,
    },
    /// Print the normed model
    Normalise {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Runs the CLI with explicit arguments (the first is the program name) and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::InvalidModel(_) | Error::Parse { .. } | Error::StrategyMismatch(_) | Error::Io(_) => EXIT_INVALID,
        Error::GuardExceeded { .. } | Error::Numeric { .. } => EXIT_NUMERIC,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load(args: &ModelArgs) -> Result<(MarkovGame, Normalisation)> {
    let game = read_model(&args.model)?;
    let normed = normalise(&game, args.horizon)?;
    eprintln!(
        "lambda = {}, scaled horizon = {}",
        crate::model::number::format_rational(&normed.lambda),
        normed.horizon
    );
    Ok((game, normed))
}

fn rows(game: &MarkovGame, values: &[f64]) -> Vec<ResultRow> {
    game.locations()
        .iter()
        .zip(values)
        .map(|(l, &value)| ResultRow { location: l.name.clone(), value })
        .collect()
}

fn write_result(result: &ResultFile, output: &OutputArgs, switch_points: bool) -> Result<()> {
    let text = match output.format {
        Format::Csv => result.to_csv(output.clamp, switch_points),
        Format::Json => result.to_json(output.clamp),
    };
    emit(output.out.as_deref(), &text)
}

fn read_strategy(path: &Path) -> Result<TimedPositionalStrategy> {
    TimedPositionalStrategy::parse(&std::fs::read_to_string(path)?).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

fn check_horizon(strategy: &TimedPositionalStrategy, horizon: f64) -> Result<()> {
    if (strategy.horizon() - horizon).abs() > 1e-9 * horizon.max(1.0) {
        return Err(Error::StrategyMismatch(format!(
            "strategy covers [0, {}], horizon is {horizon}",
            strategy.horizon()
        )));
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Solve { model, precision, epsilon, level, guard, output, strategy_out, switch_points } => {
            let started = Instant::now();
            let (game, normed) = load(&model)?;
            let level = NetLevel::new(level)?;
            let config = match (precision, epsilon) {
                (Some(p), _) => SolverConfig::with_precision(level, normed.horizon, p),
                (None, Some(e)) => SolverConfig::with_epsilon(level, normed.horizon, e),
                (None, None) => unreachable!("clap requires one of them"),
            }
            .guard(guard)
            .retain_values(false);
            let result = nets::solve(&normed.game, &config)?;
            let lambda = normed.lambda_f64();
            let reach = result.reach_strategy.scaled(1.0 / lambda);
            let safe = result.safe_strategy.scaled(1.0 / lambda);
            if let Some(prefix) = strategy_out {
                for (s, suffix) in [(&reach, "R"), (&safe, "S")] {
                    let mut path = prefix.clone().into_os_string();
                    path.push(format!(".{suffix}"));
                    std::fs::write(PathBuf::from(path), s.to_text())?;
                }
            }
            let mut points = count_switch_points(&reach).points;
            points.extend(count_switch_points(&safe).points);
            let file = ResultFile {
                model: model.model.display().to_string(),
                level: level.k(),
                epsilon: result.epsilon,
                intervals: result.intervals,
                bound: result.value_bound,
                rows: rows(&game, &result.values),
                switch_points: points,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            write_result(&file, &output, switch_points)
        }
        Command::Evaluate { model, strategy, precision, level, output } => {
            let started = Instant::now();
            let (game, normed) = load(&model)?;
            let fixed = read_strategy(&strategy)?;
            check_horizon(&fixed, model.horizon)?;
            let lambda = normed.lambda_f64();
            let report = evaluate_best_response(&normed.game, &fixed.scaled(lambda), NetLevel::new(level)?, precision)?;
            let file = ResultFile {
                model: model.model.display().to_string(),
                level,
                epsilon: report.epsilon,
                intervals: report.intervals as u64,
                bound: report.bound,
                rows: rows(&game, &report.values),
                switch_points: count_switch_points(&fixed).points,
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            write_result(&file, &output, false)
        }
        Command::Simulate { model, strategy_r, strategy_s, n, seed } => {
            let (_, normed) = load(&model)?;
            let lambda = normed.lambda_f64();
            let load_or_empty = |path: Option<PathBuf>, player: Player| -> Result<TimedPositionalStrategy> {
                let s = match path {
                    Some(p) => read_strategy(&p)?,
                    None => TimedPositionalStrategy::new(player, model.horizon, Default::default())?,
                };
                if s.player() != player {
                    return Err(Error::StrategyMismatch(format!("expected a strategy for player {player}")));
                }
                Ok(s.scaled(lambda))
            };
            let reach = load_or_empty(strategy_r, Player::Reach)?;
            let safe = load_or_empty(strategy_s, Player::Safe)?;
            let report = simulate(&normed.game, &reach, &safe, normed.horizon, n, seed)?;
            let (lo, hi) = report.interval();
            let text = format!(
                "estimate {}\nci95 {} {}\nstd_error {}\nn {}\n",
                format_significant(report.estimate, 12),
                format_significant(lo, 12),
                format_significant(hi, 12),
                format_significant(report.std_error, 12),
                report.trajectories
            );
            emit(None, &text)
        }
        Command::Gen { benchmark, stages, stage_rate, length, out } => {
            let game = match benchmark {
                Benchmark::RunningExample => build_running_example().into_game(),
                Benchmark::Erlang => build_erlang(stages, stage_rate)?,
                Benchmark::ChainGame => build_chain_game(&ChainGameParams { n: length, ..Default::default() })?,
            };
            emit(out.as_deref(), &print_model(&game))
        }
        Command::Table { horizon, precisions } => {
            let mut text = String::from("level,precision,intervals,epsilon\n");
            for row in step_budget_table(horizon, &precisions)? {
                text.push_str(&format!(
                    "{},{:e},{},{}\n",
                    row.level.k(),
                    row.precision,
                    row.intervals,
                    format_significant(row.epsilon, 12)
                ));
            }
            emit(None, &text)
        }
        Command::Oracle { model, epsilon, output } => {
            let started = Instant::now();
            let (game, normed) = load(&model)?;
            let reference = fine_single_net(&normed.game, normed.horizon, epsilon)?;
            let file = ResultFile {
                model: model.model.display().to_string(),
                level: 1,
                epsilon: normed.horizon / reference.steps.max(1) as f64,
                intervals: reference.steps,
                bound: reference.bound,
                rows: rows(&game, &reference.values),
                switch_points: Vec::new(),
                wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            write_result(&file, &output, false)
        }
        Command::Study { model, levels, epsilons } => {
            let (_, normed) = load(&model)?;
            let levels = levels.into_iter().map(NetLevel::new).collect::<Result<Vec<_>>>()?;
            let name = model.model.display().to_string();
            let study = convergence_study(&name, &normed.game, normed.horizon, &levels, &epsilons)?;
            let mut text = study.to_csv();
            for (level, fit) in study.levels.iter().zip(&study.fits) {
                match fit {
                    Some(f) => text.push_str(&format!(
                        "# order level {} slope {:.4} residual {:.4}\n",
                        level.k(),
                        f.slope,
                        f.residual
                    )),
                    None => text.push_str(&format!("# order level {} undefined\n", level.k())),
                }
            }
            emit(None, &text)
        }
        Command::Normalise { model, out } => {
            let game = read_model(&model)?;
            let normed = normalise(&game, 1.0)?;
            eprintln!("lambda = {}", crate::model::number::format_rational(&normed.lambda));
            emit(out.as_deref(), &print_model(&normed.game))
        }
    }
}
