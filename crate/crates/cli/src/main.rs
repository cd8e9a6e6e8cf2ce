//! `endgame`: train, compare, benchmark, inspect and play.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

mod play;

use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use endgame_core::arena::{
    benchmark_checkpoints, compare_early, BenchConfig, CheckpointSample, NetworkPlayer, OpponentSpec,
};
use endgame_core::curriculum::CurriculumSchedule;
use endgame_core::evaluator::{load_params, NetworkParams};
use endgame_core::game::{format_board, parse_board, Game, GameKind, Player as Color};
use endgame_core::pipeline::{read_metrics, IterationSummary, Run, TrainingConfig, METRICS_FILE, STATE_FILE};
use endgame_core::search::{search, NetworkEvaluator, SearchConfig, SearchRng, UniformEvaluator};
use endgame_core::seed;

#[derive(Parser)]
#[command(name = "endgame", version, about = "End-game-first curriculum self-play training")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train (or resume) one run.
    Train {
        /// Experiment config (JSON). Optional when resuming.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        run_dir: PathBuf,
        /// Stop once this many iterations have completed in total.
        #[arg(long)]
        iterations: Option<u64>,
        /// Stop once training time reaches this many seconds.
        #[arg(long)]
        seconds: Option<f64>,
        /// Schedule preset or JSON breakpoint list, replacing the config's.
        #[arg(long)]
        schedule: Option<String>,
        /// Master seed, replacing the config's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train two runs that differ only in schedule, alternating iterations.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        /// Parent directory; runs go to `<out>/a` and `<out>/b`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        iterations: Option<u64>,
        #[arg(long)]
        seconds: Option<f64>,
        /// Master seed for both runs, replacing the configs'.
        #[arg(long)]
        seed: Option<u64>,
        /// Benchmark every k-th checkpoint of both runs when training ends.
        #[arg(long)]
        bench_every: Option<u64>,
        #[arg(long, default_value = "pure_mcts:50")]
        bench_opponent: String,
        #[arg(long, default_value_t = 30)]
        bench_games: u32,
    },
    /// Play checkpoints of a run against a reference opponent and append
    /// the results to its metrics file.
    Bench {
        #[arg(long)]
        run_dir: PathBuf,
        /// `pure_mcts:<sims>`, `random` or `checkpoint:<path>`.
        #[arg(long, default_value = "pure_mcts:50")]
        opponent: String,
        #[arg(long, default_value_t = 30)]
        games: u32,
        /// `all`, `every:<k>` or `random:<k>`.
        #[arg(long, default_value = "all")]
        sample: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Simulations per move for the checkpoints.
        #[arg(long)]
        sims: Option<u32>,
    },
    /// Play against a checkpoint in the terminal.
    Play {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 64)]
        sims: u32,
        /// Your side: X moves first, O second.
        #[arg(long, default_value = "X")]
        human_color: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the root search statistics for a position.
    Inspect {
        /// Network to search with; without one, priors are uniform and
        /// values zero.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Board file (rows of `.XO` then `to_move: X|O`); default is the
        /// initial position.
        #[arg(long)]
        position: Option<PathBuf>,
        #[arg(long, default_value = "reversi")]
        game: String,
        #[arg(long, default_value_t = 6)]
        size: usize,
        #[arg(long, default_value_t = 200)]
        sims: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Error classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(r: anyhow::Result<T>) -> CliResult<T> {
    r.map_err(Failure::Usage)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp_secs()
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Train {
            config,
            run_dir,
            iterations,
            seconds,
            schedule,
            seed,
        } => train(config, &run_dir, iterations, seconds, schedule, seed),
        Command::Compare {
            config_a,
            config_b,
            out,
            iterations,
            seconds,
            seed,
            bench_every,
            bench_opponent,
            bench_games,
        } => {
            let bench = match bench_every {
                Some(k) => Some(usage(bench_config(&bench_opponent, bench_games, &format!("every:{k}"), 0, None))?),
                None => None,
            };
            compare(&config_a, &config_b, &out, iterations, seconds, seed, bench)
        }
        Command::Bench {
            run_dir,
            opponent,
            games,
            sample,
            seed,
            sims,
        } => {
            let config = usage(bench_config(&opponent, games, &sample, seed, sims))?;
            bench(&run_dir, &config)
        }
        Command::Play {
            checkpoint,
            sims,
            human_color,
            seed,
        } => {
            let human = match human_color.as_str() {
                "X" | "x" => Color::One,
                "O" | "o" => Color::Two,
                other => return Err(Failure::Usage(anyhow::anyhow!("--human-color must be X or O, got {other:?}"))),
            };
            play(&checkpoint, sims, human, seed)
        }
        Command::Inspect {
            checkpoint,
            position,
            game,
            size,
            sims,
            seed,
        } => inspect(checkpoint, position, &game, size, sims, seed),
    }
}

fn load_config(path: &Path, schedule: Option<&str>, seed: Option<u64>) -> anyhow::Result<TrainingConfig> {
    let mut config =
        TrainingConfig::load(path).with_context(|| format!("reading config {}", path.display()))?;
    if let Some(s) = schedule {
        config.schedule = s.parse::<CurriculumSchedule>().context("--schedule")?;
    }
    if let Some(s) = seed {
        config.master_seed = s;
    }
    Ok(config.resolved()?)
}

fn open_run(
    run_dir: &Path,
    config: Option<&Path>,
    schedule: Option<&str>,
    seed: Option<u64>,
) -> CliResult<Run> {
    let resuming = run_dir.join(STATE_FILE).exists();
    match (config, resuming) {
        (Some(path), _) => {
            let config = usage(load_config(path, schedule, seed))?;
            usage(Run::open_or_create(run_dir, config).map_err(Into::into))
        }
        (None, true) => {
            if schedule.is_some() || seed.is_some() {
                return Err(Failure::Usage(anyhow::anyhow!(
                    "--schedule and --seed need --config"
                )));
            }
            Ok(Run::open(run_dir).with_context(|| format!("resuming {}", run_dir.display()))?)
        }
        (None, false) => Err(Failure::Usage(anyhow::anyhow!(
            "{} holds no run; pass --config to start one",
            run_dir.display()
        ))),
    }
}

fn budget_left(run: &Run, iterations: Option<u64>, seconds: Option<f64>) -> bool {
    let s = run.state();
    iterations.is_none_or(|n| s.iteration < n) && seconds.is_none_or(|t| s.elapsed_seconds < t)
}

fn report(label: &str, run: &Run, summary: &IterationSummary) {
    let s = run.state();
    let gate = summary
        .gate
        .as_ref()
        .map(|g| format!(" gate {:?} after {} games", g.decision, g.games()))
        .unwrap_or_default();
    println!(
        "{label}iteration {} zeta {} games {} experiences {} (buffer {}) mean length {:.1} rolled back {} steps {} loss {:.4} epoch {} elapsed {:.1}s{gate}",
        s.iteration,
        summary.zeta,
        summary.games,
        summary.experiences_added,
        summary.buffer_experiences,
        summary.mean_game_length,
        summary.rolled_back_games,
        summary.steps,
        summary.final_epoch_loss,
        s.epoch,
        s.elapsed_seconds,
    );
}

fn train(
    config: Option<PathBuf>,
    run_dir: &Path,
    iterations: Option<u64>,
    seconds: Option<f64>,
    schedule: Option<String>,
    seed: Option<u64>,
) -> CliResult<()> {
    if iterations.is_none() && seconds.is_none() {
        return Err(Failure::Usage(anyhow::anyhow!("give --iterations or --seconds")));
    }
    let mut run = open_run(run_dir, config.as_deref(), schedule.as_deref(), seed)?;
    while budget_left(&run, iterations, seconds) {
        let summary = run.run_iteration()?;
        report("", &run, &summary);
    }
    Ok(())
}

fn compare(
    config_a: &Path,
    config_b: &Path,
    out: &Path,
    iterations: Option<u64>,
    seconds: Option<f64>,
    seed: Option<u64>,
    bench_config: Option<BenchConfig>,
) -> CliResult<()> {
    if iterations.is_none() && seconds.is_none() {
        return Err(Failure::Usage(anyhow::anyhow!("give --iterations or --seconds")));
    }
    let a = usage(load_config(config_a, None, seed))?;
    let b = usage(load_config(config_b, None, seed))?;
    if !a.same_except_schedule(&b) {
        return Err(Failure::Usage(anyhow::anyhow!(
            "{} and {} differ in more than the schedule",
            config_a.display(),
            config_b.display()
        )));
    }
    let mut runs = [
        usage(Run::open_or_create(&out.join("a"), a).map_err(Into::into))?,
        usage(Run::open_or_create(&out.join("b"), b).map_err(Into::into))?,
    ];
    loop {
        let mut progressed = false;
        for (label, run) in ["a ", "b "].iter().zip(runs.iter_mut()) {
            if budget_left(run, iterations, seconds) {
                let summary = run.run_iteration()?;
                report(label, run, &summary);
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    if let Some(config) = bench_config {
        for run in &runs {
            bench(run.dir(), &config)?;
        }
        let (_, a_rows) = read_metrics(&runs[0].dir().join(METRICS_FILE))?;
        let (_, b_rows) = read_metrics(&runs[1].dir().join(METRICS_FILE))?;
        let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        for c in compare_early(&a_rows, &b_rows, &config.opponent.to_string(), 0.5) {
            println!(
                "first half by {} (<= {:.1}): a {} b {}",
                c.axis,
                c.horizon,
                fmt(c.baseline),
                fmt(c.curriculum)
            );
        }
    }
    Ok(())
}

fn bench_config(
    opponent: &str,
    games: u32,
    sample: &str,
    seed: u64,
    sims: Option<u32>,
) -> anyhow::Result<BenchConfig> {
    if games == 0 {
        bail!("--games must be positive");
    }
    Ok(BenchConfig {
        opponent: opponent.parse::<OpponentSpec>()?,
        games,
        sample: sample.parse::<CheckpointSample>()?,
        seed,
        network_simulations: sims,
    })
}

fn bench(run_dir: &Path, config: &BenchConfig) -> CliResult<()> {
    let rows = benchmark_checkpoints(run_dir, config)
        .with_context(|| format!("benchmarking {}", run_dir.display()))?;
    for r in rows {
        let ratio = r.win_ratio.map_or_else(String::new, |w| format!("{w:.3}"));
        println!(
            "{} iteration {} steps {} epoch {} vs {}: {}/{}/{} win ratio {ratio}",
            run_dir.display(),
            r.iteration,
            r.steps,
            r.epoch,
            r.opponent,
            r.wins,
            r.draws,
            r.losses
        );
    }
    Ok(())
}

fn game_for(params: &NetworkParams) -> anyhow::Result<Game> {
    let arch = &params.architecture;
    if arch.size == 3 && arch.actions == 9 {
        return Ok(Game::tictactoe());
    }
    let game = Game::reversi(arch.size)?;
    if game.action_count() != arch.actions {
        bail!("checkpoint architecture {arch} matches no known game");
    }
    Ok(game)
}

fn play(checkpoint: &Path, sims: u32, human: Color, seed: u64) -> CliResult<()> {
    let params = usage(load_params(checkpoint).with_context(|| format!("loading {}", checkpoint.display())))?;
    let game = usage(game_for(&params))?;
    let mut agent = NetworkPlayer::new(&params, SearchConfig::greedy(sims));
    let mut rng = seed::rng(seed, "arena", 0);
    let stdin = io::stdin();
    let mut stdout = io::stdout();
    play::play_loop(&game, &mut agent, human, &mut rng, BufReader::new(stdin.lock()), &mut stdout)?;
    Ok(())
}

fn inspect(
    checkpoint: Option<PathBuf>,
    position: Option<PathBuf>,
    game: &str,
    size: usize,
    sims: u32,
    seed: u64,
) -> CliResult<()> {
    let params = match &checkpoint {
        Some(p) => Some(usage(load_params(p).with_context(|| format!("loading {}", p.display())))?),
        None => None,
    };
    let game = match &params {
        Some(p) => usage(game_for(p))?,
        None => {
            let kind = match game {
                "reversi" => GameKind::Reversi,
                "tictactoe" | "tic_tac_toe" => GameKind::TicTacToe,
                other => return Err(Failure::Usage(anyhow::anyhow!("unknown game {other:?}"))),
            };
            usage(Game::new(kind, size).map_err(Into::into))?
        }
    };
    let state = match &position {
        Some(p) => {
            let text = usage(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))?;
            usage(parse_board(&text).with_context(|| format!("parsing {}", p.display())))?
        }
        None => game.initial_state(),
    };
    if state.size() != game.size() {
        return Err(Failure::Usage(anyhow::anyhow!(
            "position is {}x{}, game is {}x{}",
            state.size(),
            state.size(),
            game.size(),
            game.size()
        )));
    }
    if game.outcome(&state).is_terminal() {
        return Err(Failure::Usage(anyhow::anyhow!("position is already decided")));
    }
    let config = SearchConfig::greedy(sims);
    let mut rng = SearchRng::new(seed, 0);
    let (_, tree) = match &params {
        Some(p) => search(&game, &state, &mut NetworkEvaluator::new(p), &config, None, &mut rng)?,
        None => search(&game, &state, &mut UniformEvaluator::default(), &config, None, &mut rng)?,
    };
    print!("{}", format_board(&state));
    print!("{}", tree.root_table());
    Ok(())
}
