use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;

use super::{play_match, NetworkPlayer, OpponentSpec, Player, PureMctsPlayer, RandomPlayer};
use crate::error::{Error, Result};
use crate::evaluator::{load_params, NetworkParams};
use crate::pipeline::{
    append_metrics, checkpoint_path, read_metrics, MetricsRecord, TrainingConfig, CONFIG_FILE,
    METRICS_FILE,
};
use crate::search::SearchConfig;
use crate::seed;

/// Which checkpoints of a run to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckpointSample {
    All,
    /// Iterations divisible by `k`.
    Every(u64),
    /// `k` iterations drawn without replacement.
    Random(usize),
}

impl fmt::Display for CheckpointSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckpointSample::All => f.write_str("all"),
            CheckpointSample::Every(k) => write!(f, "every:{k}"),
            CheckpointSample::Random(k) => write!(f, "random:{k}"),
        }
    }
}

impl FromStr for CheckpointSample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad sample {s:?}: expected all, every:<k> or random:<k>"));
        match s.split_once(':') {
            None if s == "all" => Ok(CheckpointSample::All),
            Some(("every", k)) => match k.parse() {
                Ok(k) if k >= 1 => Ok(CheckpointSample::Every(k)),
                _ => Err(bad()),
            },
            Some(("random", k)) => k.parse().map(CheckpointSample::Random).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub opponent: OpponentSpec,
    pub games: u32,
    pub sample: CheckpointSample,
    pub seed: u64,
    /// Simulations per move for the checkpoint (default: the run's
    /// self-play setting).
    pub network_simulations: Option<u32>,
}

/// Plays sampled checkpoints of the run in `run_dir` against a reference
/// opponent and appends one row per checkpoint to its metrics file, keyed
/// by the iteration, epoch, step and elapsed values of the training row.
///
/// A sampled checkpoint whose file is missing yields a row with opponent
/// `missing:<file>` and no games. Returns the appended rows.
pub fn benchmark_checkpoints(run_dir: &Path, config: &BenchConfig) -> Result<Vec<MetricsRecord>> {
    let training = TrainingConfig::load(&run_dir.join(CONFIG_FILE))?;
    let game = training.game()?;
    let metrics_path = run_dir.join(METRICS_FILE);
    let (_, rows) = read_metrics(&metrics_path)?;
    let mut keys: Vec<MetricsRecord> = rows.into_iter().filter(|r| r.is_training()).collect();
    keys.sort_by_key(|r| r.iteration);
    keys.dedup_by_key(|r| r.iteration);

    let selected: Vec<MetricsRecord> = match config.sample {
        CheckpointSample::All => keys,
        CheckpointSample::Every(k) => keys.into_iter().filter(|r| r.iteration % k == 0).collect(),
        CheckpointSample::Random(k) => {
            let mut rng = seed::rng(config.seed, "arena", u64::MAX);
            let mut picked: Vec<MetricsRecord> =
                keys.choose_multiple(&mut rng, k).cloned().collect();
            picked.sort_by_key(|r| r.iteration);
            picked
        }
    };

    let search = SearchConfig {
        simulations: config.network_simulations.unwrap_or(training.simulations),
        ..training.competition_search()
    };
    let fixed: Option<NetworkParams> = match &config.opponent {
        OpponentSpec::Checkpoint { path } => Some(load_params(path)?),
        _ => None,
    };

    let mut out = Vec::new();
    for key in selected {
        let path = checkpoint_path(run_dir, key.iteration);
        let mut row = MetricsRecord {
            opponent: config.opponent.to_string(),
            ..key.clone()
        };
        if !path.exists() {
            log::warn!("checkpoint {} is missing; recording an empty row", path.display());
            row.opponent = format!(
                "missing:{}",
                path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
            );
            out.push(row);
            continue;
        }
        let params = load_params(&path)?;
        let mut agent = NetworkPlayer::new(&params, search);
        let mut opponent: Box<dyn Player + '_> = match (&config.opponent, &fixed) {
            (OpponentSpec::PureMcts { simulations }, _) => Box::new(PureMctsPlayer {
                simulations: *simulations,
            }),
            (OpponentSpec::Random, _) => Box::new(RandomPlayer),
            (OpponentSpec::Checkpoint { .. }, Some(p)) => Box::new(NetworkPlayer::new(p, search)),
            (OpponentSpec::Checkpoint { .. }, None) => unreachable!("loaded above"),
        };
        let match_seed = seed::derive(config.seed, "arena", key.iteration);
        let result = play_match(&game, &mut agent, opponent.as_mut(), config.games, match_seed)?;
        if result.sampled_openings {
            row.opponent.push_str("+sampled_openings");
        }
        row.games = result.games;
        row.wins = result.wins;
        row.draws = result.draws;
        row.losses = result.losses;
        row.win_ratio = Some(result.win_ratio);
        log::info!(
            "iteration {}: {} against {} ({} games)",
            key.iteration,
            result.win_ratio,
            config.opponent,
            result.games
        );
        out.push(row);
    }
    append_metrics(&metrics_path, &out)?;
    Ok(out)
}
