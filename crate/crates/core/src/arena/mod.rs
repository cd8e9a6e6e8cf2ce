//! Reference opponents and matches.
//!
//! Progress is measured by playing saved checkpoints against fixed
//! opponents (pure MCTS with random rollouts, or a uniform-random player)
//! and recording the win ratio `(wins + 0.5 draws) / games`.

mod bench;
mod mcts;
mod summary;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::{Rng as _, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::NetworkParams;
use crate::game::{ActionId, Game, GameState, Outcome, Player as Color};
use crate::search::{search, select_move, MoveMode, NetworkEvaluator, SearchConfig, SearchRng};
use crate::seed::{self, Rng};

pub use bench::{benchmark_checkpoints, BenchConfig, CheckpointSample};
pub use mcts::{pure_mcts_move, UCT_EXPLORATION};
pub use summary::{bench_rows, compare_early, mean_win_ratio_until, EarlyComparison, ProgressAxis};

/// Games after which a match is checked for identical repeats.
pub const DEGENERACY_WINDOW: u32 = 10;
/// Random opening plies injected into a degenerate match.
pub const SAMPLED_OPENING_PLIES: u32 = 2;

/// Anything that can pick a move.
pub trait Player {
    fn choose(&mut self, game: &Game, state: &GameState, rng: &mut Rng) -> Result<ActionId>;
}

/// Uniformly random legal moves.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomPlayer;

impl Player for RandomPlayer {
    fn choose(&mut self, game: &Game, state: &GameState, rng: &mut Rng) -> Result<ActionId> {
        game.legal_actions(state)
            .actions()
            .choose(rng)
            .ok_or_else(|| Error::Config("no legal move".into()))
    }
}

/// Pure MCTS with a fixed simulation budget.
#[derive(Debug, Clone, Copy)]
pub struct PureMctsPlayer {
    pub simulations: u32,
}

impl Player for PureMctsPlayer {
    fn choose(&mut self, game: &Game, state: &GameState, rng: &mut Rng) -> Result<ActionId> {
        pure_mcts_move(game, state, self.simulations, rng)
    }
}

/// Network-guided search with greedy move choice and no root noise.
pub struct NetworkPlayer<'a> {
    evaluator: NetworkEvaluator<'a>,
    config: SearchConfig,
}

impl<'a> NetworkPlayer<'a> {
    pub fn new(params: &'a NetworkParams, config: SearchConfig) -> Self {
        NetworkPlayer {
            evaluator: NetworkEvaluator::new(params),
            config,
        }
    }
}

impl Player for NetworkPlayer<'_> {
    fn choose(&mut self, game: &Game, state: &GameState, rng: &mut Rng) -> Result<ActionId> {
        let legal = game.legal_actions(state);
        if legal.count() == 1 {
            return Ok(legal.actions().next().expect("one legal action"));
        }
        let mut search_rng = SearchRng {
            noise: Rng::seed_from_u64(rng.gen()),
            tiebreak: Rng::seed_from_u64(rng.gen()),
        };
        let (policy, _) = search(game, state, &mut self.evaluator, &self.config, None, &mut search_rng)?;
        Ok(select_move(&policy, 0, 0, MoveMode::Competition, rng))
    }
}

/// A finished game.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayedGame {
    pub outcome: Outcome,
    pub moves: Vec<ActionId>,
}

/// Plays one game to the end. The first `opening_random_plies` moves are
/// uniformly random regardless of who is to move.
pub fn play_game(
    game: &Game,
    first: &mut dyn Player,
    second: &mut dyn Player,
    rng: &mut Rng,
    opening_random_plies: u32,
) -> Result<PlayedGame> {
    let mut state = game.initial_state();
    let mut moves = Vec::new();
    loop {
        let outcome = game.outcome(&state);
        if outcome.is_terminal() {
            return Ok(PlayedGame { outcome, moves });
        }
        let action = if (moves.len() as u32) < opening_random_plies {
            RandomPlayer.choose(game, &state, rng)?
        } else if state.to_move() == Color::One {
            first.choose(game, &state, rng)?
        } else {
            second.choose(game, &state, rng)?
        };
        if !game.legal_actions(&state).is_legal(action) {
            return Err(Error::IllegalAction { action: action.0 });
        }
        state = game.apply_action(&state, action)?;
        moves.push(action);
    }
}

/// Tally of a match from player A's side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompetitionResult {
    pub games: u32,
    pub wins: u32,
    pub draws: u32,
    pub losses: u32,
    pub win_ratio: f64,
    /// Games in which A moved first.
    pub games_first: u32,
    /// Whether the match was replayed with random openings because the
    /// first games were identical.
    pub sampled_openings: bool,
}

impl CompetitionResult {
    fn from_outcomes(results: &[(bool, Option<bool>)], sampled_openings: bool) -> Self {
        let games = results.len() as u32;
        let wins = results.iter().filter(|r| r.1 == Some(true)).count() as u32;
        let losses = results.iter().filter(|r| r.1 == Some(false)).count() as u32;
        let draws = games - wins - losses;
        CompetitionResult {
            games,
            wins,
            draws,
            losses,
            win_ratio: (f64::from(wins) + 0.5 * f64::from(draws)) / f64::from(games.max(1)),
            games_first: results.iter().filter(|r| r.0).count() as u32,
            sampled_openings,
        }
    }
}

/// Plays `n_games` between A and B, alternating who moves first (A starts
/// game 0). Games `2k` and `2k + 1` share a seed, so a player facing itself
/// produces mirrored results.
///
/// If the first ten games repeat exactly (every game with A first
/// identical, and every game with B first identical), the match is
/// replayed from the start with two random opening plies per game and the
/// result is flagged.
pub fn play_match(
    game: &Game,
    a: &mut dyn Player,
    b: &mut dyn Player,
    n_games: u32,
    seed: u64,
) -> Result<CompetitionResult> {
    if n_games == 0 {
        return Err(Error::Config("a match needs at least one game".into()));
    }
    let mut results = Vec::new();
    let mut records: Vec<Vec<ActionId>> = Vec::new();
    for g in 0..n_games {
        let r = play_one(game, a, b, g, seed, 0)?;
        results.push((r.0, r.1));
        records.push(r.2);
        if g + 1 == DEGENERACY_WINDOW && is_degenerate(&records) {
            let mut sampled = Vec::new();
            for g in 0..n_games {
                let r = play_one(game, a, b, g, seed, SAMPLED_OPENING_PLIES)?;
                sampled.push((r.0, r.1));
            }
            return Ok(CompetitionResult::from_outcomes(&sampled, true));
        }
    }
    Ok(CompetitionResult::from_outcomes(&results, false))
}

fn play_one(
    game: &Game,
    a: &mut dyn Player,
    b: &mut dyn Player,
    g: u32,
    seed: u64,
    opening: u32,
) -> Result<(bool, Option<bool>, Vec<ActionId>)> {
    let mut rng = seed::rng(seed, "arena", u64::from(g / 2));
    let a_first = g % 2 == 0;
    let played = if a_first {
        play_game(game, a, b, &mut rng, opening)?
    } else {
        play_game(game, b, a, &mut rng, opening)?
    };
    let a_color = if a_first { Color::One } else { Color::Two };
    let a_won = played.outcome.winner().map(|w| w == a_color);
    Ok((a_first, a_won, played.moves))
}

fn is_degenerate(records: &[Vec<ActionId>]) -> bool {
    let same = |parity: usize| {
        let mut it = records.iter().skip(parity).step_by(2);
        let first = it.next();
        it.all(|r| Some(r) == first)
    };
    same(0) && same(1)
}

/// A reference opponent, written `pure_mcts:<sims>`, `random` or
/// `checkpoint:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpponentSpec {
    PureMcts { simulations: u32 },
    Random,
    Checkpoint { path: PathBuf },
}

impl fmt::Display for OpponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpponentSpec::PureMcts { simulations } => write!(f, "pure_mcts:{simulations}"),
            OpponentSpec::Random => f.write_str("random"),
            OpponentSpec::Checkpoint { path } => write!(f, "checkpoint:{}", path.display()),
        }
    }
}

impl FromStr for OpponentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "bad opponent {s:?}: expected pure_mcts:<sims>, random or checkpoint:<path>"
            ))
        };
        match s.split_once(':') {
            None if s == "random" => Ok(OpponentSpec::Random),
            Some(("pure_mcts", n)) => match n.parse::<u32>() {
                Ok(simulations) if simulations >= 1 => Ok(OpponentSpec::PureMcts { simulations }),
                _ => Err(bad()),
            },
            Some(("checkpoint", p)) if !p.is_empty() => Ok(OpponentSpec::Checkpoint { path: p.into() }),
            _ => Err(bad()),
        }
    }
}
