use rand::seq::IteratorRandom;

use super::buffer::Experience;
use super::config::Exclusion;
use crate::curriculum::{random_ply_count, rollback_ply, trim_game, PlyTracker};
use crate::error::{Error, Result};
use crate::evaluator::TrainingExample;
use crate::game::{Game, GameState, Player};
use crate::search::{advance_root, search, select_move, Evaluator, MoveMode, SearchConfig, SearchRng};
use crate::seed;

/// Per-game settings that do not change within an iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfPlaySettings {
    pub search: SearchConfig,
    pub temperature_ply: u32,
    pub exclusion: Exclusion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfPlayGame {
    pub experiences: Vec<Experience>,
    /// Actions in the final game, including random moves and passes.
    pub length: usize,
    /// Leading moves played at random (after any rollback).
    pub random_moves: usize,
    /// Whether the random phase hit a terminal position and was rolled back.
    pub rolled_back: bool,
}

/// Plays one self-play game.
///
/// With random substitution the first `floor((1 - zeta) av)` moves are
/// uniform-random and produce no experiences; if they end the game it is
/// rolled back to `L - ceil(zeta L)` and searched from there. With trimming
/// every move is searched and the first `floor((1 - zeta) L)` experiences
/// are dropped afterwards. Every kept experience gets `z` from the final
/// outcome, signed for the player who moved.
///
/// Randomness comes from the `selfplay`, `noise` and `tiebreak` streams at
/// index `game_id`, so a game is a pure function of its inputs.
pub fn self_play_game<E: Evaluator + ?Sized>(
    game: &Game,
    evaluator: &mut E,
    settings: &SelfPlaySettings,
    zeta: f64,
    tracker: &PlyTracker,
    master_seed: u64,
    game_id: u64,
) -> Result<SelfPlayGame> {
    let mut rng = seed::rng(master_seed, "selfplay", game_id);
    let mut search_rng = SearchRng::new(master_seed, game_id);

    let mut history = vec![game.initial_state()];
    let mut random_moves = 0;
    let mut rolled_back = false;
    let k = match settings.exclusion {
        Exclusion::RandomSubstitution => random_ply_count(tracker, zeta),
        Exclusion::Trim => 0,
    };
    for _ in 0..k {
        let state = history.last().expect("non-empty history");
        if game.outcome(state).is_terminal() {
            break;
        }
        let action = game
            .legal_actions(state)
            .actions()
            .choose(&mut rng)
            .expect("ongoing position has a legal action");
        history.push(game.apply_action(state, action)?);
        random_moves += 1;
    }
    if game.outcome(history.last().expect("non-empty history")).is_terminal() {
        let resume = rollback_ply(history.len() - 1, zeta);
        history.truncate(resume + 1);
        random_moves = resume;
        rolled_back = true;
    }

    let mut steps: Vec<(TrainingExample, Player, u32)> = Vec::new();
    let mut tree = None;
    loop {
        let state: &GameState = history.last().expect("non-empty history");
        if game.outcome(state).is_terminal() {
            break;
        }
        let ply = (history.len() - 1) as u32;
        let (policy, t) = search(game, state, evaluator, &settings.search, tree.take(), &mut search_rng)?;
        let action = select_move(
            &policy,
            ply,
            settings.temperature_ply,
            MoveMode::SelfPlay,
            &mut rng,
        );
        steps.push((
            TrainingExample {
                state: game.encode_state(state),
                policy: policy.pi,
                value: 0.0,
            },
            state.to_move(),
            ply,
        ));
        let next = game.apply_action(state, action)?;
        tree = Some(advance_root(t, action)?);
        history.push(next);
    }

    let outcome = game.outcome(history.last().expect("non-empty history"));
    let mut experiences = Vec::with_capacity(steps.len());
    for (mut example, mover, ply) in steps {
        example.value = outcome.reward_for(mover).ok_or_else(|| {
            Error::Config("self-play game ended without a terminal outcome".into())
        })?;
        experiences.push(Experience {
            example,
            game_id,
            ply,
        });
    }
    let length = history.len() - 1;
    if settings.exclusion == Exclusion::Trim {
        experiences = trim_game(experiences, zeta);
    }
    Ok(SelfPlayGame {
        experiences,
        length,
        random_moves,
        rolled_back,
    })
}
