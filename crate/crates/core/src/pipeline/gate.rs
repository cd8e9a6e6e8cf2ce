use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::arena::{play_game, NetworkPlayer};
use crate::error::{Error, Result};
use crate::evaluator::NetworkParams;
use crate::game::{Game, Player};
use crate::search::SearchConfig;
use crate::seed;

/// Continuity-corrected Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonInterval {
    pub lower: f64,
    pub upper: f64,
    pub confidence: f64,
}

impl WilsonInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Two-sided normal quantile for `confidence`.
pub fn z_for(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(0.5 + confidence / 2.0)
}

/// Wilson score interval with continuity correction for `successes` out of
/// `n`, clamped to `[0, 1]`. `successes` may be fractional (draws count
/// half).
pub fn wilson_interval(successes: f64, n: u32, confidence: f64) -> Result<WilsonInterval> {
    if n == 0 {
        return Err(Error::Statistics("interval needs at least one trial".into()));
    }
    let nf = f64::from(n);
    if !(0.0..=nf).contains(&successes) {
        return Err(Error::Statistics(format!("{successes} successes out of {n} trials")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Statistics(format!("confidence {confidence} outside (0, 1)")));
    }
    let z = z_for(confidence);
    let z2 = z * z;
    let p = successes / nf;
    let denom = 2.0 * (nf + z2);
    let lower = if p == 0.0 {
        0.0
    } else {
        let root = (z2 - 2.0 - 1.0 / nf + 4.0 * p * (nf * (1.0 - p) + 1.0)).max(0.0).sqrt();
        ((2.0 * nf * p + z2 - 1.0 - z * root) / denom).max(0.0)
    };
    let upper = if p == 1.0 {
        1.0
    } else {
        let root = (z2 + 2.0 - 1.0 / nf + 4.0 * p * (nf * (1.0 - p) - 1.0)).max(0.0).sqrt();
        ((2.0 * nf * p + z2 + 1.0 + z * root) / denom).min(1.0)
    };
    Ok(WilsonInterval {
        lower,
        upper,
        confidence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateDecision {
    /// The challenger is significantly stronger.
    Replace,
    /// The challenger is significantly weaker.
    Keep,
    /// The interval became narrower than the width limit (or the game cap
    /// was reached) without a verdict. The champion stays.
    NoDecision,
}

/// Challenger's result in one evaluation game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameScore {
    Win,
    Draw,
    Loss,
}

impl GameScore {
    pub fn points(self) -> f64 {
        match self {
            GameScore::Win => 1.0,
            GameScore::Draw => 0.5,
            GameScore::Loss => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub search: SearchConfig,
    pub confidence: f64,
    /// Stop without a decision once `upper - lower` falls below this.
    pub min_width: f64,
    pub max_games: u32,
}

impl GateConfig {
    pub fn new(search: SearchConfig, max_games: u32) -> Self {
        GateConfig {
            search,
            confidence: 0.95,
            min_width: 0.1,
            max_games,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub decision: GateDecision,
    pub scores: Vec<GameScore>,
    pub interval: WilsonInterval,
}

impl GateResult {
    pub fn games(&self) -> usize {
        self.scores.len()
    }
}

/// Stopping rule applied to an interval.
pub fn gate_decision(interval: &WilsonInterval, min_width: f64) -> Option<GateDecision> {
    if interval.lower > 0.5 {
        Some(GateDecision::Replace)
    } else if interval.upper < 0.5 {
        Some(GateDecision::Keep)
    } else if interval.width() < min_width {
        Some(GateDecision::NoDecision)
    } else {
        None
    }
}

/// Runs the sequential test: draws game results from `next_game(index)`,
/// recomputing the interval after each one, until the stopping rule fires or
/// `max_games` is reached.
pub fn sequential_gate(
    confidence: f64,
    min_width: f64,
    max_games: u32,
    mut next_game: impl FnMut(u32) -> Result<GameScore>,
) -> Result<GateResult> {
    if max_games == 0 {
        return Err(Error::Config("evaluation needs at least one game".into()));
    }
    let mut scores = Vec::new();
    let mut points = 0.0;
    loop {
        let index = scores.len() as u32;
        let score = next_game(index)?;
        scores.push(score);
        points += score.points();
        let interval = wilson_interval(points, index + 1, confidence)?;
        let decision = gate_decision(&interval, min_width);
        if decision.is_some() || index + 1 == max_games {
            return Ok(GateResult {
                decision: decision.unwrap_or(GateDecision::NoDecision),
                scores,
                interval,
            });
        }
    }
}

/// Plays the challenger against the champion with greedy search, alternating
/// who moves first (the challenger starts game 0).
pub fn evaluation_gate(
    game: &Game,
    champion: &NetworkParams,
    challenger: &NetworkParams,
    config: &GateConfig,
    master_seed: u64,
    match_index: u64,
) -> Result<GateResult> {
    let mut champ = NetworkPlayer::new(champion, config.search);
    let mut chall = NetworkPlayer::new(challenger, config.search);
    sequential_gate(config.confidence, config.min_width, config.max_games, |g| {
        let mut rng = seed::rng(
            seed::derive(master_seed, "arena", match_index),
            "gate",
            u64::from(g / 2),
        );
        let challenger_first = g % 2 == 0;
        let played = if challenger_first {
            play_game(game, &mut chall, &mut champ, &mut rng, 0)?
        } else {
            play_game(game, &mut champ, &mut chall, &mut rng, 0)?
        };
        let challenger_color = if challenger_first { Player::One } else { Player::Two };
        Ok(match played.outcome.winner() {
            Some(w) if w == challenger_color => GameScore::Win,
            Some(_) => GameScore::Loss,
            None => GameScore::Draw,
        })
    })
}
