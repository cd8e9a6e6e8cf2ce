use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curriculum::CurriculumSchedule;
use crate::error::{Error, Result};
use crate::evaluator::Architecture;
use crate::game::{Game, GameKind};
use crate::search::{NoiseConfig, SearchConfig};

/// Which of the two training loops to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopVariant {
    /// Self-play always uses the latest weights.
    Alphazero,
    /// Self-play uses the best weights so far; a new network replaces them
    /// only after winning an evaluation match.
    Alphagozero,
}

/// How the early part of each game is kept out of the buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    /// Play the excluded moves at random instead of searching them.
    RandomSubstitution,
    /// Search every move, then drop the first experiences of the game.
    Trim,
}

/// Experiment configuration as read from JSON. Fields left out take the
/// defaults below; `architecture`, `dirichlet_alpha` and `temperature_ply`
/// default per game and board size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub game: GameKind,
    pub board_size: usize,
    pub schedule: CurriculumSchedule,
    pub architecture: Option<Architecture>,
    pub simulations: u32,
    pub c_puct: f64,
    pub dirichlet_alpha: Option<f64>,
    pub noise_weight: f64,
    pub temperature_ply: Option<u32>,
    pub games_per_iteration: u32,
    pub buffer_capacity_games: usize,
    pub prune_fraction: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub l2: f64,
    pub epochs_per_iteration: u32,
    pub master_seed: u64,
    pub variant: LoopVariant,
    pub exclusion: Exclusion,
    /// Simulations per move in evaluation matches (default: `simulations`).
    pub gate_simulations: Option<u32>,
    pub gate_max_games: u32,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            game: GameKind::Reversi,
            board_size: 6,
            schedule: CurriculumSchedule::baseline(),
            architecture: None,
            simulations: 64,
            c_puct: crate::search::DEFAULT_C_PUCT,
            dirichlet_alpha: None,
            noise_weight: 0.25,
            temperature_ply: None,
            games_per_iteration: 25,
            buffer_capacity_games: 500,
            prune_fraction: 0.2,
            batch_size: 64,
            learning_rate: 0.01,
            momentum: 0.9,
            l2: 1e-4,
            epochs_per_iteration: 20,
            master_seed: 1,
            variant: LoopVariant::Alphazero,
            exclusion: Exclusion::RandomSubstitution,
            gate_simulations: None,
            gate_max_games: 400,
        }
    }
}

impl TrainingConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: TrainingConfig = serde_json::from_str(text)?;
        config.resolved()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn game(&self) -> Result<Game> {
        Game::new(self.game, self.board_size)
    }

    /// Fills in the game-dependent defaults and validates every field.
    pub fn resolved(mut self) -> Result<Self> {
        let game = self.game()?;
        let arch = self
            .architecture
            .take()
            .unwrap_or_else(|| Architecture::desk_scale(game.size(), game.action_count()));
        arch.validate()?;
        if arch.size != game.size() || arch.actions != game.action_count() {
            return Err(field(
                "architecture",
                format!(
                    "descriptor {arch} does not fit a {}x{} board with {} actions",
                    game.size(),
                    game.size(),
                    game.action_count()
                ),
            ));
        }
        self.architecture = Some(arch);
        self.dirichlet_alpha
            .get_or_insert(NoiseConfig::for_game(&game).alpha);
        self.temperature_ply.get_or_insert(match game.kind() {
            GameKind::TicTacToe => 2,
            GameKind::Reversi if game.size() >= 8 => 10,
            GameKind::Reversi => game.size() as u32,
        });
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        let positive = [
            ("simulations", f64::from(self.simulations)),
            ("c_puct", self.c_puct),
            ("dirichlet_alpha", self.dirichlet_alpha.unwrap_or(1.0)),
            ("games_per_iteration", f64::from(self.games_per_iteration)),
            ("buffer_capacity_games", self.buffer_capacity_games as f64),
            ("batch_size", self.batch_size as f64),
            ("learning_rate", self.learning_rate),
            ("epochs_per_iteration", f64::from(self.epochs_per_iteration)),
            ("gate_max_games", f64::from(self.gate_max_games)),
            ("gate_simulations", f64::from(self.gate_simulations.unwrap_or(1))),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(field(name, format!("must be positive, got {value}")));
            }
        }
        let unit = [
            ("noise_weight", self.noise_weight),
            ("momentum", self.momentum),
        ];
        for (name, value) in unit {
            if !(0.0..=1.0).contains(&value) {
                return Err(field(name, format!("must be in [0, 1], got {value}")));
            }
        }
        if !(0.0..1.0).contains(&self.prune_fraction) {
            return Err(field(
                "prune_fraction",
                format!("must be in [0, 1), got {}", self.prune_fraction),
            ));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(field("l2", format!("must be non-negative, got {}", self.l2)));
        }
        Ok(())
    }

    pub fn architecture(&self) -> Architecture {
        let game = self.game().expect("validated config");
        self.architecture
            .clone()
            .unwrap_or_else(|| Architecture::desk_scale(game.size(), game.action_count()))
    }

    /// Search settings for self-play moves (root noise on).
    pub fn self_play_search(&self) -> SearchConfig {
        let game = self.game().expect("validated config");
        SearchConfig {
            simulations: self.simulations,
            c_puct: self.c_puct,
            noise: NoiseConfig {
                alpha: self
                    .dirichlet_alpha
                    .unwrap_or_else(|| NoiseConfig::for_game(&game).alpha),
                weight: self.noise_weight,
                enabled: self.noise_weight > 0.0,
            },
        }
    }

    /// Search settings for competition moves (greedy, no noise).
    pub fn competition_search(&self) -> SearchConfig {
        SearchConfig {
            simulations: self.gate_simulations.unwrap_or(self.simulations),
            c_puct: self.c_puct,
            noise: NoiseConfig::DISABLED,
        }
    }

    pub fn temperature_ply(&self) -> u32 {
        self.temperature_ply.unwrap_or(0)
    }

    /// Flattened `key=value` pairs for the metrics header.
    pub fn header_pairs(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("config serialises");
        let mut pairs: Vec<(String, String)> = value
            .as_object()
            .expect("config is an object")
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect();
        pairs.push(("schedule_name".into(), self.schedule.name().into()));
        pairs.push((
            "seed_streams".into(),
            crate::seed::STREAMS.join(","),
        ));
        pairs
    }

    /// Equal to `other` in everything except the curriculum schedule.
    pub fn same_except_schedule(&self, other: &TrainingConfig) -> bool {
        let mut a = self.clone();
        a.schedule = other.schedule.clone();
        a == *other
    }
}

fn field(name: &str, message: String) -> Error {
    Error::Config(format!("field `{name}`: {message}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_for_six_by_six() {
        let c = TrainingConfig::from_json("{}").unwrap();
        assert_eq!(c.board_size, 6);
        assert_eq!(c.temperature_ply, Some(6));
        assert_eq!(c.architecture().to_string(), "input=6x6x2 conv=32 conv=32 dense=128 actions=37 residual=off");
        let alpha = c.dirichlet_alpha.unwrap();
        assert!((alpha - 0.6 * 65.0 / 37.0).abs() < 1e-12);
        assert_eq!(c.epochs_per_iteration, 20);
    }

    #[test]
    fn explicit_fields_and_schedule() {
        let c = TrainingConfig::from_json(
            r#"{"game": "tictactoe", "board_size": 3, "schedule": "reversi_eq5",
                "simulations": 10, "variant": "alphagozero", "exclusion": "trim"}"#,
        )
        .unwrap();
        assert_eq!(c.game, GameKind::TicTacToe);
        assert_eq!(c.temperature_ply, Some(2));
        assert_eq!(c.schedule.zeta(250), 0.75);
        assert_eq!(c.variant, LoopVariant::Alphagozero);
        let round = TrainingConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(round, c);
    }

    #[test]
    fn bad_fields_are_named() {
        let cases = [
            (r#"{"simulations": 0}"#, "simulations"),
            (r#"{"prune_fraction": 1.0}"#, "prune_fraction"),
            (r#"{"momentum": 1.5}"#, "momentum"),
            (r#"{"board_size": 5}"#, "board size"),
            (r#"{"architecture": "input=8x8x2 actions=65 residual=off"}"#, "architecture"),
            (r#"{"schedule": "fast"}"#, "fast"),
            (r#"{"unknown_knob": 3}"#, "unknown_knob"),
        ];
        for (json, needle) in cases {
            let err = TrainingConfig::from_json(json).unwrap_err().to_string();
            assert!(err.contains(needle), "{json}: {err}");
        }
        let err = TrainingConfig::from_json("{\n  \"simulations\": \"x\"\n}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn schedule_only_difference() {
        let a = TrainingConfig::from_json(r#"{"schedule": "baseline"}"#).unwrap();
        let b = TrainingConfig::from_json(r#"{"schedule": "reversi_eq5"}"#).unwrap();
        let c = TrainingConfig::from_json(r#"{"schedule": "reversi_eq5", "board_size": 8}"#).unwrap();
        assert!(a.same_except_schedule(&b));
        assert!(!a.same_except_schedule(&c));
    }

    #[test]
    fn header_pairs_cover_fields() {
        let c = TrainingConfig::from_json(r#"{"schedule": "reversi_eq5"}"#).unwrap();
        let pairs = c.header_pairs();
        let get = |k: &str| pairs.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
        assert_eq!(get("schedule").as_deref(), Some("reversi_eq5"));
        assert_eq!(get("batch_size").as_deref(), Some("64"));
        assert_eq!(get("game").as_deref(), Some("reversi"));
        assert!(get("master_seed").is_some());
    }
}
