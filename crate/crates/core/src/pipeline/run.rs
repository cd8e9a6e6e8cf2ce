use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::buffer::ExperienceBuffer;
use super::config::{LoopVariant, TrainingConfig};
use super::gate::{evaluation_gate, GateConfig, GateDecision, GateResult};
use super::metrics::{append_metrics, create_metrics, retain_metrics, MetricsRecord};
use super::optimise::{optimise, OptimiseConfig};
use super::selfplay::{self_play_game, SelfPlaySettings};
use crate::curriculum::PlyTracker;
use crate::error::{Error, Result};
use crate::evaluator::{init_params, load_params, save_params, NetworkParams};
use crate::game::Game;
use crate::search::NetworkEvaluator;
use crate::seed;

pub const CONFIG_FILE: &str = "config.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const STATE_FILE: &str = "state.json";
pub const BUFFER_FILE: &str = "buffer.bin";
pub const BEST_FILE: &str = "best.bin";

pub fn checkpoint_path(run_dir: &Path, iteration: u64) -> PathBuf {
    run_dir.join(format!("ckpt_{iteration}.bin"))
}

/// Counters carried from one iteration to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationState {
    /// Completed iterations `i`.
    pub iteration: u64,
    /// Cumulative epochs `t`.
    pub epoch: u64,
    /// Cumulative optimiser steps.
    pub steps: u64,
    /// Seconds spent in self-play and optimisation.
    pub elapsed_seconds: f64,
    pub tracker: PlyTracker,
    pub games_played: u64,
    /// Iteration whose weights are the current champion (gated loop only).
    pub best_iteration: Option<u64>,
}

/// What one iteration did.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSummary {
    pub iteration: u64,
    pub zeta: f64,
    pub games: u32,
    pub experiences_added: usize,
    /// Experiences in the buffer while optimising.
    pub buffer_experiences: usize,
    pub mean_game_length: f64,
    pub rolled_back_games: u32,
    pub steps: u64,
    pub final_epoch_loss: f64,
    pub gate: Option<GateResult>,
}

/// A training run bound to its directory. The directory holds the config
/// snapshot, metrics, one checkpoint per iteration and enough state to
/// resume.
pub struct Run {
    dir: PathBuf,
    config: TrainingConfig,
    game: Game,
    state: IterationState,
    params: NetworkParams,
    best: Option<NetworkParams>,
    buffer: ExperienceBuffer,
}

impl Run {
    /// Starts a fresh run in `dir`, which must not already hold one.
    pub fn create(dir: &Path, config: TrainingConfig) -> Result<Run> {
        let config = config.resolved()?;
        if dir.join(STATE_FILE).exists() {
            return Err(Error::Config(format!(
                "{} already contains a run; resume it instead",
                dir.display()
            )));
        }
        std::fs::create_dir_all(dir)?;
        let game = config.game()?;
        let params = init_params(&config.architecture(), config.master_seed)?;
        let gated = config.variant == LoopVariant::Alphagozero;
        let run = Run {
            dir: dir.to_path_buf(),
            game,
            state: IterationState {
                iteration: 0,
                epoch: 0,
                steps: 0,
                elapsed_seconds: 0.0,
                tracker: PlyTracker::default(),
                games_played: 0,
                best_iteration: gated.then_some(0),
            },
            best: gated.then(|| params.clone()),
            params,
            buffer: ExperienceBuffer::new(config.buffer_capacity_games),
            config,
        };
        std::fs::write(dir.join(CONFIG_FILE), run.config.to_json())?;
        create_metrics(&dir.join(METRICS_FILE), &run.config.header_pairs())?;
        run.save_state()?;
        Ok(run)
    }

    /// Reopens a run after the last completed iteration. Metrics rows from
    /// an iteration that did not finish are dropped.
    pub fn open(dir: &Path) -> Result<Run> {
        let config = TrainingConfig::load(&dir.join(CONFIG_FILE))?;
        let state: IterationState =
            serde_json::from_str(&std::fs::read_to_string(dir.join(STATE_FILE))?)?;
        let game = config.game()?;
        let params = if state.iteration == 0 {
            init_params(&config.architecture(), config.master_seed)?
        } else {
            load_params(&checkpoint_path(dir, state.iteration))?
        };
        let best = match config.variant {
            LoopVariant::Alphagozero if dir.join(BEST_FILE).exists() => {
                Some(load_params(&dir.join(BEST_FILE))?)
            }
            LoopVariant::Alphagozero => Some(params.clone()),
            LoopVariant::Alphazero => None,
        };
        let buffer = if dir.join(BUFFER_FILE).exists() {
            ExperienceBuffer::load(&dir.join(BUFFER_FILE))?
        } else {
            ExperienceBuffer::new(config.buffer_capacity_games)
        };
        let done = state.iteration;
        retain_metrics(&dir.join(METRICS_FILE), |r| r.iteration <= done)?;
        Ok(Run {
            dir: dir.to_path_buf(),
            config,
            game,
            state,
            params,
            best,
            buffer,
        })
    }

    /// Resumes the run in `dir` if there is one (its config must match),
    /// otherwise creates it.
    pub fn open_or_create(dir: &Path, config: TrainingConfig) -> Result<Run> {
        if !dir.join(STATE_FILE).exists() {
            return Run::create(dir, config);
        }
        let run = Run::open(dir)?;
        if run.config != config.resolved()? {
            return Err(Error::Config(format!(
                "{} was started with a different config",
                dir.display()
            )));
        }
        Ok(run)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn config(&self) -> &TrainingConfig {
        &self.config
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn state(&self) -> &IterationState {
        &self.state
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn best_params(&self) -> Option<&NetworkParams> {
        self.best.as_ref()
    }

    pub fn buffer(&self) -> &ExperienceBuffer {
        &self.buffer
    }

    /// One pass of the training loop: self-play a set number of games into
    /// the buffer, optimise for `epochs_per_iteration` epochs, prune the
    /// oldest games, then (gated loop) pit the new weights against the
    /// champion. Checkpoints and metrics are written before returning.
    pub fn run_iteration(&mut self) -> Result<IterationSummary> {
        let c = &self.config;
        let started = Instant::now();
        let zeta = c.schedule.zeta(self.state.epoch);
        let settings = SelfPlaySettings {
            search: c.self_play_search(),
            temperature_ply: c.temperature_ply(),
            exclusion: c.exclusion,
        };
        let player = self.best.as_ref().unwrap_or(&self.params);
        let mut evaluator = NetworkEvaluator::new(player);
        let mut experiences_added = 0;
        let mut total_length = 0;
        let mut rolled_back_games = 0;
        for _ in 0..c.games_per_iteration {
            let id = self.state.games_played;
            let g = self_play_game(
                &self.game,
                &mut evaluator,
                &settings,
                zeta,
                &self.state.tracker,
                c.master_seed,
                id,
            )?;
            self.state.tracker = self.state.tracker.update(g.length);
            self.state.games_played += 1;
            experiences_added += g.experiences.len();
            total_length += g.length;
            rolled_back_games += u32::from(g.rolled_back);
            self.buffer.push_game(id, g.experiences);
        }

        let buffer_experiences = self.buffer.len();
        let mut rng = seed::rng(c.master_seed, "optimise", self.state.iteration);
        let report = optimise(
            &mut self.params,
            &self.buffer,
            &OptimiseConfig {
                epochs: c.epochs_per_iteration,
                batch_size: c.batch_size,
                learning_rate: c.learning_rate,
                momentum: c.momentum,
                l2: c.l2,
            },
            &mut rng,
        )?;
        self.buffer.prune(c.prune_fraction);
        self.state.elapsed_seconds += started.elapsed().as_secs_f64();
        self.state.iteration += 1;
        self.state.epoch += u64::from(c.epochs_per_iteration);
        self.state.steps += report.steps;

        let gate = match self.best.as_mut() {
            Some(best) => {
                let result = evaluation_gate(
                    &self.game,
                    best,
                    &self.params,
                    &GateConfig::new(c.competition_search(), c.gate_max_games),
                    c.master_seed,
                    self.state.iteration,
                )?;
                if result.decision == GateDecision::Replace {
                    *best = self.params.clone();
                    self.state.best_iteration = Some(self.state.iteration);
                }
                Some(result)
            }
            None => None,
        };

        save_params(&self.params, &checkpoint_path(&self.dir, self.state.iteration))?;
        if let Some(best) = &self.best {
            save_params(best, &self.dir.join(BEST_FILE))?;
        }
        self.buffer.save(&self.dir.join(BUFFER_FILE))?;
        append_metrics(
            &self.dir.join(METRICS_FILE),
            &[MetricsRecord::training(
                self.state.iteration,
                self.state.epoch,
                self.state.steps,
                self.state.elapsed_seconds,
            )],
        )?;
        self.save_state()?;

        Ok(IterationSummary {
            iteration: self.state.iteration,
            zeta,
            games: self.config.games_per_iteration,
            experiences_added,
            buffer_experiences,
            mean_game_length: total_length as f64 / f64::from(self.config.games_per_iteration),
            rolled_back_games,
            steps: report.steps,
            final_epoch_loss: report.final_epoch_loss,
            gate,
        })
    }

    fn save_state(&self) -> Result<()> {
        let path = self.dir.join(STATE_FILE);
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&self.state)?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(())
    }
}
