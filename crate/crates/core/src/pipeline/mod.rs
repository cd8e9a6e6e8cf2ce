//! Sequential training loop.
//!
//! Each iteration self-plays a fixed number of games into an experience
//! buffer, trains for a fixed number of epochs on the shuffled buffer, then
//! drops the oldest games. Self-play and training never overlap.
//!
//! Two variants are supported. In the AlphaZero loop self-play always uses
//! the latest weights. In the AlphaGo Zero loop self-play uses the best
//! weights so far, and freshly trained weights replace them only after an
//! evaluation match whose continuity-corrected Wilson interval on the
//! challenger's score lies above 0.5.

mod buffer;
mod config;
mod gate;
mod metrics;
mod optimise;
mod run;
mod selfplay;

pub use buffer::{Experience, ExperienceBuffer, GameRecord};
pub use config::{Exclusion, LoopVariant, TrainingConfig};
pub use gate::{
    evaluation_gate, gate_decision, sequential_gate, wilson_interval, z_for, GateConfig,
    GateDecision, GameScore, GateResult, WilsonInterval,
};
pub use metrics::{
    append_metrics, create_metrics, read_metrics, retain_metrics, MetricsRecord, METRICS_COLUMNS,
    TRAINING_ROW,
};
pub use optimise::{optimise, steps_for, OptimiseConfig, OptimiseReport};
pub use run::{
    checkpoint_path, IterationState, IterationSummary, Run, BEST_FILE, BUFFER_FILE, CONFIG_FILE,
    METRICS_FILE, STATE_FILE,
};
pub use selfplay::{self_play_game, SelfPlayGame, SelfPlaySettings};

/// Frees the oldest `floor(fraction * G)` games of the buffer.
pub fn prune_buffer(buffer: &mut ExperienceBuffer, fraction_oldest_games: f64) -> usize {
    buffer.prune(fraction_oldest_games)
}
