//! End-game-first curriculum self-play.
//!
//! A sequential AlphaZero-style training framework for two-player board games
//! in which the curriculum player initially learns only from the final part
//! of each self-play game, widening the retained window as training proceeds.
//!
//! - [`game`]: Reversi and Tic-Tac-Toe environments.
//! - [`evaluator`]: policy/value network with hand-written backpropagation.
//! - [`search`]: PUCT tree search driven by the network.
//! - [`curriculum`]: retention schedules, trimming, random-move substitution.
//! - [`pipeline`]: self-play, experience buffer, optimisation, evaluation gate.
//! - [`arena`]: reference opponents and win-ratio benchmarking.

pub mod arena;
pub mod curriculum;
pub mod error;
pub mod evaluator;
pub mod game;
pub mod pipeline;
pub mod search;
pub mod seed;

pub use error::{Error, Result};
