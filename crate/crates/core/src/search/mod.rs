//! PUCT tree search guided by the policy/value network.
//!
//! Each simulation descends from the root by maximising
//! `Q(s,a) + c_puct * p'(s,a) * sqrt(sum_j N(s,j)) / (1 + N(s,a))`, expands the
//! first unvisited edge it reaches, evaluates the new node with a single
//! network call (or the environment reward if the node is terminal), and
//! folds that value into every edge on the path with the running average
//! `Q <- (N Q + V) / (N + 1)`. There are no random rollouts.
//!
//! Values are stored from the perspective of the player to move at the node
//! that owns the edge; the sign flips whenever the mover changes.

mod noise;
mod tree;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{Inference, NetworkParams};
use crate::game::{ActionId, Game, GameState, LegalActionMask};
use crate::seed::Rng;

pub use noise::apply_root_noise;
pub use tree::{Edge, SearchTree};

/// Exploration constant of the selection rule.
pub const DEFAULT_C_PUCT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Dirichlet concentration.
    pub alpha: f64,
    /// Mixing fraction: `p' = (1 - weight) p + weight * Dir(alpha)`.
    pub weight: f64,
    pub enabled: bool,
}

impl NoiseConfig {
    pub const DISABLED: NoiseConfig = NoiseConfig {
        alpha: 1.0,
        weight: 0.0,
        enabled: false,
    };

    /// `alpha = 0.6` on 8x8 Reversi (65 actions), scaled inversely with the
    /// size of the action space for other games.
    pub fn for_game(game: &Game) -> Self {
        NoiseConfig {
            alpha: 0.6 * 65.0 / game.action_count() as f64,
            weight: 0.25,
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub simulations: u32,
    pub c_puct: f64,
    pub noise: NoiseConfig,
}

impl SearchConfig {
    pub fn greedy(simulations: u32) -> Self {
        SearchConfig {
            simulations,
            c_puct: DEFAULT_C_PUCT,
            noise: NoiseConfig::DISABLED,
        }
    }
}

/// Randomness consumed by a search: root noise and argmax tie-breaking draw
/// from separate streams.
pub struct SearchRng {
    pub noise: Rng,
    pub tiebreak: Rng,
}

impl SearchRng {
    pub fn new(master: u64, index: u64) -> Self {
        SearchRng {
            noise: crate::seed::rng(master, "noise", index),
            tiebreak: crate::seed::rng(master, "tiebreak", index),
        }
    }
}

/// Supplies priors over the full action space and a value for the player to
/// move in a non-terminal position.
pub trait Evaluator {
    fn evaluate(&mut self, game: &Game, state: &GameState) -> Result<(Vec<f64>, f64)>;
}

/// Network-backed evaluator.
pub struct NetworkEvaluator<'a> {
    inference: Inference<'a>,
}

impl<'a> NetworkEvaluator<'a> {
    pub fn new(params: &'a NetworkParams) -> Self {
        NetworkEvaluator {
            inference: Inference::new(params),
        }
    }
}

impl Evaluator for NetworkEvaluator<'_> {
    fn evaluate(&mut self, game: &Game, state: &GameState) -> Result<(Vec<f64>, f64)> {
        self.inference.infer(&game.encode_state(state))
    }
}

/// Uniform priors and a constant value. Stands in for an untrained network.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformEvaluator {
    pub value: f64,
}

impl Evaluator for UniformEvaluator {
    fn evaluate(&mut self, game: &Game, _state: &GameState) -> Result<(Vec<f64>, f64)> {
        let m = game.action_count();
        Ok((vec![1.0 / m as f64; m], self.value))
    }
}

/// Result of evaluating a freshly expanded node.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafEvaluation {
    /// From the perspective of the player to move at the node.
    pub value: f64,
    /// Priors restricted to legal actions and renormalised; all zero at a
    /// terminal node.
    pub priors: Vec<f64>,
    pub terminal: bool,
}

/// Terminal nodes take the environment reward (+1 win, -1 loss, -0.5 draw);
/// anything else takes one evaluator call.
pub fn evaluate_leaf<E: Evaluator + ?Sized>(
    game: &Game,
    state: &GameState,
    legal: &LegalActionMask,
    evaluator: &mut E,
) -> Result<LeafEvaluation> {
    if let Some(reward) = game.outcome(state).reward_for(state.to_move()) {
        return Ok(LeafEvaluation {
            value: reward,
            priors: vec![0.0; game.action_count()],
            terminal: true,
        });
    }
    let (raw, value) = evaluator.evaluate(game, state)?;
    Ok(LeafEvaluation {
        value,
        priors: mask_priors(&raw, legal),
        terminal: false,
    })
}

/// Zeroes illegal entries and renormalises; falls back to uniform over the
/// legal actions when the network put no mass on any of them.
pub fn mask_priors(raw: &[f64], legal: &LegalActionMask) -> Vec<f64> {
    let mut out: Vec<f64> = raw
        .iter()
        .zip(legal.bits())
        .map(|(&p, &ok)| if ok && p.is_finite() && p > 0.0 { p } else { 0.0 })
        .collect();
    let sum: f64 = out.iter().sum();
    if sum > 0.0 {
        out.iter_mut().for_each(|p| *p /= sum);
    } else {
        let k = legal.count().max(1) as f64;
        for (p, &ok) in out.iter_mut().zip(legal.bits()) {
            *p = if ok { 1.0 / k } else { 0.0 };
        }
    }
    out
}

/// Selection score `Q + c * p' * sqrt(parent_visits) / (1 + N)`.
pub fn puct_score(q: f64, visits: u32, parent_visit_sum: u32, prior: f64, c_puct: f64) -> f64 {
    q + c_puct * prior * f64::from(parent_visit_sum).sqrt() / (1.0 + f64::from(visits))
}

/// Running-average update of one edge: returns `((N Q + V) / (N + 1), N + 1)`.
pub fn backup_edge(q: f64, visits: u32, value: f64) -> (f64, u32) {
    let n = f64::from(visits);
    ((n * q + value) / (n + 1.0), visits + 1)
}

/// Visit-count distribution `pi_a = N(s,a) / sum_j N(s,j)` over the full
/// action space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPolicy {
    pub pi: Vec<f64>,
}

impl SearchPolicy {
    pub fn argmax_all(&self) -> Vec<ActionId> {
        let best = self.pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.pi
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == best && p > 0.0)
            .map(|(i, _)| ActionId(i))
            .collect()
    }
}

/// Runs `config.simulations` simulations from `root_state`, reusing
/// `existing` when its root is the same position.
pub fn search<E: Evaluator + ?Sized>(
    game: &Game,
    root_state: &GameState,
    evaluator: &mut E,
    config: &SearchConfig,
    existing: Option<SearchTree>,
    rng: &mut SearchRng,
) -> Result<(SearchPolicy, SearchTree)> {
    if game.outcome(root_state).is_terminal() {
        return Err(Error::Config("search started from a terminal position".into()));
    }
    let mut tree = match existing {
        Some(t) if t.root_state() == root_state => t,
        _ => SearchTree::new(*game, root_state.clone()),
    };
    tree.begin_search();
    for _ in 0..config.simulations {
        tree.simulate(evaluator, config, rng)?;
    }
    if !tree.root_expanded() {
        tree.expand_root(evaluator, config, rng)?;
    }
    let policy = tree.visit_policy(config.c_puct, &mut rng.tiebreak);
    Ok((policy, tree))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveMode {
    /// Sample from pi for the first `threshold` plies, then play greedily.
    SelfPlay,
    /// Always greedy.
    Competition,
}

/// Picks an action from a search policy. Greedy ties are broken uniformly at
/// random.
pub fn select_move(
    policy: &SearchPolicy,
    ply: u32,
    temperature_ply_threshold: u32,
    mode: MoveMode,
    rng: &mut Rng,
) -> ActionId {
    if mode == MoveMode::SelfPlay && ply < temperature_ply_threshold {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_positive = None;
        for (i, &p) in policy.pi.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            last_positive = Some(i);
            acc += p;
            if u < acc {
                return ActionId(i);
            }
        }
        if let Some(i) = last_positive {
            return ActionId(i);
        }
    }
    let best = policy.argmax_all();
    best[rng.gen_range(0..best.len())]
}

/// Re-roots the tree at the child reached by `action`, keeping that subtree's
/// statistics and dropping its siblings.
pub fn advance_root(tree: SearchTree, action: ActionId) -> Result<SearchTree> {
    tree.advance(action)
}
