use rand::seq::IteratorRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::game::{ActionId, Game, GameState, Outcome, Player};
use crate::seed::Rng;

/// UCT exploration constant for rewards in `[0, 1]`.
pub const UCT_EXPLORATION: f64 = std::f64::consts::SQRT_2;

struct Node {
    state: GameState,
    /// Player whose move led here; `None` at the root.
    mover: Option<Player>,
    action: Option<ActionId>,
    untried: Vec<ActionId>,
    children: Vec<usize>,
    visits: u32,
    /// Sum of rollout rewards for `mover`: 1 win, 0.5 draw, 0 loss.
    reward: f64,
}

fn rollout_reward(outcome: Outcome, player: Player) -> f64 {
    match outcome.winner() {
        Some(w) if w == player => 1.0,
        Some(_) => 0.0,
        None => 0.5,
    }
}

fn new_node(game: &Game, state: GameState, mover: Option<Player>, action: Option<ActionId>) -> Node {
    let untried = if game.outcome(&state).is_terminal() {
        Vec::new()
    } else {
        game.legal_actions(&state).actions().collect()
    };
    Node {
        state,
        mover,
        action,
        untried,
        children: Vec::new(),
        visits: 0,
        reward: 0.0,
    }
}

/// Classic Monte Carlo tree search with no learned components: UCT
/// selection, one new node per simulation, a uniformly random rollout to the
/// end of the game, and the most-visited root move as the answer.
pub fn pure_mcts_move(
    game: &Game,
    state: &GameState,
    simulations: u32,
    rng: &mut Rng,
) -> Result<ActionId> {
    if game.outcome(state).is_terminal() {
        return Err(Error::Config("no move to choose in a finished game".into()));
    }
    let mut nodes = vec![new_node(game, state.clone(), None, None)];
    let mut path = Vec::new();
    for _ in 0..simulations.max(1) {
        path.clear();
        let mut id = 0;
        path.push(id);
        while nodes[id].untried.is_empty() && !nodes[id].children.is_empty() {
            id = uct_child(&nodes, id, rng);
            path.push(id);
        }
        if !nodes[id].untried.is_empty() {
            let pick = rng.gen_range(0..nodes[id].untried.len());
            let action = nodes[id].untried.swap_remove(pick);
            let mover = nodes[id].state.to_move();
            let next = game.apply_action(&nodes[id].state, action)?;
            let child = nodes.len();
            nodes.push(new_node(game, next, Some(mover), Some(action)));
            nodes[id].children.push(child);
            id = child;
            path.push(id);
        }

        let mut s = nodes[id].state.clone();
        let mut outcome = game.outcome(&s);
        while !outcome.is_terminal() {
            let action = game
                .legal_actions(&s)
                .actions()
                .choose(rng)
                .expect("ongoing position has a legal action");
            s = game.apply_action(&s, action)?;
            outcome = game.outcome(&s);
        }

        for &n in &path {
            let node = &mut nodes[n];
            node.visits += 1;
            if let Some(m) = node.mover {
                node.reward += rollout_reward(outcome, m);
            }
        }
    }

    let root = &nodes[0];
    let best = root.children.iter().map(|&c| nodes[c].visits).max().unwrap_or(0);
    let chosen = root
        .children
        .iter()
        .filter(|&&c| nodes[c].visits == best)
        .choose(rng)
        .expect("root has at least one child");
    Ok(nodes[*chosen].action.expect("child has an action"))
}

fn uct_child(nodes: &[Node], id: usize, rng: &mut Rng) -> usize {
    let log_n = f64::from(nodes[id].visits).ln();
    let mut best = f64::NEG_INFINITY;
    let mut chosen = nodes[id].children[0];
    let mut ties = 0u32;
    for &c in &nodes[id].children {
        let child = &nodes[c];
        let n = f64::from(child.visits);
        let score = child.reward / n + UCT_EXPLORATION * (log_n / n).sqrt();
        if score > best {
            best = score;
            chosen = c;
            ties = 1;
        } else if score == best {
            ties += 1;
            if rng.gen_range(0..ties) == 0 {
                chosen = c;
            }
        }
    }
    chosen
}
