use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng as _;

use super::{
    backup_edge, evaluate_leaf, noise::apply_root_noise, puct_score, Evaluator, SearchConfig,
    SearchPolicy, SearchRng,
};
use crate::error::{Error, Result};
use crate::game::{ActionId, Game, GameState, Outcome};
use crate::seed::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub action: ActionId,
    /// Prior used for selection; noise-mixed at the root.
    pub prior: f64,
    /// Prior as produced by the evaluator.
    pub raw_prior: f64,
    pub visits: u32,
    pub q: f64,
    child: Option<usize>,
}

impl Edge {
    pub fn has_child(&self) -> bool {
        self.child.is_some()
    }
}

#[derive(Debug, Clone)]
struct Node {
    state: GameState,
    outcome: Outcome,
    /// `V(s)` from the perspective of the player to move.
    value: f64,
    expanded: bool,
    edges: Vec<Edge>,
}

impl Node {
    fn new(game: &Game, state: GameState) -> Self {
        Node {
            outcome: game.outcome(&state),
            state,
            value: 0.0,
            expanded: false,
            edges: Vec::new(),
        }
    }
}

/// Search statistics, stored as an arena of nodes.
#[derive(Debug, Clone)]
pub struct SearchTree {
    game: Game,
    nodes: Vec<Node>,
    root: usize,
    root_noised: bool,
}

impl SearchTree {
    pub fn new(game: Game, root_state: GameState) -> Self {
        SearchTree {
            nodes: vec![Node::new(&game, root_state)],
            game,
            root: 0,
            root_noised: false,
        }
    }

    pub fn root_state(&self) -> &GameState {
        &self.nodes[self.root].state
    }

    pub fn root_expanded(&self) -> bool {
        self.nodes[self.root].expanded
    }

    pub fn root_value(&self) -> f64 {
        self.nodes[self.root].value
    }

    pub fn root_edges(&self) -> &[Edge] {
        &self.nodes[self.root].edges
    }

    pub fn root_visit_sum(&self) -> u32 {
        self.root_edges().iter().map(|e| e.visits).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Edges of the child reached from the root by `action`, if expanded.
    pub fn child_edges(&self, action: ActionId) -> Option<&[Edge]> {
        let e = self.root_edges().iter().find(|e| e.action == action)?;
        Some(&self.nodes[e.child?].edges)
    }

    /// Every `Q(s,a)` in the tree.
    pub fn all_q(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().flat_map(|n| n.edges.iter().map(|e| e.q))
    }

    pub(super) fn begin_search(&mut self) {
        self.root_noised = false;
    }

    fn expand<E: Evaluator + ?Sized>(&mut self, id: usize, evaluator: &mut E) -> Result<()> {
        let node = &self.nodes[id];
        let legal = self.game.legal_actions(&node.state);
        let leaf = evaluate_leaf(&self.game, &node.state, &legal, evaluator)?;
        let node = &mut self.nodes[id];
        node.value = leaf.value;
        node.expanded = true;
        node.edges = legal
            .actions()
            .map(|a| Edge {
                action: a,
                prior: leaf.priors[a.0],
                raw_prior: leaf.priors[a.0],
                visits: 0,
                q: 0.0,
                child: None,
            })
            .collect();
        Ok(())
    }

    fn noise_root(&mut self, config: &SearchConfig, rng: &mut Rng) {
        if self.root_noised {
            return;
        }
        self.root_noised = true;
        let m = self.game.action_count();
        let node = &mut self.nodes[self.root];
        let mut raw = vec![0.0; m];
        let mut bits = vec![false; m];
        for e in &node.edges {
            raw[e.action.0] = e.raw_prior;
            bits[e.action.0] = true;
        }
        let legal = crate::game::LegalActionMask::new(bits);
        let noisy = apply_root_noise(&raw, &legal, &config.noise, rng);
        for e in &mut node.edges {
            e.prior = noisy[e.action.0];
        }
    }

    pub(super) fn expand_root<E: Evaluator + ?Sized>(
        &mut self,
        evaluator: &mut E,
        config: &SearchConfig,
        rng: &mut SearchRng,
    ) -> Result<()> {
        self.expand(self.root, evaluator)?;
        self.noise_root(config, &mut rng.noise);
        Ok(())
    }

    fn select(&self, id: usize, c_puct: f64, rng: &mut Rng) -> usize {
        let edges = &self.nodes[id].edges;
        let total: u32 = edges.iter().map(|e| e.visits).sum();
        let mut best = f64::NEG_INFINITY;
        let mut chosen = 0;
        let mut ties = 0u32;
        for (i, e) in edges.iter().enumerate() {
            let score = puct_score(e.q, e.visits, total, e.prior, c_puct);
            if score > best {
                best = score;
                chosen = i;
                ties = 1;
            } else if score == best {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    chosen = i;
                }
            }
        }
        chosen
    }

    /// One select / expand / evaluate / backup pass. The first simulation on
    /// an unexpanded root only expands it.
    pub(super) fn simulate<E: Evaluator + ?Sized>(
        &mut self,
        evaluator: &mut E,
        config: &SearchConfig,
        rng: &mut SearchRng,
    ) -> Result<()> {
        if !self.root_expanded() {
            return self.expand_root(evaluator, config, rng);
        }
        if config.noise.enabled {
            self.noise_root(config, &mut rng.noise);
        }

        let mut path: Vec<(usize, usize)> = Vec::new();
        let mut id = self.root;
        let leaf = loop {
            if self.nodes[id].outcome.is_terminal() {
                break id;
            }
            let e = self.select(id, config.c_puct, &mut rng.tiebreak);
            path.push((id, e));
            match self.nodes[id].edges[e].child {
                Some(child) => id = child,
                None => {
                    let action = self.nodes[id].edges[e].action;
                    let state = self.game.apply_action(&self.nodes[id].state, action)?;
                    let child = self.nodes.len();
                    self.nodes.push(Node::new(&self.game, state));
                    self.nodes[id].edges[e].child = Some(child);
                    self.expand(child, evaluator)?;
                    break child;
                }
            }
        };

        let value = self.nodes[leaf].value;
        let perspective = self.nodes[leaf].state.to_move();
        for &(node, e) in path.iter().rev() {
            let v = if self.nodes[node].state.to_move() == perspective {
                value
            } else {
                -value
            };
            let edge = &mut self.nodes[node].edges[e];
            (edge.q, edge.visits) = backup_edge(edge.q, edge.visits, v);
        }
        Ok(())
    }

    pub(super) fn visit_policy(&self, c_puct: f64, rng: &mut Rng) -> SearchPolicy {
        let m = self.game.action_count();
        let mut pi = vec![0.0; m];
        let edges = self.root_edges();
        let total = self.root_visit_sum();
        if total == 0 {
            // only the root expansion has run: commit to the edge the next
            // selection would take
            if !edges.is_empty() {
                let e = self.select(self.root, c_puct, rng);
                pi[edges[e].action.0] = 1.0;
            }
        } else {
            for e in edges {
                pi[e.action.0] = f64::from(e.visits) / f64::from(total);
            }
        }
        SearchPolicy { pi }
    }

    pub(super) fn advance(self, action: ActionId) -> Result<SearchTree> {
        let root = &self.nodes[self.root];
        if !self.game.legal_actions(&root.state).is_legal(action) {
            return Err(Error::IllegalAction { action: action.0 });
        }
        let child = root
            .edges
            .iter()
            .find(|e| e.action == action)
            .and_then(|e| e.child);
        let Some(child) = child else {
            let state = self.game.apply_action(&root.state, action)?;
            return Ok(SearchTree::new(self.game, state));
        };

        // copy the reachable subtree into a fresh arena
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([child]);
        map[child] = 0;
        while let Some(id) = queue.pop_front() {
            order.push(id);
            for e in &self.nodes[id].edges {
                if let Some(c) = e.child {
                    map[c] = order.len() + queue.len();
                    queue.push_back(c);
                }
            }
        }
        let mut old = self.nodes;
        let nodes = order
            .iter()
            .map(|&id| {
                let mut n = std::mem::replace(
                    &mut old[id],
                    Node {
                        state: GameState::from_parts(0, Vec::new(), crate::game::Player::One, 0),
                        outcome: Outcome::Ongoing,
                        value: 0.0,
                        expanded: false,
                        edges: Vec::new(),
                    },
                );
                for e in &mut n.edges {
                    e.child = e.child.map(|c| map[c]);
                    e.prior = e.raw_prior;
                }
                n
            })
            .collect();
        Ok(SearchTree {
            game: self.game,
            nodes,
            root: 0,
            root_noised: false,
        })
    }

    /// Root statistics as a text table: action, visits, Q, prior.
    pub fn root_table(&self) -> String {
        let mut out = String::from("action   visits        q    prior\n");
        let mut edges: Vec<&Edge> = self.root_edges().iter().collect();
        edges.sort_by(|a, b| b.visits.cmp(&a.visits).then(a.action.cmp(&b.action)));
        for e in edges {
            let _ = writeln!(
                out,
                "{:<6} {:>8} {:>8.4} {:>8.4}",
                self.game.action_name(e.action),
                e.visits,
                e.q,
                e.prior
            );
        }
        let _ = writeln!(out, "root value {:.4}", self.root_value());
        out
    }
}
