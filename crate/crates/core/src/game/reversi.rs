use super::{ActionId, GameState, LegalActionMask, Outcome, Player};
use crate::error::{Error, Result};

const DIRECTIONS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

pub(super) fn initial_state(size: usize) -> GameState {
    let mut board = vec![None; size * size];
    let c = size / 2;
    board[(c - 1) * size + (c - 1)] = Some(Player::Two);
    board[c * size + c] = Some(Player::Two);
    board[(c - 1) * size + c] = Some(Player::One);
    board[c * size + (c - 1)] = Some(Player::One);
    GameState::from_parts(size, board, Player::One, 0)
}

/// Number of opponent discs bracketed along one direction from `(row, col)`.
fn run_length(state: &GameState, player: Player, row: usize, col: usize, dir: (isize, isize)) -> usize {
    let n = state.size as isize;
    let (mut r, mut c) = (row as isize + dir.0, col as isize + dir.1);
    let mut count = 0;
    while r >= 0 && r < n && c >= 0 && c < n {
        match state.board[(r * n + c) as usize] {
            Some(p) if p == player => return count,
            Some(_) => count += 1,
            None => return 0,
        }
        r += dir.0;
        c += dir.1;
    }
    0
}

fn is_placement_legal(state: &GameState, player: Player, idx: usize) -> bool {
    if state.board[idx].is_some() {
        return false;
    }
    let (row, col) = (idx / state.size, idx % state.size);
    DIRECTIONS
        .iter()
        .any(|&d| run_length(state, player, row, col, d) > 0)
}

fn has_placement(state: &GameState, player: Player) -> bool {
    (0..state.board.len()).any(|i| is_placement_legal(state, player, i))
}

pub(super) fn legal_actions(state: &GameState) -> LegalActionMask {
    let cells = state.size * state.size;
    let mut bits = vec![false; cells + 1];
    let mut any = false;
    for (i, bit) in bits.iter_mut().take(cells).enumerate() {
        if is_placement_legal(state, state.to_move, i) {
            *bit = true;
            any = true;
        }
    }
    if !any && has_placement(state, state.to_move.opponent()) {
        bits[cells] = true;
    }
    LegalActionMask::new(bits)
}

pub(super) fn apply_action(state: &GameState, action: ActionId) -> Result<GameState> {
    let cells = state.size * state.size;
    let mover = state.to_move;
    if action.0 == cells {
        if has_placement(state, mover) || !has_placement(state, mover.opponent()) {
            return Err(Error::IllegalAction { action: action.0 });
        }
        let mut next = state.clone();
        next.to_move = mover.opponent();
        return Ok(next);
    }
    if action.0 > cells || !is_placement_legal(state, mover, action.0) {
        return Err(Error::IllegalAction { action: action.0 });
    }

    let mut next = state.clone();
    let n = state.size as isize;
    let (row, col) = (action.0 / state.size, action.0 % state.size);
    for &dir in &DIRECTIONS {
        let len = run_length(state, mover, row, col, dir);
        for step in 1..=len as isize {
            let r = row as isize + dir.0 * step;
            let c = col as isize + dir.1 * step;
            next.board[(r * n + c) as usize] = Some(mover);
        }
    }
    next.board[action.0] = Some(mover);
    next.to_move = mover.opponent();
    next.ply += 1;
    Ok(next)
}

pub(super) fn outcome(state: &GameState) -> Outcome {
    if has_placement(state, Player::One) || has_placement(state, Player::Two) {
        return Outcome::Ongoing;
    }
    let dark = state.count(Player::One);
    let light = state.count(Player::Two);
    match dark.cmp(&light) {
        std::cmp::Ordering::Greater => Outcome::Player1Win,
        std::cmp::Ordering::Less => Outcome::Player2Win,
        std::cmp::Ordering::Equal => Outcome::Draw,
    }
}
