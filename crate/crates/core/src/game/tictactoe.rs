use super::{ActionId, GameState, LegalActionMask, Outcome, Player};
use crate::error::{Error, Result};

const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

pub(super) fn initial_state() -> GameState {
    GameState::from_parts(3, vec![None; 9], Player::One, 0)
}

pub(super) fn legal_actions(state: &GameState) -> LegalActionMask {
    if outcome(state).is_terminal() {
        return LegalActionMask::new(vec![false; 9]);
    }
    LegalActionMask::new(state.board.iter().map(Option::is_none).collect())
}

pub(super) fn apply_action(state: &GameState, action: ActionId) -> Result<GameState> {
    if action.0 >= 9 || state.board[action.0].is_some() || outcome(state).is_terminal() {
        return Err(Error::IllegalAction { action: action.0 });
    }
    let mut next = state.clone();
    next.board[action.0] = Some(state.to_move);
    next.to_move = state.to_move.opponent();
    next.ply += 1;
    Ok(next)
}

pub(super) fn outcome(state: &GameState) -> Outcome {
    for line in &LINES {
        if let Some(p) = state.board[line[0]] {
            if state.board[line[1]] == Some(p) && state.board[line[2]] == Some(p) {
                return match p {
                    Player::One => Outcome::Player1Win,
                    Player::Two => Outcome::Player2Win,
                };
            }
        }
    }
    if state.board.iter().all(Option::is_some) {
        Outcome::Draw
    } else {
        Outcome::Ongoing
    }
}
