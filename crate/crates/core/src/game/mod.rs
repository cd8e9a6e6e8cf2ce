//! Two-player board game environments.
//!
//! Every game exposes the same contract: a position tensor from the mover's
//! perspective, a legal-action bit array over a fixed action space of size
//! `m`, and a terminal outcome. Reversi (any even board size from 4 up) is the
//! training game; Tic-Tac-Toe is small enough to solve exhaustively and backs
//! the oracle tests.

mod reversi;
mod text;
mod tictactoe;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use text::{format_board, parse_board};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    /// Moves first. Dark in Reversi, `X` on the text board.
    One,
    /// Light in Reversi, `O` on the text board.
    Two,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::One => 'X',
            Player::Two => 'O',
        }
    }
}

/// Index into the game's fixed action space `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionId(pub usize);

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Ongoing,
    Draw,
    Player1Win,
    Player2Win,
}

impl Outcome {
    pub fn is_terminal(self) -> bool {
        self != Outcome::Ongoing
    }

    pub fn winner(self) -> Option<Player> {
        match self {
            Outcome::Player1Win => Some(Player::One),
            Outcome::Player2Win => Some(Player::Two),
            _ => None,
        }
    }

    /// Terminal reward for `player`: +1 win, -1 loss, -0.5 draw.
    ///
    /// The slightly negative draw reward steers the search away from settling
    /// for draws. Returns `None` while the game is ongoing.
    pub fn reward_for(self, player: Player) -> Option<f64> {
        match self {
            Outcome::Ongoing => None,
            Outcome::Draw => Some(DRAW_REWARD),
            _ if self.winner() == Some(player) => Some(1.0),
            _ => Some(-1.0),
        }
    }
}

pub const DRAW_REWARD: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    Reversi,
    #[serde(alias = "tictactoe")]
    TicTacToe,
}

/// A position. Cells are stored row-major; `ply` counts actions that placed a
/// piece (Reversi passes do not advance it).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    size: usize,
    board: Vec<Option<Player>>,
    to_move: Player,
    ply: u32,
}

impl GameState {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<Player> {
        self.board[row * self.size + col]
    }

    pub fn cells(&self) -> &[Option<Player>] {
        &self.board
    }

    pub fn count(&self, player: Player) -> usize {
        self.board.iter().filter(|&&c| c == Some(player)).count()
    }

    pub(crate) fn from_parts(
        size: usize,
        board: Vec<Option<Player>>,
        to_move: Player,
        ply: u32,
    ) -> Self {
        debug_assert_eq!(board.len(), size * size);
        GameState {
            size,
            board,
            to_move,
            ply,
        }
    }
}

/// Bit array over the action space; bit set iff the action is legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegalActionMask {
    bits: Vec<bool>,
}

impl LegalActionMask {
    pub fn new(bits: Vec<bool>) -> Self {
        LegalActionMask { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_legal(&self, action: ActionId) -> bool {
        self.bits.get(action.0).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| ActionId(i))
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Two binary planes, plane 0 the mover's pieces and plane 1 the opponent's,
/// stored plane-major (`[plane][row][col]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateTensor {
    pub size: usize,
    pub planes: Vec<f32>,
}

impl StateTensor {
    pub const PLANES: usize = 2;

    pub fn at(&self, plane: usize, row: usize, col: usize) -> f32 {
        self.planes[(plane * self.size + row) * self.size + col]
    }

    pub fn plane_sum(&self, plane: usize) -> f32 {
        let n = self.size * self.size;
        self.planes[plane * n..(plane + 1) * n].iter().sum()
    }
}

/// A configured game: which rules and which board size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Game {
    kind: GameKind,
    size: usize,
}

impl Game {
    pub fn new(kind: GameKind, size: usize) -> Result<Self> {
        match kind {
            GameKind::Reversi if size >= 4 && size % 2 == 0 && size <= 16 => {}
            GameKind::TicTacToe if size == 3 => {}
            GameKind::Reversi => {
                return Err(Error::Config(format!(
                    "reversi board size must be even and in 4..=16, got {size}"
                )))
            }
            GameKind::TicTacToe => {
                return Err(Error::Config(format!(
                    "tic-tac-toe board size must be 3, got {size}"
                )))
            }
        }
        Ok(Game { kind, size })
    }

    pub fn reversi(size: usize) -> Result<Self> {
        Game::new(GameKind::Reversi, size)
    }

    pub fn tictactoe() -> Self {
        Game {
            kind: GameKind::TicTacToe,
            size: 3,
        }
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Size `m` of the action space. Reversi reserves index `N*N` for a pass.
    pub fn action_count(&self) -> usize {
        match self.kind {
            GameKind::Reversi => self.size * self.size + 1,
            GameKind::TicTacToe => 9,
        }
    }

    pub fn pass_action(&self) -> Option<ActionId> {
        match self.kind {
            GameKind::Reversi => Some(ActionId(self.size * self.size)),
            GameKind::TicTacToe => None,
        }
    }

    pub fn initial_state(&self) -> GameState {
        match self.kind {
            GameKind::Reversi => reversi::initial_state(self.size),
            GameKind::TicTacToe => tictactoe::initial_state(),
        }
    }

    pub fn legal_actions(&self, state: &GameState) -> LegalActionMask {
        match self.kind {
            GameKind::Reversi => reversi::legal_actions(state),
            GameKind::TicTacToe => tictactoe::legal_actions(state),
        }
    }

    /// Returns the successor position; `state` is left untouched.
    pub fn apply_action(&self, state: &GameState, action: ActionId) -> Result<GameState> {
        if state.size != self.size {
            return Err(Error::Config(format!(
                "position of size {} applied to a {}x{} game",
                state.size, self.size, self.size
            )));
        }
        match self.kind {
            GameKind::Reversi => reversi::apply_action(state, action),
            GameKind::TicTacToe => tictactoe::apply_action(state, action),
        }
    }

    pub fn outcome(&self, state: &GameState) -> Outcome {
        match self.kind {
            GameKind::Reversi => reversi::outcome(state),
            GameKind::TicTacToe => tictactoe::outcome(state),
        }
    }

    pub fn encode_state(&self, state: &GameState) -> StateTensor {
        let n = state.size * state.size;
        let mut planes = vec![0.0f32; 2 * n];
        for (i, cell) in state.board.iter().enumerate() {
            match cell {
                Some(p) if *p == state.to_move => planes[i] = 1.0,
                Some(_) => planes[n + i] = 1.0,
                None => {}
            }
        }
        StateTensor {
            size: state.size,
            planes,
        }
    }

    /// Human-readable cell name for an action, e.g. `c4` or `pass`.
    pub fn action_name(&self, action: ActionId) -> String {
        if Some(action) == self.pass_action() {
            return "pass".to_string();
        }
        let row = action.0 / self.size;
        let col = action.0 % self.size;
        format!("{}{}", (b'a' + col as u8) as char, row + 1)
    }

    /// Inverse of [`Game::action_name`].
    pub fn parse_action(&self, text: &str) -> Option<ActionId> {
        let text = text.trim().to_ascii_lowercase();
        if text == "pass" {
            return self.pass_action();
        }
        let mut chars = text.chars();
        let col = chars.next()?;
        if !col.is_ascii_lowercase() {
            return None;
        }
        let col = (col as u8 - b'a') as usize;
        let row: usize = chars.as_str().parse().ok()?;
        if col >= self.size || row == 0 || row > self.size {
            return None;
        }
        Some(ActionId((row - 1) * self.size + col))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_alphabet() {
        assert_eq!(Outcome::Player1Win.reward_for(Player::One), Some(1.0));
        assert_eq!(Outcome::Player1Win.reward_for(Player::Two), Some(-1.0));
        assert_eq!(Outcome::Draw.reward_for(Player::Two), Some(-0.5));
        assert_eq!(Outcome::Ongoing.reward_for(Player::One), None);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(Game::reversi(5).is_err());
        assert!(Game::reversi(2).is_err());
        assert!(Game::new(GameKind::TicTacToe, 4).is_err());
        assert!(Game::reversi(6).is_ok());
    }

    #[test]
    fn action_names_round_trip() {
        let g = Game::reversi(8).unwrap();
        for a in 0..g.action_count() {
            let name = g.action_name(ActionId(a));
            assert_eq!(g.parse_action(&name), Some(ActionId(a)), "{name}");
        }
        assert_eq!(g.parse_action("z9"), None);
        assert_eq!(Game::tictactoe().parse_action("pass"), None);
    }

    #[test]
    fn encode_opening_from_both_sides() {
        let g = Game::reversi(8).unwrap();
        let s = g.initial_state();
        let t = g.encode_state(&s);
        assert_eq!(t.plane_sum(0), 2.0);
        assert_eq!(t.plane_sum(1), 2.0);
        // dark to move: dark discs at (3,4) and (4,3)
        assert_eq!(t.at(0, 3, 4), 1.0);
        assert_eq!(t.at(0, 4, 3), 1.0);
        assert_eq!(t.at(1, 3, 3), 1.0);

        let mut flipped = s.clone();
        flipped.to_move = Player::Two;
        let u = g.encode_state(&flipped);
        let n = 64;
        assert_eq!(&u.planes[..n], &t.planes[n..]);
        assert_eq!(&u.planes[n..], &t.planes[..n]);
    }
}
