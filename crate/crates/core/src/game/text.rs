//! Plain-text boards: one row per line using `.`, `X`, `O`, then a
//! `to_move: X|O` line. Used by test fixtures and the interactive CLI.

use super::{GameState, Player};
use crate::error::{Error, Result};

pub fn format_board(state: &GameState) -> String {
    let n = state.size();
    let mut out = String::with_capacity((n + 1) * n + 12);
    for row in 0..n {
        for col in 0..n {
            out.push(match state.cell(row, col) {
                None => '.',
                Some(p) => p.symbol(),
            });
        }
        out.push('\n');
    }
    out.push_str("to_move: ");
    out.push(state.to_move().symbol());
    out.push('\n');
    out
}

/// Parses a board written by [`format_board`].
///
/// A 3x3 board is Tic-Tac-Toe, anything else Reversi. `ply` is reconstructed
/// from the piece count (Reversi starts from four discs).
pub fn parse_board(text: &str) -> Result<GameState> {
    let lines: Vec<&str> = text.lines().collect();
    let err = |line: usize, message: String| Error::Parse { line, message };

    let Some((last, rows)) = lines.split_last() else {
        return Err(err(1, "empty input".into()));
    };
    let to_move = match last.strip_prefix("to_move: ") {
        Some("X") => Player::One,
        Some("O") => Player::Two,
        _ => {
            return Err(err(
                lines.len(),
                format!("expected `to_move: X|O`, found {last:?}"),
            ))
        }
    };

    let n = rows.len();
    if n == 0 {
        return Err(err(1, "no board rows".into()));
    }
    let mut board = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.chars().count() != n {
            return Err(err(
                i + 1,
                format!("row has {} cells, board is {n}x{n}", row.chars().count()),
            ));
        }
        for ch in row.chars() {
            board.push(match ch {
                '.' => None,
                'X' => Some(Player::One),
                'O' => Some(Player::Two),
                other => return Err(err(i + 1, format!("unexpected cell {other:?}"))),
            });
        }
    }

    let pieces = board.iter().filter(|c| c.is_some()).count() as u32;
    let ply = if n == 3 {
        pieces
    } else {
        if n < 4 || n % 2 != 0 {
            return Err(err(1, format!("unsupported board size {n}")));
        }
        pieces.saturating_sub(4)
    };
    Ok(GameState::from_parts(n, board, to_move, ply))
}

#[cfg(test)]
mod tests {
    use super::super::Game;
    use super::*;
    use proptest::prelude::*;
    use rand::{seq::IteratorRandom, SeedableRng};

    #[test]
    fn opening_text() {
        let g = Game::reversi(4).unwrap();
        let text = format_board(&g.initial_state());
        assert_eq!(text, "....\n.OX.\n.XO.\n....\nto_move: X\n");
        assert_eq!(parse_board(&text).unwrap(), g.initial_state());
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert!(matches!(
            parse_board("...\n..\n...\nto_move: X\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_board("...\n.Q.\n...\nto_move: X\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_board("...\n...\n...\nto_move: Z\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_board("").is_err());
        assert!(parse_board(".....\n.....\n.....\n.....\n.....\nto_move: X\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trips_playout_positions(seed in any::<u64>(), plies in 0usize..40, size in prop::sample::select(vec![4usize, 6, 8])) {
            let g = Game::reversi(size).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s = g.initial_state();
            for _ in 0..plies {
                let Some(a) = g.legal_actions(&s).actions().choose(&mut rng) else { break };
                s = g.apply_action(&s, a).unwrap();
            }
            let text = format_board(&s);
            let parsed = parse_board(&text).unwrap();
            prop_assert_eq!(format_board(&parsed), text);
            prop_assert_eq!(parsed.cells(), s.cells());
            prop_assert_eq!(parsed.ply(), s.ply());
        }
    }
}
