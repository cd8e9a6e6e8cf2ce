//! Interactive play against a checkpoint.

use std::io::{BufRead, Write};

use anyhow::Result;
use endgame_core::arena::Player;
use endgame_core::game::{format_board, Game, Outcome, Player as Color};
use endgame_core::seed::Rng;

/// Runs a game between a human reading from `input` and `agent`. Illegal or
/// unreadable input is reported and asked for again. Returns the outcome,
/// or `None` if the human quit or input ran out.
pub fn play_loop(
    game: &Game,
    agent: &mut dyn Player,
    human: Color,
    rng: &mut Rng,
    mut input: impl BufRead,
    out: &mut impl Write,
) -> Result<Option<Outcome>> {
    let mut state = game.initial_state();
    loop {
        write!(out, "\n{}", format_board(&state))?;
        let outcome = game.outcome(&state);
        if outcome.is_terminal() {
            let verdict = match outcome.winner() {
                Some(w) if w == human => "you win",
                Some(_) => "you lose",
                None => "draw",
            };
            writeln!(out, "game over: {verdict}")?;
            return Ok(Some(outcome));
        }
        let action = if state.to_move() == human {
            loop {
                write!(out, "your move ({}): ", human.symbol())?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    return Ok(None);
                }
                let text = line.trim();
                if text == "quit" {
                    return Ok(None);
                }
                match game.parse_action(text) {
                    Some(a) if game.legal_actions(&state).is_legal(a) => break a,
                    _ => {
                        let legal: Vec<String> = game
                            .legal_actions(&state)
                            .actions()
                            .map(|a| game.action_name(a))
                            .collect();
                        writeln!(out, "illegal move {text:?}; legal: {}", legal.join(" "))?;
                    }
                }
            }
        } else {
            let a = agent.choose(game, &state, rng)?;
            writeln!(out, "agent plays {}", game.action_name(a))?;
            a
        };
        state = game.apply_action(&state, action)?;
    }
}
