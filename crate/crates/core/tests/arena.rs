//! Reference opponents and match bookkeeping.

use endgame_core::arena::{play_game, play_match, PureMctsPlayer, RandomPlayer};
use endgame_core::game::{Game, Player};
use endgame_core::seed;
use proptest::prelude::*;

#[test]
fn pure_mcts_beats_random_at_tictactoe() {
    let game = Game::tictactoe();
    let mut wins = 0;
    let mut losses = 0;
    for g in 0..100u64 {
        let mut rng = seed::rng(31, "test", g);
        let mut mcts = PureMctsPlayer { simulations: 200 };
        let mcts_first = g % 2 == 0;
        let played = if mcts_first {
            play_game(&game, &mut mcts, &mut RandomPlayer, &mut rng, 0).unwrap()
        } else {
            play_game(&game, &mut RandomPlayer, &mut mcts, &mut rng, 0).unwrap()
        };
        let me = if mcts_first { Player::One } else { Player::Two };
        match played.outcome.winner() {
            Some(w) if w == me => wins += 1,
            Some(_) => losses += 1,
            None => {}
        }
    }
    assert!(wins >= 90, "won {wins}/100, lost {losses}");
}

#[test]
fn pure_mcts_is_a_function_of_its_seed() {
    let game = Game::reversi(6).unwrap();
    let moves = |s: u64| {
        let mut rng = seed::rng(s, "arena", 0);
        play_game(
            &game,
            &mut PureMctsPlayer { simulations: 30 },
            &mut PureMctsPlayer { simulations: 10 },
            &mut rng,
            0,
        )
        .unwrap()
        .moves
    };
    assert_eq!(moves(4), moves(4));
    assert_ne!(moves(4), moves(5));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_balance_colours_and_conserve_tallies(games in 1u32..30, s in any::<u64>()) {
        let game = Game::tictactoe();
        let r = play_match(&game, &mut RandomPlayer, &mut PureMctsPlayer { simulations: 4 }, games, s).unwrap();
        prop_assert_eq!(r.games, games);
        prop_assert_eq!(r.wins + r.draws + r.losses, games);
        let second = games - r.games_first;
        prop_assert!(r.games_first.abs_diff(second) <= 1);
        let ratio = (f64::from(r.wins) + 0.5 * f64::from(r.draws)) / f64::from(games);
        prop_assert_eq!(r.win_ratio, ratio);
    }
}
