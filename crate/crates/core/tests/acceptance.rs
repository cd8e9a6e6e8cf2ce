//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! The desk-scale comparison reads recorded runs from `results/desk` (or
//! the directory in `ENDGAME_DESK_RUNS`), laid out as `seed*/{a,b}` where
//! `a` is the baseline and `b` the curriculum run.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use endgame_core::arena::{compare_early, play_game, NetworkPlayer, Player, RandomPlayer};
use endgame_core::curriculum::{
    dropped_count, random_ply_count, rollback_ply, trim_game, CurriculumSchedule, PlyTracker,
};
use endgame_core::evaluator::{gradient_check, init_params, random_policy, Architecture, NetworkParams, TrainingExample};
use endgame_core::game::{ActionId, Game, GameState, Outcome, Player as Color};
use endgame_core::pipeline::{
    gate_decision, optimise, read_metrics, sequential_gate, steps_for, wilson_interval, Experience,
    ExperienceBuffer, GameScore, GateDecision, OptimiseConfig, Run, TrainingConfig, BUFFER_FILE, METRICS_FILE,
};
use endgame_core::search::{
    advance_root, backup_edge, puct_score, search, select_move, Evaluator, MoveMode, SearchConfig, SearchRng,
    UniformEvaluator,
};
use endgame_core::seed;
use rand::Rng as _;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Check)> = vec![
        ("gradient correctness", gradient_correctness),
        ("search oracle (tic-tac-toe)", search_oracle),
        ("terminal dominance", terminal_dominance),
        ("formula spot-checks", formula_spot_checks),
        ("curriculum exactness", curriculum_exactness),
        ("wilson gate", wilson_gate),
        ("pipeline accounting", pipeline_accounting),
        ("desk-scale comparison", desk_scale),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---- gradients --------------------------------------------------------------

fn gradient_correctness() -> Check {
    const TOLERANCE: f64 = 1e-4;
    const BUDGET: Duration = Duration::from_secs(60);
    let started = Instant::now();
    let cases = [
        (Game::tictactoe(), "input=3x3x2 conv=4 conv=4 dense=8 actions=9 residual=on"),
        (Game::tictactoe(), "input=3x3x2 dense=6 dense=4 actions=9 residual=off"),
        (Game::reversi(4).unwrap(), "input=4x4x2 conv=3 conv=3 dense=5 actions=17 residual=off"),
        (Game::reversi(4).unwrap(), "input=4x4x2 conv=4 conv=4 conv=4 actions=17 residual=on"),
        (Game::reversi(6).unwrap(), "input=6x6x2 conv=4 conv=4 dense=8 actions=37 residual=on"),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let (game, desc) = &cases[i as usize % cases.len()];
        let arch: Architecture = desc.parse().unwrap();
        let mut rng = seed::rng(i, "test", 0);
        let mut params = init_params(&arch, i).unwrap();
        for w in &mut params.weights {
            *w += rng.gen_range(-0.2..0.2);
        }
        let batch = random_examples(game, 2 + (i as usize % 4), &mut rng);
        let refs: Vec<&TrainingExample> = batch.iter().collect();
        let c = [0.0, 1e-4, 1e-3][i as usize % 3];
        let err = gradient_check(&params, &refs, c, 1e-5).unwrap();
        ensure(err < TOLERANCE, format!("pair {i} ({desc}): relative error {err:e}"))?;
        worst = worst.max(err);
    }
    let took = started.elapsed();
    ensure(took < BUDGET, format!("took {took:?}"))?;
    Ok(format!("20 pairs, max relative error {worst:.2e} < {TOLERANCE:e}"))
}

fn random_examples(game: &Game, n: usize, rng: &mut seed::Rng) -> Vec<TrainingExample> {
    let mut out = Vec::new();
    let mut s = game.initial_state();
    while out.len() < n {
        if game.outcome(&s).is_terminal() {
            s = game.initial_state();
        }
        out.push(TrainingExample {
            state: game.encode_state(&s),
            policy: random_policy(rng, game.action_count()),
            value: [1.0, -1.0, -0.5][rng.gen_range(0..3)],
        });
        let legal: Vec<ActionId> = game.legal_actions(&s).actions().collect();
        s = game.apply_action(&s, legal[rng.gen_range(0..legal.len())]).unwrap();
    }
    out
}

// ---- search -----------------------------------------------------------------

/// Negamax value for the player to move: 1 win, 0 draw, -1 loss.
fn minimax(game: &Game, s: &GameState, memo: &mut HashMap<GameState, i8>) -> i8 {
    if let Some(&v) = memo.get(s) {
        return v;
    }
    let v = match game.outcome(s) {
        Outcome::Draw => 0,
        Outcome::Ongoing => game
            .legal_actions(s)
            .actions()
            .map(|a| -minimax(game, &game.apply_action(s, a).unwrap(), memo))
            .max()
            .unwrap(),
        o => {
            if o.winner() == Some(s.to_move()) {
                1
            } else {
                -1
            }
        }
    };
    memo.insert(s.clone(), v);
    v
}

fn reachable(game: &Game) -> Vec<GameState> {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![game.initial_state()];
    let mut out = Vec::new();
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        for a in game.legal_actions(&s).actions() {
            stack.push(game.apply_action(&s, a).unwrap());
        }
        out.push(s);
    }
    out
}

struct SearchPlayer<E: Evaluator> {
    evaluator: E,
    config: SearchConfig,
}

impl<E: Evaluator> Player for SearchPlayer<E> {
    fn choose(&mut self, game: &Game, state: &GameState, rng: &mut seed::Rng) -> endgame_core::error::Result<ActionId> {
        let mut srng = SearchRng {
            noise: seed::rng(rng.gen(), "noise", 0),
            tiebreak: seed::rng(rng.gen(), "tiebreak", 0),
        };
        let (policy, _) = search(game, state, &mut self.evaluator, &self.config, None, &mut srng)?;
        Ok(select_move(&policy, 0, 0, MoveMode::Competition, rng))
    }
}

fn search_oracle() -> Check {
    const BUDGET: Duration = Duration::from_secs(300);
    let started = Instant::now();
    let game = Game::tictactoe();
    let mut memo = HashMap::new();
    let mut agent = SearchPlayer {
        evaluator: UniformEvaluator::default(),
        config: SearchConfig::greedy(2000),
    };
    let mut rng = seed::rng(11, "test", 0);
    let mut positions = 0;
    let mut optimal = 0;
    for s in reachable(&game) {
        let remaining = s.cells().iter().filter(|c| c.is_none()).count();
        if game.outcome(&s).is_terminal() || remaining > 4 {
            continue;
        }
        let value = minimax(&game, &s, &mut memo);
        let a = agent.choose(&game, &s, &mut rng).unwrap();
        let after = -minimax(&game, &game.apply_action(&s, a).unwrap(), &mut memo);
        ensure(
            value == -1 || after > -1,
            format!("losing move {} in\n{}", game.action_name(a), endgame_core::game::format_board(&s)),
        )?;
        positions += 1;
        optimal += usize::from(after == value);
    }
    let mut tally = [0u32; 3];
    for g in 0..100u64 {
        let mut rng = seed::rng(12, "test", g);
        let mut random = RandomPlayer;
        let agent_first = g % 2 == 0;
        let played = if agent_first {
            play_game(&game, &mut agent, &mut random, &mut rng, 0).unwrap()
        } else {
            play_game(&game, &mut random, &mut agent, &mut rng, 0).unwrap()
        };
        let me = if agent_first { Color::One } else { Color::Two };
        tally[match played.outcome.winner() {
            Some(w) if w == me => 0,
            None => 1,
            Some(_) => 2,
        }] += 1;
    }
    ensure(tally[2] == 0, format!("lost {} of 100 games to the random player", tally[2]))?;
    let took = started.elapsed();
    ensure(took < BUDGET, format!("took {took:?}"))?;
    Ok(format!(
        "{positions} positions with <=4 plies left, none losing ({optimal} optimal); vs random W/D/L {}/{}/{}",
        tally[0], tally[1], tally[2]
    ))
}

/// Exact game value for the player to move (alpha-beta negamax).
fn solve(game: &Game, s: &GameState, mut alpha: i8, beta: i8, memo: &mut HashMap<GameState, i8>) -> i8 {
    if let Some(&v) = memo.get(s) {
        return v;
    }
    let outcome = game.outcome(s);
    if outcome.is_terminal() {
        return match outcome.winner() {
            None => 0,
            Some(w) if w == s.to_move() => 1,
            Some(_) => -1,
        };
    }
    let mut best = -1;
    for a in game.legal_actions(s).actions() {
        let v = -solve(game, &game.apply_action(s, a).unwrap(), -beta, -alpha, memo);
        best = best.max(v);
        alpha = alpha.max(v);
        if alpha >= beta {
            return best;
        }
    }
    memo.insert(s.clone(), best);
    best
}

fn terminal_dominance() -> Check {
    let game = Game::reversi(6).unwrap();
    let params = init_params(&Architecture::desk_scale(6, game.action_count()), 5).unwrap();
    let mut agent = NetworkPlayer::new(&params, SearchConfig::greedy(200));
    let wins_now = |s: &GameState, a: ActionId| {
        let next = game.apply_action(s, a).unwrap();
        game.outcome(&next).winner() == Some(s.to_move())
    };
    let mut rng = seed::rng(21, "test", 0);
    let mut found = 0;
    let mut winning = 0;
    let mut immediate = 0;
    while found < 100 {
        let mut s = game.initial_state();
        while !game.outcome(&s).is_terminal() {
            let legal: Vec<ActionId> = game.legal_actions(&s).actions().collect();
            let ending = legal.iter().filter(|&&a| wins_now(&s, a)).count();
            if ending > 0 && ending < legal.len() {
                found += 1;
                let a = agent.choose(&game, &s, &mut rng).unwrap();
                let next = game.apply_action(&s, a).unwrap();
                // memo entries are exact only for full windows, so start fresh
                let value = -solve(&game, &next, -1, 1, &mut HashMap::new());
                winning += usize::from(value == 1);
                immediate += usize::from(wins_now(&s, a));
                break;
            }
            s = game.apply_action(&s, legal[rng.gen_range(0..legal.len())]).unwrap();
        }
    }
    ensure(winning == 100, format!("winning move chosen in {winning}/100"))?;
    Ok(format!(
        "winning move chosen in 100/100 positions ({immediate} immediate wins; 6x6 reversi, untrained net, 200 simulations)"
    ))
}

// ---- formulas and curriculum ------------------------------------------------

fn formula_spot_checks() -> Check {
    let puct = puct_score(0.5, 1, 1, 0.5, 3.0);
    ensure((puct - 1.25).abs() < 1e-12, format!("puct {puct}"))?;
    let (q, n) = backup_edge(0.4, 2, 1.0);
    ensure((q - 0.6).abs() < 1e-12 && n == 3, format!("backup ({q}, {n})"))?;

    let reversi = CurriculumSchedule::preset("reversi_eq5").unwrap();
    let racing = CurriculumSchedule::preset("racing_kings_eq4").unwrap();
    let expected: [(&CurriculumSchedule, &[(u64, f64)]); 2] = [
        (&reversi, &[(0, 0.25), (1, 0.5), (99, 0.5), (100, 0.75), (250, 0.75), (499, 0.75), (500, 1.0), (10_000, 1.0)]),
        (
            &racing,
            &[
                (0, 0.1),
                (1, 0.33),
                (99, 0.33),
                (100, 0.5),
                (499, 0.5),
                (500, 0.66),
                (799, 0.66),
                (800, 0.8),
                (999, 0.8),
                (1000, 1.0),
                (10_000, 1.0),
            ],
        ),
    ];
    for (schedule, points) in expected {
        for &(t, z) in points {
            let got = schedule.zeta(t);
            ensure(got == z, format!("{}({t}) = {got}, expected {z}", schedule.name()))?;
        }
    }
    let baseline = CurriculumSchedule::preset("baseline").unwrap();
    ensure((0..2000).all(|t| baseline.zeta(t) == 1.0), "baseline not 1")?;
    Ok("puct 1.25, backup 0.6, every preset breakpoint exact".into())
}

fn curriculum_exactness() -> Check {
    // integer oracle on the grid zeta = k / 100
    let mut checks = 0;
    for len in 1..=200usize {
        for k in 1..=100usize {
            let zeta = k as f64 / 100.0;
            let drop = (100 - k) * len / 100;
            let resume = len - (k * len).div_ceil(100);
            ensure(dropped_count(len, zeta) == drop, format!("dropped_count({len}, {zeta})"))?;
            let items: Vec<usize> = (0..len).collect();
            ensure(trim_game(items, zeta) == (drop..len).collect::<Vec<_>>(), format!("trim_game({len}, {zeta})"))?;
            ensure(rollback_ply(len, zeta) == resume, format!("rollback_ply({len}, {zeta})"))?;
            let tracker = PlyTracker { average: len as f64, games_seen: 3 };
            ensure(random_ply_count(&tracker, zeta) == drop, format!("random_ply_count({len}, {zeta})"))?;
            checks += 4;
        }
    }

    // a plain self-play loop with no curriculum code, against three ways of
    // asking the pipeline for zeta = 1
    let dir = tempfile::tempdir().unwrap();
    let base = tiny_config();
    let reference = reference_buffer(&base, 2);
    let variants = [
        ("baseline", base.clone()),
        ("custom zeta=1", TrainingConfig {
            schedule: r#"[{"until_epoch": null, "zeta": 1.0}]"#.parse().unwrap(),
            ..base.clone()
        }),
        ("trim", TrainingConfig {
            exclusion: endgame_core::pipeline::Exclusion::Trim,
            ..base.clone()
        }),
    ];
    for (label, config) in variants {
        let run_dir = dir.path().join(label);
        let mut run = Run::create(&run_dir, config).unwrap();
        run.run_iteration().unwrap();
        run.run_iteration().unwrap();
        let bytes = std::fs::read(run_dir.join(BUFFER_FILE)).unwrap();
        ensure(bytes == reference, format!("{label}: buffer differs from the plain loop"))?;
    }
    Ok(format!("{checks} grid checks over L in [1,200] x zeta in 0.01..1; ζ≡1 buffers byte-identical"))
}

fn tiny_config() -> TrainingConfig {
    TrainingConfig::from_json(
        r#"{"game": "tic_tac_toe", "board_size": 3, "simulations": 12, "games_per_iteration": 6,
            "batch_size": 16, "epochs_per_iteration": 3, "master_seed": 9}"#,
    )
    .unwrap()
}

/// Self-play, optimise, prune, written out directly.
fn reference_buffer(config: &TrainingConfig, iterations: u64) -> Vec<u8> {
    let game = config.game().unwrap();
    let seed_value = config.master_seed;
    let mut params: NetworkParams = init_params(&config.architecture(), seed_value).unwrap();
    let mut buffer = ExperienceBuffer::new(config.buffer_capacity_games);
    let mut game_id = 0;
    for iteration in 0..iterations {
        for _ in 0..config.games_per_iteration {
            let mut rng = seed::rng(seed_value, "selfplay", game_id);
            let mut srng = SearchRng::new(seed_value, game_id);
            let mut evaluator = endgame_core::search::NetworkEvaluator::new(&params);
            let mut state = game.initial_state();
            let mut tree = None;
            let mut steps = Vec::new();
            let mut ply = 0;
            while !game.outcome(&state).is_terminal() {
                let (policy, t) =
                    search(&game, &state, &mut evaluator, &config.self_play_search(), tree.take(), &mut srng).unwrap();
                let a = select_move(&policy, ply, config.temperature_ply(), MoveMode::SelfPlay, &mut rng);
                steps.push((game.encode_state(&state), policy.pi, state.to_move(), ply));
                state = game.apply_action(&state, a).unwrap();
                tree = Some(advance_root(t, a).unwrap());
                ply += 1;
            }
            let outcome = game.outcome(&state);
            let experiences = steps
                .into_iter()
                .map(|(s, pi, mover, ply)| Experience {
                    example: TrainingExample {
                        state: s,
                        policy: pi,
                        value: outcome.reward_for(mover).unwrap(),
                    },
                    game_id,
                    ply,
                })
                .collect();
            buffer.push_game(game_id, experiences);
            game_id += 1;
        }
        let mut rng = seed::rng(seed_value, "optimise", iteration);
        let cfg = OptimiseConfig {
            epochs: config.epochs_per_iteration,
            batch_size: config.batch_size,
            learning_rate: config.learning_rate,
            momentum: config.momentum,
            l2: config.l2,
        };
        optimise(&mut params, &buffer, &cfg, &mut rng).unwrap();
        buffer.prune(config.prune_fraction);
    }
    buffer.to_bytes()
}

// ---- gate -------------------------------------------------------------------

/// Continuity-corrected score interval by bisection on
/// `|p_hat - p| - 1/(2n) = z sqrt(p (1 - p) / n)`.
fn wilson_oracle(successes: f64, n: u32, z: f64) -> (f64, f64) {
    let nf = f64::from(n);
    let p_hat = successes / nf;
    let half = 0.5 / nf;
    let se = |p: f64| z * (p * (1.0 - p) / nf).sqrt();
    let bisect = |mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (f(lo) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let f_low = |p: f64| (p_hat - half - p) - se(p);
    let lower = if p_hat == 0.0 || f_low(0.0) <= 0.0 { 0.0 } else { bisect(0.0, p_hat, &f_low) };
    let f_up = |p: f64| (p - p_hat - half) - se(p);
    let upper = if p_hat == 1.0 || f_up(1.0) <= 0.0 { 1.0 } else { bisect(p_hat, 1.0, &f_up) };
    (lower, upper)
}

fn wilson_gate() -> Check {
    const TOLERANCE: f64 = 1e-6;
    let z = 1.959963984540054;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=50u32 {
        for twice in 0..=2 * n {
            let s = f64::from(twice) / 2.0;
            let w = wilson_interval(s, n, 0.95).unwrap();
            let (lo, hi) = wilson_oracle(s, n, z);
            let err = (w.lower - lo).abs().max((w.upper - hi).abs());
            ensure(err < TOLERANCE, format!("{s}/{n}: ({}, {}) vs ({lo}, {hi})", w.lower, w.upper))?;
            worst = worst.max(err);
            cases += 1;
        }
    }
    // scipy.stats.binomtest(k, n).proportion_ci(method="wilsoncc")
    let published = [
        (30, 30, 0.8586795203175484, 1.0),
        (0, 30, 0.0, 0.1413204796824516),
        (15, 30, 0.3168494647424922, 0.6831505352575078),
        (7, 20, 0.1630866797163093, 0.5905104338485733),
        (1, 1, 0.05462075552885204, 1.0),
        (0, 1, 0.0, 0.945379244471148),
        (3, 50, 0.01562459398068125, 0.17541873734199237),
    ];
    for (k, n, lo, hi) in published {
        let w = wilson_interval(f64::from(k), n, 0.95).unwrap();
        ensure(
            (w.lower - lo).abs() < 1e-9 && (w.upper - hi).abs() < 1e-9,
            format!("{k}/{n}: ({}, {}) vs scipy ({lo}, {hi})", w.lower, w.upper),
        )?;
    }

    let all = wilson_interval(30.0, 30, 0.95).unwrap();
    let none = wilson_interval(0.0, 30, 0.95).unwrap();
    ensure(gate_decision(&all, 0.1) == Some(GateDecision::Replace), "30/30 not Replace")?;
    ensure(gate_decision(&none, 0.1) == Some(GateDecision::Keep), "0/30 not Keep")?;
    let wins = sequential_gate(0.95, 0.1, 30, |_| Ok(GameScore::Win)).unwrap();
    let losses = sequential_gate(0.95, 0.1, 30, |_| Ok(GameScore::Loss)).unwrap();
    ensure(wins.decision == GateDecision::Replace, "winning challenger kept")?;
    ensure(losses.decision == GateDecision::Keep, "losing challenger promoted")?;
    let coin = sequential_gate(0.95, 0.1, 2000, |g| {
        Ok(if g % 2 == 0 { GameScore::Win } else { GameScore::Loss })
    })
    .unwrap();
    ensure(
        coin.decision == GateDecision::NoDecision && coin.interval.width() < 0.1,
        "even match did not stop on width",
    )?;
    Ok(format!(
        "{cases} (successes, n<=50) cases, max |diff| vs bisection {worst:.1e}; scipy values match; \
         30/30 Replace after {} games, 0/30 Keep after {}, even match stops at width<0.1 after {}",
        wins.games(),
        losses.games(),
        coin.games()
    ))
}

// ---- pipeline -----------------------------------------------------------------

fn pipeline_accounting() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let config = TrainingConfig {
        schedule: CurriculumSchedule::preset("reversi_eq5").unwrap(),
        epochs_per_iteration: 20,
        ..tiny_config()
    };
    let batch = config.batch_size;
    let mut run = Run::create(dir.path(), config).unwrap();
    let k = 4;
    let mut expected_steps = 0;
    let mut after_prune = 0;
    for i in 1..=k {
        let summary = run.run_iteration().unwrap();
        let before_prune = after_prune + summary.experiences_added;
        ensure(summary.buffer_experiences == before_prune, format!("iteration {i}: buffer size"))?;
        let steps = 20 * before_prune.div_ceil(batch) as u64;
        ensure(summary.steps == steps && steps_for(20, before_prune, batch) == steps, format!("iteration {i}: steps"))?;
        expected_steps += steps;
        after_prune = run.buffer().len();
    }
    let (_, rows) = read_metrics(&dir.path().join(METRICS_FILE)).unwrap();
    ensure(rows.len() == k, format!("{} metrics rows", rows.len()))?;
    let mut cumulative = 0;
    for (i, row) in rows.iter().enumerate() {
        let i = i as u64 + 1;
        ensure(row.iteration == i && row.epoch == 20 * i, format!("row {i}: t = {}", row.epoch))?;
        ensure(row.steps > cumulative, format!("row {i}: steps not increasing"))?;
        cumulative = row.steps;
    }
    ensure(cumulative == expected_steps, format!("steps {cumulative} != {expected_steps}"))?;
    Ok(format!("{k} iterations: t = 20k for every row, steps {expected_steps} = sum of 20*ceil(buffer/batch)"))
}

// ---- desk-scale -----------------------------------------------------------------

fn desk_scale() -> Check {
    let root = std::env::var_os("ENDGAME_DESK_RUNS")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../results/desk"));
    let mut seeds: Vec<PathBuf> = std::fs::read_dir(&root)
        .map_err(|e| format!("no recorded runs in {}: {e}", root.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("a").join(METRICS_FILE).exists() && p.join("b").join(METRICS_FILE).exists())
        .collect();
    seeds.sort();
    ensure(seeds.len() >= 3, format!("{} complete comparison runs in {}", seeds.len(), root.display()))?;
    let mut ahead = 0;
    let mut lines = Vec::new();
    for dir in &seeds {
        let (_, a) = read_metrics(&dir.join("a").join(METRICS_FILE)).map_err(|e| e.to_string())?;
        let (_, b) = read_metrics(&dir.join("b").join(METRICS_FILE)).map_err(|e| e.to_string())?;
        let iterations = |rows: &[endgame_core::pipeline::MetricsRecord]| rows.iter().filter(|r| r.is_training()).count();
        ensure(
            iterations(&a) >= 40 && iterations(&b) >= 40,
            format!("{}: fewer than 40 iterations", dir.display()),
        )?;
        let cmp = compare_early(&a, &b, "pure_mcts:50", 0.5);
        let pass = cmp.iter().all(|c| c.curriculum_ahead());
        ahead += usize::from(pass);
        let fmt = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.3}"));
        lines.push(format!(
            "{}: {}",
            dir.file_name().unwrap().to_string_lossy(),
            cmp.iter()
                .map(|c| format!("{} {} vs {}", c.axis, fmt(c.curriculum), fmt(c.baseline)))
                .collect::<Vec<_>>()
                .join(", ")
        ));
    }
    let detail = format!("curriculum >= baseline in {ahead}/{} runs [{}]", seeds.len(), lines.join("; "));
    ensure(ahead >= 2, detail.clone())?;
    Ok(detail)
}
