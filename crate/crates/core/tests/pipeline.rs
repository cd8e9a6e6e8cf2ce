//! Training runs on disk: resume, determinism, gating and benchmarking.

use std::fs;
use std::path::Path;

use endgame_core::arena::{benchmark_checkpoints, BenchConfig, CheckpointSample, OpponentSpec};
use endgame_core::evaluator::load_params;
use endgame_core::pipeline::{
    append_metrics, checkpoint_path, read_metrics, LoopVariant, MetricsRecord, Run, TrainingConfig,
    BEST_FILE, BUFFER_FILE, METRICS_FILE, STATE_FILE,
};

fn config(seed: u64) -> TrainingConfig {
    TrainingConfig::from_json(&format!(
        r#"{{"game": "tic_tac_toe", "board_size": 3, "simulations": 10, "games_per_iteration": 5,
            "batch_size": 16, "epochs_per_iteration": 2, "master_seed": {seed},
            "schedule": "reversi_eq5"}}"#
    ))
    .unwrap()
}

fn train(dir: &Path, config: TrainingConfig, iterations: usize) -> Run {
    let mut run = Run::open_or_create(dir, config).unwrap();
    for _ in 0..iterations {
        run.run_iteration().unwrap();
    }
    run
}

fn rows(dir: &Path) -> Vec<MetricsRecord> {
    read_metrics(&dir.join(METRICS_FILE)).unwrap().1
}

fn without_elapsed(rows: Vec<MetricsRecord>) -> Vec<MetricsRecord> {
    rows.into_iter()
        .map(|r| MetricsRecord {
            elapsed_seconds: 0.0,
            ..r
        })
        .collect()
}

#[test]
fn checkpoints_and_metrics_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let run = train(dir.path(), config(1), 3);
    assert_eq!(run.state().iteration, 3);
    for i in 1..=3 {
        let params = load_params(&checkpoint_path(dir.path(), i)).unwrap();
        assert_eq!(params.architecture, run.config().architecture());
    }
    assert!(!checkpoint_path(dir.path(), 0).exists());
    assert!(!dir.path().join(BEST_FILE).exists());
    let (header, rows) = read_metrics(&dir.path().join(METRICS_FILE)).unwrap();
    assert!(header.iter().any(|(k, v)| k == "schedule_name" && v == "reversi_eq5"));
    assert!(header.iter().any(|(k, v)| k == "master_seed" && v == "1"));
    let iterations: Vec<u64> = rows.iter().map(|r| r.iteration).collect();
    assert_eq!(iterations, [1, 2, 3]);
    assert!(rows.iter().all(|r| r.is_training() && r.epoch == 2 * r.iteration));
    assert!(rows.windows(2).all(|w| w[0].elapsed_seconds <= w[1].elapsed_seconds));
}

#[test]
fn resume_continues_exactly() {
    let straight = tempfile::tempdir().unwrap();
    train(straight.path(), config(4), 3);

    let resumed = tempfile::tempdir().unwrap();
    train(resumed.path(), config(4), 2);
    let run = train(resumed.path(), config(4), 1);
    assert_eq!(run.state().iteration, 3);

    for file in [BUFFER_FILE.to_string(), "ckpt_3.bin".into()] {
        assert_eq!(
            fs::read(straight.path().join(&file)).unwrap(),
            fs::read(resumed.path().join(&file)).unwrap(),
            "{file}"
        );
    }
    assert_eq!(without_elapsed(rows(straight.path())), without_elapsed(rows(resumed.path())));
}

#[test]
fn rows_from_an_unfinished_iteration_are_dropped() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), config(2), 2);
    // an iteration that wrote its row but died before saving state
    append_metrics(
        &dir.path().join(METRICS_FILE),
        &[MetricsRecord::training(3, 6, 999, 1.0)],
    )
    .unwrap();
    train(dir.path(), config(2), 1);
    let iterations: Vec<u64> = rows(dir.path()).iter().map(|r| r.iteration).collect();
    assert_eq!(iterations, [1, 2, 3]);
}

#[test]
fn same_seed_same_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    train(a.path(), config(7), 2);
    train(b.path(), config(7), 2);
    assert_eq!(without_elapsed(rows(a.path())), without_elapsed(rows(b.path())));
    for file in ["ckpt_1.bin", "ckpt_2.bin", BUFFER_FILE] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let state = |d: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join(STATE_FILE)).unwrap()).unwrap();
        v["elapsed_seconds"] = 0.into();
        v
    };
    assert_eq!(state(a.path()), state(b.path()));

    let c = tempfile::tempdir().unwrap();
    train(c.path(), config(8), 1);
    assert_ne!(
        fs::read(a.path().join("ckpt_1.bin")).unwrap(),
        fs::read(c.path().join("ckpt_1.bin")).unwrap()
    );
}

#[test]
fn existing_runs_are_protected() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), config(1), 1);
    assert!(Run::create(dir.path(), config(1)).is_err());
    assert!(Run::open_or_create(dir.path(), config(2)).is_err());
}

#[test]
fn gated_loop_keeps_a_champion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = TrainingConfig {
        variant: LoopVariant::Alphagozero,
        gate_max_games: 6,
        ..config(3)
    };
    let mut run = Run::create(dir.path(), cfg).unwrap();
    for _ in 0..2 {
        let summary = run.run_iteration().unwrap();
        let gate = summary.gate.expect("gated loop plays an evaluation match");
        assert!(gate.games() >= 1 && gate.games() <= 6);
    }
    assert!(dir.path().join(BEST_FILE).exists());
    let best = run.state().best_iteration.unwrap();
    assert!(best <= 2);
    let reopened = Run::open(dir.path()).unwrap();
    assert_eq!(reopened.best_params(), run.best_params());
    // gate results are not metrics rows
    assert_eq!(rows(dir.path()).len(), 2);
}

#[test]
fn benchmark_rows_follow_training_rows() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), config(5), 3);
    let bench = BenchConfig {
        opponent: "random".parse::<OpponentSpec>().unwrap(),
        games: 6,
        sample: CheckpointSample::All,
        seed: 11,
        network_simulations: Some(8),
    };
    let first = benchmark_checkpoints(dir.path(), &bench).unwrap();
    assert_eq!(first.len(), 3);
    let training = rows(dir.path());
    for (row, key) in first.iter().zip(training.iter().filter(|r| r.is_training())) {
        assert_eq!((row.iteration, row.epoch, row.steps), (key.iteration, key.epoch, key.steps));
        assert_eq!(row.elapsed_seconds, key.elapsed_seconds);
        assert!(row.opponent.starts_with("random"));
        assert_eq!(row.games, 6);
        assert_eq!(row.wins + row.draws + row.losses, 6);
        let ratio = (f64::from(row.wins) + 0.5 * f64::from(row.draws)) / 6.0;
        assert_eq!(row.win_ratio, Some(ratio));
    }
    // same seed, same results
    let again = benchmark_checkpoints(dir.path(), &bench).unwrap();
    assert_eq!(first, again);
    assert_eq!(rows(dir.path()).len(), 3 + 6);

    fs::remove_file(checkpoint_path(dir.path(), 2)).unwrap();
    let sparse = BenchConfig {
        sample: CheckpointSample::Every(2),
        ..bench
    };
    let missing = benchmark_checkpoints(dir.path(), &sparse).unwrap();
    assert_eq!(missing.len(), 1);
    assert_eq!(missing[0].opponent, "missing:ckpt_2.bin");
    assert_eq!(missing[0].win_ratio, None);
    assert_eq!(missing[0].games, 0);
}

#[test]
fn random_sample_picks_distinct_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    train(dir.path(), config(6), 4);
    let bench = BenchConfig {
        opponent: OpponentSpec::PureMcts { simulations: 8 },
        games: 2,
        sample: CheckpointSample::Random(2),
        seed: 1,
        network_simulations: Some(4),
    };
    let picked = benchmark_checkpoints(dir.path(), &bench).unwrap();
    assert_eq!(picked.len(), 2);
    assert!(picked[0].iteration < picked[1].iteration);
    assert!(picked.iter().all(|r| (1..=4).contains(&r.iteration)));
}
