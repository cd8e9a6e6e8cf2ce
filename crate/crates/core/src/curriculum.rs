//! End-game-first curriculum.
//!
//! A retention schedule `zeta(t)` gives, for the cumulative epoch count `t`,
//! the fraction of each self-play game (counted from the end) that is kept
//! for training. Early in training only the last few moves of a game are
//! learned from; `zeta` grows to 1 and the full game is used.
//!
//! Dropped moves do not need to be searched at all. Instead of searching and
//! discarding, the first `floor((1 - zeta) * av)` moves are played uniformly
//! at random, where `av` is the running average game length. If the random
//! phase stumbles into a terminal position, the game is rolled back and the
//! rest is played with full search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One schedule segment: `zeta` applies while `t < until_epoch` (or forever
/// when `until_epoch` is `None`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub until_epoch: Option<u64>,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleSpec", into = "ScheduleSpec")]
pub struct CurriculumSchedule {
    name: String,
    breakpoints: Vec<Breakpoint>,
}

/// Config-file form: a preset name or an explicit breakpoint list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleSpec {
    Preset(String),
    Explicit(Vec<Breakpoint>),
}

impl CurriculumSchedule {
    pub const PRESETS: [&'static str; 3] = ["baseline", "reversi_eq5", "racing_kings_eq4"];

    /// `zeta(t) = 1` for every `t`.
    pub fn baseline() -> Self {
        CurriculumSchedule {
            name: "baseline".into(),
            breakpoints: vec![Breakpoint {
                until_epoch: None,
                zeta: 1.0,
            }],
        }
    }

    /// 0.25 at t = 0, 0.5 below 100 epochs, 0.75 below 500, then 1.
    pub fn reversi() -> Self {
        Self::from_steps(
            "reversi_eq5",
            &[(Some(1), 0.25), (Some(100), 0.5), (Some(500), 0.75), (None, 1.0)],
        )
    }

    /// 0.1 at t = 0, then 0.33, 0.5, 0.66, 0.8 with breaks at 100, 500, 800
    /// and 1000 epochs, then 1.
    pub fn racing_kings() -> Self {
        Self::from_steps(
            "racing_kings_eq4",
            &[
                (Some(1), 0.1),
                (Some(100), 0.33),
                (Some(500), 0.5),
                (Some(800), 0.66),
                (Some(1000), 0.8),
                (None, 1.0),
            ],
        )
    }

    fn from_steps(name: &str, steps: &[(Option<u64>, f64)]) -> Self {
        CurriculumSchedule {
            name: name.into(),
            breakpoints: steps
                .iter()
                .map(|&(until_epoch, zeta)| Breakpoint { until_epoch, zeta })
                .collect(),
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "baseline" => Ok(Self::baseline()),
            "reversi_eq5" => Ok(Self::reversi()),
            "racing_kings_eq4" => Ok(Self::racing_kings()),
            other => Err(Error::Config(format!(
                "unknown schedule preset {other:?} (known: {})",
                Self::PRESETS.join(", ")
            ))),
        }
    }

    pub fn custom(name: impl Into<String>, breakpoints: Vec<Breakpoint>) -> Result<Self> {
        let schedule = CurriculumSchedule {
            name: name.into(),
            breakpoints,
        };
        schedule.validate()?;
        Ok(schedule)
    }

    /// Checks that thresholds increase, `zeta` is in (0, 1] and
    /// non-decreasing, and the open-ended final segment has `zeta = 1`.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("schedule {:?}: {msg}", self.name)));
        let Some(last) = self.breakpoints.last() else {
            return bad("no breakpoints".into());
        };
        if last.until_epoch.is_some() || last.zeta != 1.0 {
            return bad("final segment must be open-ended with zeta = 1".into());
        }
        let mut prev_until = 0;
        let mut prev_zeta = 0.0;
        for (i, bp) in self.breakpoints.iter().enumerate() {
            if !(bp.zeta > 0.0 && bp.zeta <= 1.0) {
                return bad(format!("zeta {} outside (0, 1]", bp.zeta));
            }
            if bp.zeta < prev_zeta {
                return bad("zeta must be non-decreasing".into());
            }
            match bp.until_epoch {
                Some(u) if u <= prev_until && i > 0 => {
                    return bad("until_epoch values must increase".into())
                }
                Some(0) => return bad("until_epoch must be positive".into()),
                Some(u) => prev_until = u,
                None if i + 1 != self.breakpoints.len() => {
                    return bad("only the last segment may be open-ended".into())
                }
                None => {}
            }
            prev_zeta = bp.zeta;
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn is_baseline(&self) -> bool {
        self.breakpoints.iter().all(|b| b.zeta == 1.0)
    }

    /// Retention fraction after `epoch` cumulative epochs.
    pub fn zeta(&self, epoch: u64) -> f64 {
        self.breakpoints
            .iter()
            .find(|b| b.until_epoch.is_none_or(|u| epoch < u))
            .map_or(1.0, |b| b.zeta)
    }
}

/// A preset name, or a JSON breakpoint list.
impl std::str::FromStr for CurriculumSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            Ok(serde_json::from_str(s)?)
        } else {
            Self::preset(s)
        }
    }
}

impl TryFrom<ScheduleSpec> for CurriculumSchedule {
    type Error = Error;

    fn try_from(spec: ScheduleSpec) -> Result<Self> {
        match spec {
            ScheduleSpec::Preset(name) => Self::preset(&name),
            ScheduleSpec::Explicit(bps) => Self::custom("custom", bps),
        }
    }
}

impl From<CurriculumSchedule> for ScheduleSpec {
    fn from(s: CurriculumSchedule) -> Self {
        if CurriculumSchedule::PRESETS.contains(&s.name.as_str()) {
            ScheduleSpec::Preset(s.name)
        } else {
            ScheduleSpec::Explicit(s.breakpoints)
        }
    }
}

/// Number of leading moves to drop from a game of length `len`.
pub fn dropped_count(len: usize, zeta: f64) -> usize {
    // guard against 0.3 * 10 = 2.9999999999999996 style representation error
    let raw = (1.0 - zeta) * len as f64;
    ((raw + 1e-9).floor() as usize).min(len)
}

/// Keeps the end-game tail: drops the first `floor((1 - zeta) L)` items.
pub fn trim_game<T>(mut experiences: Vec<T>, zeta: f64) -> Vec<T> {
    let drop = dropped_count(experiences.len(), zeta);
    experiences.drain(..drop);
    experiences
}

/// Running mean game length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlyTracker {
    pub average: f64,
    pub games_seen: u64,
}

impl PlyTracker {
    pub fn update(self, game_length: usize) -> Self {
        let n = self.games_seen as f64;
        PlyTracker {
            average: (self.average * n + game_length as f64) / (n + 1.0),
            games_seen: self.games_seen + 1,
        }
    }
}

/// Moves to play at random before searching: `floor((1 - zeta) av)`. Zero
/// until the first game has been observed.
pub fn random_ply_count(tracker: &PlyTracker, zeta: f64) -> usize {
    if tracker.games_seen == 0 {
        return 0;
    }
    ((1.0 - zeta) * tracker.average + 1e-9).floor().max(0.0) as usize
}

/// Move index to resume searching from when the random phase reached a
/// terminal position after `game_length_so_far` moves:
/// `L - ceil(zeta L)`.
pub fn rollback_ply(game_length_so_far: usize, zeta: f64) -> usize {
    let back = ((zeta * game_length_so_far as f64) - 1e-9).ceil().max(0.0) as usize;
    game_length_so_far.saturating_sub(back)
}
