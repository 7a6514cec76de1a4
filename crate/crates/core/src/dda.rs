//! Affect + performance difficulty adjustment on a 10-point scale.
//!
//! | affect \ performance | Negative | Imperfect | Perfect |
//! |----------------------|---------:|----------:|--------:|
//! | energetic-positive   |       -1 |         0 |      +1 |
//! | calm-positive        |       -1 |         0 |      +1 |
//! | energetic-negative   |       -2 |        -1 |       0 |
//! | calm-negative        |       -1 |        +1 |      +2 |
//!
//! The energetic-negative / perfect cell has no published rule and holds
//! difficulty.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::{Quadrant, ScoreEvent};
use crate::error::{Error, Result};

pub const MIN_DIFFICULTY: u8 = 1;
pub const MAX_DIFFICULTY: u8 = 10;

/// Points for a correctly collected item.
pub const POINTS_CORRECT: i32 = 5;
/// Points lost for a wrong item.
pub const POINTS_INCORRECT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerformanceClass {
    NegativeScore,
    ImperfectScore,
    PerfectScore,
}

impl PerformanceClass {
    /// Worst to best.
    pub const ALL: [PerformanceClass; 3] =
        [PerformanceClass::NegativeScore, PerformanceClass::ImperfectScore, PerformanceClass::PerfectScore];

    pub fn name(self) -> &'static str {
        match self {
            PerformanceClass::NegativeScore => "negative",
            PerformanceClass::ImperfectScore => "imperfect",
            PerformanceClass::PerfectScore => "perfect",
        }
    }
}

impl fmt::Display for PerformanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn net_score(events: &[ScoreEvent]) -> i32 {
    events
        .iter()
        .map(|e| match e {
            ScoreEvent::Correct => POINTS_CORRECT,
            ScoreEvent::Incorrect => -POINTS_INCORRECT,
        })
        .sum()
}

/// A window with no events counts as imperfect.
pub fn classify_performance(events: &[ScoreEvent]) -> PerformanceClass {
    let correct = events.iter().filter(|e| **e == ScoreEvent::Correct).count();
    let incorrect = events.len() - correct;
    if net_score(events) < 0 {
        PerformanceClass::NegativeScore
    } else if incorrect == 0 && correct >= 1 {
        PerformanceClass::PerfectScore
    } else {
        PerformanceClass::ImperfectScore
    }
}

/// The rule that fired, in precedence order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DdaRule {
    EnergeticNegativeNegativeScore,
    NegativeScore,
    EnergeticNegativeImperfect,
    CalmNegativePerfect,
    CalmNegativeImperfect,
    PositiveValencePerfect,
    PositiveValenceImperfect,
    EnergeticNegativePerfect,
}

impl DdaRule {
    pub fn delta(self) -> i8 {
        match self {
            DdaRule::EnergeticNegativeNegativeScore => -2,
            DdaRule::NegativeScore | DdaRule::EnergeticNegativeImperfect => -1,
            DdaRule::CalmNegativePerfect => 2,
            DdaRule::CalmNegativeImperfect | DdaRule::PositiveValencePerfect => 1,
            DdaRule::PositiveValenceImperfect | DdaRule::EnergeticNegativePerfect => 0,
        }
    }
}

pub fn select_rule(affect: Quadrant, perf: PerformanceClass) -> DdaRule {
    use PerformanceClass::*;
    use Quadrant::*;
    match (affect, perf) {
        (EnergeticNegative, NegativeScore) => DdaRule::EnergeticNegativeNegativeScore,
        (_, NegativeScore) => DdaRule::NegativeScore,
        (EnergeticNegative, ImperfectScore) => DdaRule::EnergeticNegativeImperfect,
        (CalmNegative, PerfectScore) => DdaRule::CalmNegativePerfect,
        (CalmNegative, ImperfectScore) => DdaRule::CalmNegativeImperfect,
        (EnergeticPositive | CalmPositive, PerfectScore) => DdaRule::PositiveValencePerfect,
        (EnergeticPositive | CalmPositive, ImperfectScore) => DdaRule::PositiveValenceImperfect,
        (EnergeticNegative, PerfectScore) => DdaRule::EnergeticNegativePerfect,
    }
}

pub fn clamp_difficulty(d: i32) -> u8 {
    d.clamp(MIN_DIFFICULTY as i32, MAX_DIFFICULTY as i32) as u8
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdaStep {
    pub window_index: u32,
    pub affect: Quadrant,
    pub performance: PerformanceClass,
    /// Rule delta before clamping.
    pub delta: i8,
    /// Difficulty after the step, clamped to [1, 10].
    pub difficulty: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdaState {
    difficulty: u8,
    history: Vec<DdaStep>,
}

impl DdaState {
    pub fn new(difficulty: u8) -> Result<Self> {
        if !(MIN_DIFFICULTY..=MAX_DIFFICULTY).contains(&difficulty) {
            return Err(Error::OutOfRange(format!("difficulty {difficulty} outside [1, 10]")));
        }
        Ok(DdaState { difficulty, history: Vec::new() })
    }

    pub fn difficulty(&self) -> u8 {
        self.difficulty
    }

    pub fn history(&self) -> &[DdaStep] {
        &self.history
    }

    /// Apply one window's rule. The window index is the history length.
    pub fn step(&self, affect: Quadrant, perf: PerformanceClass) -> DdaState {
        let delta = select_rule(affect, perf).delta();
        let difficulty = clamp_difficulty(self.difficulty as i32 + delta as i32);
        let mut history = self.history.clone();
        history.push(DdaStep { window_index: history.len() as u32, affect, performance: perf, delta, difficulty });
        DdaState { difficulty, history }
    }
}

pub fn dda_step(state: &DdaState, affect: Quadrant, perf: PerformanceClass) -> DdaState {
    state.step(affect, perf)
}

/// Linearly increasing track: +1 every `ceil(windows / 10)` windows, capped at 10.
pub fn schedule_nonadaptive(windows: usize, start: u8) -> Result<Vec<u8>> {
    if windows == 0 {
        return Err(Error::OutOfRange("non-adaptive schedule needs at least one window".into()));
    }
    if !(MIN_DIFFICULTY..=MAX_DIFFICULTY).contains(&start) {
        return Err(Error::OutOfRange(format!("start difficulty {start} outside [1, 10]")));
    }
    let every = windows.div_ceil(10);
    Ok((0..windows).map(|w| clamp_difficulty(start as i32 + (w / every) as i32)).collect())
}

/// `window_index,affect,performance,delta,difficulty`.
pub fn write_trajectory_csv<W: Write>(out: W, steps: &[DdaStep]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["window_index", "affect", "performance", "delta", "difficulty"])?;
    for s in steps {
        w.write_record([
            s.window_index.to_string(),
            s.affect.code().to_owned(),
            s.performance.name().to_owned(),
            s.delta.to_string(),
            s.difficulty.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
