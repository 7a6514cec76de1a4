//! Abstract memory-task rounds, a synthetic player, synthetic facial EMG, and
//! the closed-loop session simulator.
//!
//! Nothing here renders or navigates anything. A round is reduced to the
//! number of items the player must get right, and a window's score events are
//! the only performance signal the adaptation rules see.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::classify::TrainedPipeline;
use crate::dataset::{
    AffectLabel, EmgSegment, MuscleGroup, Quadrant, ScoreEvent, SessionLog, Site, Task, CHANNEL_COUNT, WINDOW_SECONDS,
};
use crate::dda::{classify_performance, schedule_nonadaptive, DdaState, PerformanceClass};
use crate::dsp::compute_baseline;
use crate::error::{Error, Result};

/// Products a shopping list can draw from.
pub const WM_CATALOGUE_SIZE: usize = 40;
/// Display locations in the museum.
pub const MUSEUM_DISPLAYS: usize = 24;

fn check_difficulty(d: u8) -> Result<()> {
    if !(1..=10).contains(&d) {
        return Err(Error::OutOfRange(format!("difficulty {d} outside [1, 10]")));
    }
    Ok(())
}

/// Shopping-list length: 2 items at difficulty 1 up to 12 at difficulty 10.
pub fn wm_list_length(difficulty: u8) -> Result<usize> {
    check_difficulty(difficulty)?;
    Ok((2.0 + (difficulty as f64 - 1.0) * 10.0 / 9.0).round() as usize)
}

/// Displays to encode: 1 at difficulty 1 up to 8 at difficulty 10.
pub fn em_target_count(difficulty: u8) -> Result<usize> {
    check_difficulty(difficulty)?;
    Ok((1.0 + (difficulty as f64 - 1.0) * 7.0 / 9.0).round() as usize)
}

/// Windows covered by a session of the given length in seconds.
pub fn windows_for_duration(seconds: u32) -> usize {
    (seconds / WINDOW_SECONDS) as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WmRound {
    pub difficulty: u8,
    /// Distinct product ids.
    pub shopping_list: Vec<usize>,
}

impl WmRound {
    pub fn generate<R: Rng>(difficulty: u8, rng: &mut R) -> Result<Self> {
        let n = wm_list_length(difficulty)?;
        Ok(WmRound { difficulty, shopping_list: sample(rng, WM_CATALOGUE_SIZE, n).into_vec() })
    }

    pub fn list_length(&self) -> usize {
        self.shopping_list.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgedDisplay {
    pub display: usize,
    pub age_years: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmRound {
    pub difficulty: u8,
    /// Displays marked for encoding, in visit order.
    pub encode_targets: Vec<AgedDisplay>,
    /// Displays the player must put back; a subset of `encode_targets`.
    pub retrieval_subset: Vec<usize>,
    /// Three displays for the oldest/youngest bonus question.
    pub bonus_triple: [AgedDisplay; 3],
    pub bonus_asks_oldest: bool,
}

impl EmRound {
    /// Retrieval asks for half the encoded displays (rounded up). The bonus
    /// triple comes from the encoded displays, topped up from the rest of the
    /// museum when fewer than three were encoded.
    pub fn generate<R: Rng>(difficulty: u8, rng: &mut R) -> Result<Self> {
        let n = em_target_count(difficulty)?;
        let ages = sample(rng, 2000, MUSEUM_DISPLAYS).into_vec();
        let order = sample(rng, MUSEUM_DISPLAYS, MUSEUM_DISPLAYS).into_vec();
        let aged = |d: usize| AgedDisplay { display: d, age_years: ages[d] as u32 + 1 };
        let encode_targets: Vec<AgedDisplay> = order[..n].iter().map(|&d| aged(d)).collect();
        let retrieve = sample(rng, n, n.div_ceil(2)).into_vec();
        let retrieval_subset = retrieve.iter().map(|&i| encode_targets[i].display).collect();
        let pool: Vec<usize> = if n >= 3 {
            sample(rng, n, 3).into_iter().map(|i| order[i]).collect()
        } else {
            order[..3].to_vec()
        };
        let bonus_triple = [aged(pool[0]), aged(pool[1]), aged(pool[2])];
        Ok(EmRound { difficulty, encode_targets, retrieval_subset, bonus_triple, bonus_asks_oldest: rng.random() })
    }

    pub fn retrieval_is_subset(&self) -> bool {
        self.retrieval_subset.iter().all(|d| self.encode_targets.iter().any(|t| t.display == *d))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Round {
    Wm(WmRound),
    Em(EmRound),
}

impl Round {
    pub fn generate<R: Rng>(task: Task, difficulty: u8, rng: &mut R) -> Result<Self> {
        Ok(match task {
            Task::Wm => Round::Wm(WmRound::generate(difficulty, rng)?),
            Task::Em => Round::Em(EmRound::generate(difficulty, rng)?),
        })
    }

    pub fn difficulty(&self) -> u8 {
        match self {
            Round::Wm(r) => r.difficulty,
            Round::Em(r) => r.difficulty,
        }
    }

    /// Scored events the round produces: one per list item, or one per
    /// retrieved display plus the bonus question.
    pub fn item_count(&self) -> usize {
        match self {
            Round::Wm(r) => r.list_length(),
            Round::Em(r) => r.retrieval_subset.len() + 1,
        }
    }
}

/// A synthetic player whose mistakes and affect depend on the gap between
/// difficulty and skill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlayerModel {
    pub skill: f64,
    pub error_steepness: f64,
    pub seed: u64,
}

impl PlayerModel {
    /// Steep enough that a player near their skill rarely scores outside
    /// the window's expected class.
    pub const DEFAULT_ERROR_STEEPNESS: f64 = 3.0;

    pub fn new(skill: f64, error_steepness: f64, seed: u64) -> Result<Self> {
        if !(1.0..=10.0).contains(&skill) {
            return Err(Error::OutOfRange(format!("skill {skill} outside [1, 10]")));
        }
        if !(error_steepness > 0.0 && error_steepness.is_finite()) {
            return Err(Error::OutOfRange(format!("error_steepness {error_steepness} must be positive")));
        }
        Ok(PlayerModel { skill, error_steepness, seed })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Per-item error probability, `logistic(steepness * (difficulty - skill))`.
    pub fn error_probability(&self, difficulty: u8) -> f64 {
        1.0 / (1.0 + (-self.error_steepness * (difficulty as f64 - self.skill)).exp())
    }

    /// Difficulties within one level of skill.
    pub fn flow_band(&self) -> (f64, f64) {
        (self.skill - 1.0, self.skill + 1.0)
    }
}

/// Bored well below skill, frustrated well above it, engaged near it.
pub fn player_affect(model: &PlayerModel, difficulty: u8) -> Quadrant {
    let gap = difficulty as f64 - model.skill;
    if gap <= -2.0 {
        Quadrant::CalmNegative
    } else if gap < 0.0 {
        Quadrant::CalmPositive
    } else if gap < 2.0 {
        Quadrant::EnergeticPositive
    } else {
        Quadrant::EnergeticNegative
    }
}

pub fn perform_items<R: Rng>(model: &PlayerModel, difficulty: u8, items: usize, rng: &mut R) -> Vec<ScoreEvent> {
    let p = model.error_probability(difficulty);
    (0..items)
        .map(|_| if rng.random::<f64>() < p { ScoreEvent::Incorrect } else { ScoreEvent::Correct })
        .collect()
}

pub fn player_perform<R: Rng>(model: &PlayerModel, round: &Round, rng: &mut R) -> Vec<ScoreEvent> {
    perform_items(model, round.difficulty(), round.item_count(), rng)
}

/// Synthetic facial EMG generator settings.
///
/// Each channel is `offset + scale * gain * envelope * band + noise`, where
/// `band` is unit-variance AR(1) noise with coefficient `smoothness` and the
/// envelope rises during expression bursts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthEmgConfig {
    /// `gains[quadrant][channel]`.
    pub gains: [[f64; CHANNEL_COUNT]; 4],
    pub noise_sd: f64,
    pub smoothness: f64,
    /// Expression bursts per second in calm / energetic windows.
    pub burst_rate_calm: f64,
    pub burst_rate_energetic: f64,
    pub burst_seconds: f64,
    /// Extra envelope gain during a burst.
    pub burst_gain: f64,
    /// Samples are rounded to this resolution; 0 disables rounding.
    pub quantum: f64,
    pub seed: u64,
}

/// Gain of a muscle group in a quadrant: mouth follows positive valence,
/// brow and corrugator follow negative valence, eyes and overall level follow
/// arousal.
pub fn default_gain(q: Quadrant, group: MuscleGroup) -> f64 {
    use MuscleGroup::*;
    use Quadrant::*;
    match (q, group) {
        (EnergeticPositive, Eye) => 1.6,
        (EnergeticPositive, Mouth) => 2.4,
        (EnergeticPositive, Brow) => 0.6,
        (EnergeticPositive, Corrugator) => 0.3,
        (CalmPositive, Eye) => 0.8,
        (CalmPositive, Mouth) => 1.4,
        (CalmPositive, Brow) => 0.4,
        (CalmPositive, Corrugator) => 0.2,
        (EnergeticNegative, Eye) => 1.6,
        (EnergeticNegative, Mouth) => 0.4,
        (EnergeticNegative, Brow) => 2.0,
        (EnergeticNegative, Corrugator) => 2.4,
        (CalmNegative, Eye) => 0.8,
        (CalmNegative, Mouth) => 0.3,
        (CalmNegative, Brow) => 1.0,
        (CalmNegative, Corrugator) => 1.4,
    }
}

impl Default for SynthEmgConfig {
    fn default() -> Self {
        let mut gains = [[0.0; CHANNEL_COUNT]; 4];
        for q in Quadrant::ALL {
            for (c, site) in Site::ALL.iter().enumerate() {
                gains[q.index()][c] = default_gain(q, site.group());
            }
        }
        SynthEmgConfig {
            gains,
            noise_sd: 0.2,
            smoothness: 0.95,
            burst_rate_calm: 0.1,
            burst_rate_energetic: 0.4,
            burst_seconds: 0.5,
            burst_gain: 1.0,
            quantum: 1e-3,
            seed: 0,
        }
    }
}

impl SynthEmgConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gains.iter().flatten().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return Err(Error::Config("synth gains must be finite and >= 0".into()));
        }
        let nonneg = [
            ("noise_sd", self.noise_sd),
            ("burst_rate_calm", self.burst_rate_calm),
            ("burst_rate_energetic", self.burst_rate_energetic),
            ("burst_seconds", self.burst_seconds),
            ("burst_gain", self.burst_gain),
            ("quantum", self.quantum),
        ];
        for (k, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{k} must be finite and >= 0, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.smoothness) {
            return Err(Error::Config(format!("smoothness must be in [0, 1), got {}", self.smoothness)));
        }
        Ok(())
    }

    pub fn gain(&self, q: Quadrant, site: Site) -> f64 {
        self.gains[q.index()][site as usize]
    }

    pub fn set_gain(&mut self, q: Quadrant, site: Site, gain: f64) {
        self.gains[q.index()][site as usize] = gain;
    }
}

/// Per-participant deviation from the nominal generator: a DC offset and a
/// multiplicative gain per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticipantProfile {
    pub offset: [f64; CHANNEL_COUNT],
    pub scale: [f64; CHANNEL_COUNT],
}

impl Default for ParticipantProfile {
    fn default() -> Self {
        ParticipantProfile { offset: [0.0; CHANNEL_COUNT], scale: [1.0; CHANNEL_COUNT] }
    }
}

impl ParticipantProfile {
    /// Offsets ~ N(0, offset_sd), scales ~ lognormal(0, scale_sd).
    pub fn draw<R: Rng>(offset_sd: f64, scale_sd: f64, rng: &mut R) -> Self {
        let mut p = ParticipantProfile::default();
        for c in 0..CHANNEL_COUNT {
            let o: f64 = rng.sample(StandardNormal);
            let s: f64 = rng.sample(StandardNormal);
            p.offset[c] = offset_sd * o;
            p.scale[c] = (scale_sd * s).exp();
        }
        p
    }
}

/// Identity of the window being generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMeta {
    pub participant_id: String,
    pub session_id: String,
    pub task: Task,
    pub window_index: u32,
    pub sample_rate_hz: u32,
}

/// Uniform draw from the open quarter-square of the quadrant.
pub fn draw_label<R: Rng>(q: Quadrant, rng: &mut R) -> AffectLabel {
    let mut open_unit = || loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let v = open_unit();
    let a = open_unit();
    let v = if q.is_positive_valence() { v } else { -v };
    let a = if q.is_high_arousal() { a } else { -a };
    AffectLabel::new(v, a).expect("within [-1, 1]")
}

pub fn synth_emg<R: Rng>(
    config: &SynthEmgConfig,
    quadrant: Quadrant,
    profile: &ParticipantProfile,
    meta: &SegmentMeta,
    rng: &mut R,
) -> Result<EmgSegment> {
    config.validate()?;
    let fs = meta.sample_rate_hz as f64;
    let n = meta.sample_rate_hz as usize * WINDOW_SECONDS as usize;
    let rate = if quadrant.is_high_arousal() { config.burst_rate_energetic } else { config.burst_rate_calm };
    let p_start = (rate / fs).min(1.0);
    let burst_len = ((config.burst_seconds * fs).round() as usize).max(1);

    // Bursts are shared by all channels: one facial expression moves every site.
    let mut envelope = vec![1.0; n];
    let mut remaining = 0usize;
    for e in envelope.iter_mut() {
        if remaining == 0 && rng.random::<f64>() < p_start {
            remaining = burst_len;
        }
        if remaining > 0 {
            *e += config.burst_gain;
            remaining -= 1;
        }
    }

    let rho = config.smoothness;
    let innovation = (1.0 - rho * rho).sqrt();
    let noise = Normal::new(0.0, config.noise_sd).map_err(|e| Error::Config(e.to_string()))?;
    let channels = (0..CHANNEL_COUNT)
        .map(|c| {
            let amp = profile.scale[c] * config.gains[quadrant.index()][c];
            let mut band: f64 = rng.sample(StandardNormal);
            envelope
                .iter()
                .map(|env| {
                    let e: f64 = rng.sample(StandardNormal);
                    band = rho * band + innovation * e;
                    let x = profile.offset[c] + amp * env * band + noise.sample(rng);
                    if config.quantum > 0.0 {
                        (x / config.quantum).round() * config.quantum
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    EmgSegment::new(
        meta.participant_id.clone(),
        meta.session_id.clone(),
        meta.task,
        meta.window_index,
        meta.sample_rate_hz,
        channels,
        Some(draw_label(quadrant, rng)),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SessionMode {
    Adaptive,
    NonAdaptive,
}

/// Where the closed loop gets the player's affect from.
#[derive(Debug, Clone, Copy)]
pub enum AffectSource<'a> {
    /// The player model's own state, no classification.
    GroundTruth,
    /// The full recognition pipeline applied to each synthetic window.
    Classifier(&'a TrainedPipeline),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub participant_id: String,
    pub session_id: String,
    pub task: Task,
    pub mode: SessionMode,
    pub windows: usize,
    pub start_difficulty: u8,
    pub sample_rate_hz: u32,
    pub synth: SynthEmgConfig,
}

/// One window of a simulated session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub window_index: u32,
    /// Difficulty in effect during the window.
    pub difficulty: u8,
    pub true_affect: Quadrant,
    /// Affect handed to the adaptation rules.
    pub affect: Quadrant,
    pub performance: PerformanceClass,
    /// Change requested at the end of the window, before clamping.
    pub delta: i8,
    pub next_difficulty: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedSession {
    pub log: SessionLog,
    pub trajectory: Vec<TrajectoryRow>,
}

impl SimulatedSession {
    pub fn difficulties(&self) -> Vec<u8> {
        self.trajectory.iter().map(|r| r.difficulty).collect()
    }

    pub fn final_difficulty(&self) -> u8 {
        self.trajectory.last().map_or(0, |r| r.next_difficulty)
    }

    /// Fraction of windows played inside `[lo, hi]`.
    pub fn time_in_band(&self, (lo, hi): (f64, f64)) -> f64 {
        let inside = self.trajectory.iter().filter(|r| (lo..=hi).contains(&(r.difficulty as f64))).count();
        inside as f64 / self.trajectory.len() as f64
    }
}

/// Run one session window by window: round → events → EMG → affect → difficulty.
///
/// The player RNG (rounds and events) and the EMG RNG are independent
/// streams seeded from `player.seed` and `config.synth.seed`.
pub fn simulate_session(
    player: &PlayerModel,
    config: &SimulationConfig,
    source: AffectSource<'_>,
) -> Result<SimulatedSession> {
    if config.windows == 0 {
        return Err(Error::OutOfRange("a session needs at least one window".into()));
    }
    check_difficulty(config.start_difficulty)?;
    let mut player_rng = player.rng();
    let mut emg_rng = ChaCha8Rng::seed_from_u64(config.synth.seed);
    let schedule = match config.mode {
        SessionMode::NonAdaptive => Some(schedule_nonadaptive(config.windows, config.start_difficulty)?),
        SessionMode::Adaptive => None,
    };
    let profile = ParticipantProfile::default();

    let mut state = DdaState::new(config.start_difficulty)?;
    let mut segments = Vec::with_capacity(config.windows);
    let mut events = Vec::with_capacity(config.windows);
    let mut track = Vec::with_capacity(config.windows);
    let mut trajectory = Vec::with_capacity(config.windows);
    let mut baseline = None;

    for w in 0..config.windows {
        let difficulty = state.difficulty();
        let round = Round::generate(config.task, difficulty, &mut player_rng)?;
        let window_events = player_perform(player, &round, &mut player_rng);
        let performance = classify_performance(&window_events);
        let true_affect = player_affect(player, difficulty);
        let meta = SegmentMeta {
            participant_id: config.participant_id.clone(),
            session_id: config.session_id.clone(),
            task: config.task,
            window_index: w as u32,
            sample_rate_hz: config.sample_rate_hz,
        };
        let segment = synth_emg(&config.synth, true_affect, &profile, &meta, &mut emg_rng)?;
        let affect = match source {
            AffectSource::GroundTruth => true_affect,
            AffectSource::Classifier(model) => {
                if baseline.is_none() {
                    baseline = Some(compute_baseline(&segment)?);
                }
                model.predict_segment(&segment, baseline.as_ref().expect("set above"))?
            }
        };

        let (delta, next) = match &schedule {
            Some(s) => {
                let next = s.get(w + 1).copied().unwrap_or(difficulty);
                (next as i8 - difficulty as i8, next)
            }
            None => {
                state = state.step(affect, performance);
                let step = state.history().last().expect("just stepped");
                (step.delta, step.difficulty)
            }
        };
        if let Some(s) = &schedule {
            state = DdaState::new(s.get(w + 1).copied().unwrap_or(difficulty))?;
        }

        track.push(difficulty);
        segments.push(segment);
        events.push(window_events);
        trajectory.push(TrajectoryRow {
            window_index: w as u32,
            difficulty,
            true_affect,
            affect,
            performance,
            delta,
            next_difficulty: next,
        });
    }
    Ok(SimulatedSession { log: SessionLog::new(track, segments, events)?, trajectory })
}

/// `window_index,difficulty,true_affect,affect,performance,delta,next_difficulty`.
pub fn write_simulation_csv<W: std::io::Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["window_index", "difficulty", "true_affect", "affect", "performance", "delta", "next_difficulty"])?;
    for r in rows {
        w.write_record([
            r.window_index.to_string(),
            r.difficulty.to_string(),
            r.true_affect.code().to_owned(),
            r.affect.code().to_owned(),
            r.performance.name().to_owned(),
            r.delta.to_string(),
            r.next_difficulty.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Labeled corpus settings. Each participant plays `sessions_per_participant`
/// sessions cycling through tasks and the easy/medium/hard levels; the
/// quadrant of every window is drawn uniformly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub participants: usize,
    pub sessions_per_participant: usize,
    pub windows_per_session: usize,
    pub sample_rate_hz: u32,
    /// Difficulty of successive sessions, cycled.
    pub levels: Vec<u8>,
    pub offset_sd: f64,
    pub scale_sd: f64,
    pub error_steepness: f64,
    pub seed: u64,
    pub synth: SynthEmgConfig,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            participants: 12,
            sessions_per_participant: 6,
            windows_per_session: 5,
            sample_rate_hz: 64,
            levels: vec![1, 5, 10],
            offset_sd: 0.5,
            scale_sd: 0.15,
            error_steepness: PlayerModel::DEFAULT_ERROR_STEEPNESS,
            seed: 42,
            synth: SynthEmgConfig::default(),
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.participants == 0 || self.sessions_per_participant == 0 || self.windows_per_session == 0 {
            return Err(Error::Config("participants, sessions and windows must all be >= 1".into()));
        }
        if self.sample_rate_hz == 0 {
            return Err(Error::Config("sample_rate_hz must be positive".into()));
        }
        if self.levels.is_empty() || self.levels.iter().any(|d| !(1..=10).contains(d)) {
            return Err(Error::Config("levels must be a non-empty list of difficulties in [1, 10]".into()));
        }
        if !(self.offset_sd >= 0.0) || !(self.scale_sd >= 0.0) {
            return Err(Error::Config("offset_sd and scale_sd must be >= 0".into()));
        }
        self.synth.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantDraw {
    pub participant_id: String,
    pub skill: f64,
    pub profile: ParticipantProfile,
    /// Quadrant drawn for each window, per session.
    pub quadrants: Vec<Vec<Quadrant>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub sessions: Vec<Vec<SessionLog>>,
    pub draws: Vec<ParticipantDraw>,
}

/// Independent sub-seed number `stream` of a root seed.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng.random()
}

pub fn participant_id(index: usize) -> String {
    format!("P{:02}", index + 1)
}

/// Generate a labeled corpus. Participant `i` uses its own RNG stream derived
/// from the root seed, so corpora with more participants extend, not reshuffle,
/// smaller ones.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut sessions = Vec::with_capacity(cfg.participants);
    let mut draws = Vec::with_capacity(cfg.participants);
    for p in 0..cfg.participants {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(p as u64 + 1);
        let pid = participant_id(p);
        let skill = rng.random_range(2.0..=9.0);
        let player = PlayerModel::new(skill, cfg.error_steepness, rng.random())?;
        let mut player_rng = player.rng();
        let profile = ParticipantProfile::draw(cfg.offset_sd, cfg.scale_sd, &mut rng);
        let mut logs = Vec::with_capacity(cfg.sessions_per_participant);
        let mut quadrants = Vec::with_capacity(cfg.sessions_per_participant);
        for s in 0..cfg.sessions_per_participant {
            let task = if s % 2 == 0 { Task::Wm } else { Task::Em };
            let difficulty = cfg.levels[(s / 2) % cfg.levels.len()];
            let session_id = format!("{pid}-S{s}");
            let mut segs = Vec::with_capacity(cfg.windows_per_session);
            let mut events = Vec::with_capacity(cfg.windows_per_session);
            let mut qs = Vec::with_capacity(cfg.windows_per_session);
            for w in 0..cfg.windows_per_session {
                let q = Quadrant::ALL[rng.random_range(0..4)];
                let meta = SegmentMeta {
                    participant_id: pid.clone(),
                    session_id: session_id.clone(),
                    task,
                    window_index: w as u32,
                    sample_rate_hz: cfg.sample_rate_hz,
                };
                segs.push(synth_emg(&cfg.synth, q, &profile, &meta, &mut rng)?);
                let round = Round::generate(task, difficulty, &mut player_rng)?;
                events.push(player_perform(&player, &round, &mut player_rng));
                qs.push(q);
            }
            logs.push(SessionLog::new(vec![difficulty; cfg.windows_per_session], segs, events)?);
            quadrants.push(qs);
        }
        sessions.push(logs);
        draws.push(ParticipantDraw { participant_id: pid, skill, profile, quadrants });
    }
    Ok(Corpus { sessions, draws })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_lengths() {
        assert_eq!(wm_list_length(1).unwrap(), 2);
        assert_eq!(wm_list_length(10).unwrap(), 12);
        assert_eq!(wm_list_length(5).unwrap(), 6);
        assert!(wm_list_length(0).is_err());
        assert!(wm_list_length(11).is_err());
        assert_eq!(em_target_count(1).unwrap(), 1);
        assert_eq!(em_target_count(10).unwrap(), 8);
    }

    #[test]
    fn durations() {
        assert_eq!(windows_for_duration(7 * 60 + 30), 10);
        assert_eq!(windows_for_duration(3 * 60 + 45), 5);
    }

    #[test]
    fn affect_examples() {
        let p = PlayerModel::new(5.0, 1.0, 0).unwrap();
        assert_eq!(player_affect(&p, 1), Quadrant::CalmNegative);
        assert_eq!(player_affect(&p, 3), Quadrant::CalmNegative);
        assert_eq!(player_affect(&p, 4), Quadrant::CalmPositive);
        assert_eq!(player_affect(&p, 5), Quadrant::EnergeticPositive);
        assert_eq!(player_affect(&p, 6), Quadrant::EnergeticPositive);
        assert_eq!(player_affect(&p, 7), Quadrant::EnergeticNegative);
        assert_eq!(player_affect(&p, 9), Quadrant::EnergeticNegative);
    }

    #[test]
    fn wm_list_is_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=10 {
            let r = WmRound::generate(d, &mut rng).unwrap();
            let mut l = r.shopping_list.clone();
            l.sort();
            l.dedup();
            assert_eq!(l.len(), wm_list_length(d).unwrap());
        }
    }

    #[test]
    fn em_rounds_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in 1..=10 {
            for _ in 0..20 {
                let r = EmRound::generate(d, &mut rng).unwrap();
                assert!(r.retrieval_is_subset());
                assert_eq!(r.encode_targets.len(), em_target_count(d).unwrap());
                let mut ids: Vec<usize> = r.bonus_triple.iter().map(|a| a.display).collect();
                ids.sort();
                ids.dedup();
                assert_eq!(ids.len(), 3);
            }
        }
    }

    #[test]
    fn zero_items_no_events() {
        let p = PlayerModel::new(5.0, 1.0, 0).unwrap();
        assert!(perform_items(&p, 5, 0, &mut p.rng()).is_empty());
    }

    fn meta() -> SegmentMeta {
        SegmentMeta { participant_id: "P".into(), session_id: "S".into(), task: Task::Wm, window_index: 0, sample_rate_hz: 32 }
    }

    #[test]
    fn silent_generator_is_zero() {
        let cfg = SynthEmgConfig { gains: [[0.0; 8]; 4], noise_sd: 0.0, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = synth_emg(&cfg, Quadrant::CalmPositive, &ParticipantProfile::default(), &meta(), &mut rng).unwrap();
        assert!(s.channels().iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn same_seed_same_segment() {
        let cfg = SynthEmgConfig::default();
        let gen = || {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            synth_emg(&cfg, Quadrant::EnergeticNegative, &ParticipantProfile::default(), &meta(), &mut rng).unwrap()
        };
        assert_eq!(gen(), gen());
    }

    #[test]
    fn label_lies_in_quadrant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for q in Quadrant::ALL {
            for _ in 0..100 {
                let l = draw_label(q, &mut rng);
                assert_eq!(crate::dataset::truncate_label(l).unwrap(), q);
            }
        }
    }
}
