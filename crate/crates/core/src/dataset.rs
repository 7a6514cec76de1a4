//! Session data model and the JSON-lines session file format.
//!
//! A session file holds one or more sessions. Each session starts with a
//! header record and is followed by one segment record per 45 s window:
//!
//! ```text
//! {"kind":"header","participant_id":"P01","session_id":"P01-S0","task":"WM","sample_rate_hz":1000,"difficulty_track":[1,1,1,1,1]}
//! {"kind":"segment","window_index":0,"channels":[[...],...],"valence":0.4,"arousal":-0.2,"score_events":["correct","incorrect"]}
//! ```
//!
//! Valence and arousal are either both numbers or both `null` (unlabeled).

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every EMG window (and every annotation interval) lasts this long.
pub const WINDOW_SECONDS: u32 = 45;
/// Facial EMG electrodes in the headset insert.
pub const CHANNEL_COUNT: usize = 8;
/// Used when a caller needs a rate and has none; session files always carry their own.
pub const DEFAULT_SAMPLE_RATE_HZ: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Working-memory shopping task.
    #[serde(rename = "WM")]
    Wm,
    /// Episodic-memory museum task.
    #[serde(rename = "EM")]
    Em,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Wm => "WM",
            Task::Em => "EM",
        })
    }
}

/// Continuous self-report from the affective slider, both axes in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffectLabel {
    valence: f64,
    arousal: f64,
}

impl AffectLabel {
    pub fn new(valence: f64, arousal: f64) -> Result<Self> {
        for (name, v) in [("valence", valence), ("arousal", arousal)] {
            if !v.is_finite() || !(-1.0..=1.0).contains(&v) {
                return Err(Error::schema(None, format!("{name} {v} outside [-1, 1]")));
            }
        }
        Ok(AffectLabel { valence, arousal })
    }

    pub fn valence(&self) -> f64 {
        self.valence
    }

    pub fn arousal(&self) -> f64 {
        self.arousal
    }
}

/// Four-class truncation of the valence/arousal plane.
///
/// The declaration order (EP < CP < EN < CN) is the canonical order used for
/// every deterministic tie-break downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    /// High valence, high arousal.
    EnergeticPositive,
    /// High valence, low arousal.
    CalmPositive,
    /// Low valence, high arousal.
    EnergeticNegative,
    /// Low valence, low arousal.
    CalmNegative,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [
        Quadrant::EnergeticPositive,
        Quadrant::CalmPositive,
        Quadrant::EnergeticNegative,
        Quadrant::CalmNegative,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Quadrant> {
        Self::ALL.get(index).copied()
    }

    pub fn from_signs(positive_valence: bool, high_arousal: bool) -> Quadrant {
        match (positive_valence, high_arousal) {
            (true, true) => Quadrant::EnergeticPositive,
            (true, false) => Quadrant::CalmPositive,
            (false, true) => Quadrant::EnergeticNegative,
            (false, false) => Quadrant::CalmNegative,
        }
    }

    pub fn is_positive_valence(self) -> bool {
        matches!(self, Quadrant::EnergeticPositive | Quadrant::CalmPositive)
    }

    pub fn is_high_arousal(self) -> bool {
        matches!(self, Quadrant::EnergeticPositive | Quadrant::EnergeticNegative)
    }

    /// Two-letter code used in CSV output.
    pub fn code(self) -> &'static str {
        match self {
            Quadrant::EnergeticPositive => "EP",
            Quadrant::CalmPositive => "CP",
            Quadrant::EnergeticNegative => "EN",
            Quadrant::CalmNegative => "CN",
        }
    }

    pub fn from_code(code: &str) -> Option<Quadrant> {
        Self::ALL.into_iter().find(|q| q.code() == code)
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Map a continuous label onto its quadrant by the signs of its components.
///
/// A component of exactly zero has no side and is rejected.
pub fn truncate_label(label: AffectLabel) -> Result<Quadrant> {
    if label.valence == 0.0 || label.arousal == 0.0 {
        return Err(Error::AmbiguousLabel { valence: label.valence, arousal: label.arousal });
    }
    Ok(Quadrant::from_signs(label.valence > 0.0, label.arousal > 0.0))
}

/// Electrode site. The exact map of the headset insert is not published, so
/// this layout is a modeling convention: eyes, mouth, brows, corrugator, left
/// then right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    EyeLeft,
    EyeRight,
    MouthLeft,
    MouthRight,
    BrowLeft,
    BrowRight,
    CorrugatorLeft,
    CorrugatorRight,
}

/// Muscle group a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MuscleGroup {
    Eye,
    Mouth,
    Brow,
    Corrugator,
}

impl Site {
    pub const ALL: [Site; CHANNEL_COUNT] = [
        Site::EyeLeft,
        Site::EyeRight,
        Site::MouthLeft,
        Site::MouthRight,
        Site::BrowLeft,
        Site::BrowRight,
        Site::CorrugatorLeft,
        Site::CorrugatorRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Site::EyeLeft => "eye_left",
            Site::EyeRight => "eye_right",
            Site::MouthLeft => "mouth_left",
            Site::MouthRight => "mouth_right",
            Site::BrowLeft => "brow_left",
            Site::BrowRight => "brow_right",
            Site::CorrugatorLeft => "corrugator_left",
            Site::CorrugatorRight => "corrugator_right",
        }
    }

    pub fn group(self) -> MuscleGroup {
        match self {
            Site::EyeLeft | Site::EyeRight => MuscleGroup::Eye,
            Site::MouthLeft | Site::MouthRight => MuscleGroup::Mouth,
            Site::BrowLeft | Site::BrowRight => MuscleGroup::Brow,
            Site::CorrugatorLeft | Site::CorrugatorRight => MuscleGroup::Corrugator,
        }
    }
}

/// Channel index 0..8, in bijection with [`Site`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChannelId(u8);

impl ChannelId {
    pub fn new(index: usize) -> Option<ChannelId> {
        (index < CHANNEL_COUNT).then_some(ChannelId(index as u8))
    }

    pub fn from_site(site: Site) -> ChannelId {
        ChannelId(site as u8)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn site(self) -> Site {
        Site::ALL[self.index()]
    }

    pub fn all() -> impl Iterator<Item = ChannelId> {
        (0..CHANNEL_COUNT as u8).map(ChannelId)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreEvent {
    Correct,
    Incorrect,
}

/// One 45 s, 8-channel window of raw EMG.
#[derive(Debug, Clone, PartialEq)]
pub struct EmgSegment {
    participant_id: String,
    session_id: String,
    task: Task,
    window_index: u32,
    sample_rate_hz: u32,
    channels: Vec<Vec<f64>>,
    label: Option<AffectLabel>,
}

impl EmgSegment {
    pub fn new(
        participant_id: impl Into<String>,
        session_id: impl Into<String>,
        task: Task,
        window_index: u32,
        sample_rate_hz: u32,
        channels: Vec<Vec<f64>>,
        label: Option<AffectLabel>,
    ) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::schema(None, "sample_rate_hz must be positive"));
        }
        check_channels(&channels, sample_rate_hz)?;
        Ok(EmgSegment {
            participant_id: participant_id.into(),
            session_id: session_id.into(),
            task,
            window_index,
            sample_rate_hz,
            channels,
            label,
        })
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn window_index(&self) -> u32 {
        self.window_index
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn channel(&self, id: ChannelId) -> &[f64] {
        &self.channels[id.index()]
    }

    pub fn label(&self) -> Option<AffectLabel> {
        self.label
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same metadata, new sample data of identical shape.
    pub(crate) fn with_channels(&self, channels: Vec<Vec<f64>>) -> EmgSegment {
        debug_assert_eq!(channels.len(), CHANNEL_COUNT);
        EmgSegment { channels, ..self.clone_meta() }
    }

    fn clone_meta(&self) -> EmgSegment {
        EmgSegment {
            participant_id: self.participant_id.clone(),
            session_id: self.session_id.clone(),
            task: self.task,
            window_index: self.window_index,
            sample_rate_hz: self.sample_rate_hz,
            channels: Vec::new(),
            label: self.label,
        }
    }
}

fn check_channels(channels: &[Vec<f64>], sample_rate_hz: u32) -> Result<()> {
    if channels.len() != CHANNEL_COUNT {
        return Err(Error::schema(
            None,
            format!("expected {CHANNEL_COUNT} channels, found {}", channels.len()),
        ));
    }
    let expected = sample_rate_hz as usize * WINDOW_SECONDS as usize;
    for (c, ch) in channels.iter().enumerate() {
        if ch.len() != expected {
            return Err(Error::schema(
                None,
                format!("channel {c} has {} samples, expected {expected} ({sample_rate_hz} Hz x {WINDOW_SECONDS} s)", ch.len()),
            ));
        }
        if let Some(i) = ch.iter().position(|x| !x.is_finite()) {
            return Err(Error::schema(None, format!("channel {c} sample {i} is not finite")));
        }
    }
    Ok(())
}

/// One recorded (or simulated) session: ordered windows plus the difficulty
/// in effect and the score events of each window.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    participant_id: String,
    session_id: String,
    task: Task,
    sample_rate_hz: u32,
    difficulty_track: Vec<u8>,
    segments: Vec<EmgSegment>,
    score_events: Vec<Vec<ScoreEvent>>,
}

impl SessionLog {
    /// Validates that segments belong to this session, are contiguous from
    /// window 0, and line up one-to-one with the difficulty track and events.
    pub fn new(
        difficulty_track: Vec<u8>,
        segments: Vec<EmgSegment>,
        score_events: Vec<Vec<ScoreEvent>>,
    ) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::schema(None, "session has no segments"))?;
        let (participant_id, session_id) = (first.participant_id.clone(), first.session_id.clone());
        let (task, sample_rate_hz) = (first.task, first.sample_rate_hz);
        for (i, seg) in segments.iter().enumerate() {
            if seg.window_index as usize != i {
                return Err(Error::schema(
                    None,
                    format!("window_index {} at position {i}; indices must be contiguous from 0", seg.window_index),
                ));
            }
            if seg.participant_id != participant_id
                || seg.session_id != session_id
                || seg.task != task
                || seg.sample_rate_hz != sample_rate_hz
            {
                return Err(Error::schema(None, format!("segment {i} metadata differs from the session's")));
            }
        }
        if difficulty_track.len() != segments.len() {
            return Err(Error::schema(
                None,
                format!("difficulty_track has {} entries for {} windows", difficulty_track.len(), segments.len()),
            ));
        }
        if let Some(d) = difficulty_track.iter().find(|d| !(1..=10).contains(*d)) {
            return Err(Error::schema(None, format!("difficulty {d} outside [1, 10]")));
        }
        if score_events.len() != segments.len() {
            return Err(Error::schema(
                None,
                format!("{} score-event lists for {} windows", score_events.len(), segments.len()),
            ));
        }
        Ok(SessionLog {
            participant_id,
            session_id,
            task,
            sample_rate_hz,
            difficulty_track,
            segments,
            score_events,
        })
    }

    pub fn participant_id(&self) -> &str {
        &self.participant_id
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn difficulty_track(&self) -> &[u8] {
        &self.difficulty_track
    }

    pub fn segments(&self) -> &[EmgSegment] {
        &self.segments
    }

    pub fn score_events(&self) -> &[Vec<ScoreEvent>] {
        &self.score_events
    }

    pub fn window_count(&self) -> usize {
        self.segments.len()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record<'a> {
    Header(#[serde(borrow)] HeaderRecord<'a>),
    Segment(SegmentRecord<'a>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeaderRecord<'a> {
    #[serde(borrow)]
    participant_id: std::borrow::Cow<'a, str>,
    #[serde(borrow)]
    session_id: std::borrow::Cow<'a, str>,
    task: Task,
    sample_rate_hz: u32,
    difficulty_track: Vec<u8>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord<'a> {
    window_index: u32,
    channels: std::borrow::Cow<'a, [Vec<f64>]>,
    valence: Option<f64>,
    arousal: Option<f64>,
    score_events: Vec<ScoreEvent>,
}

/// Write sessions in the JSON-lines format.
pub fn write_sessions<W: Write>(mut out: W, sessions: &[SessionLog]) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<writer>", e);
    for s in sessions {
        let header = Record::Header(HeaderRecord {
            participant_id: s.participant_id.as_str().into(),
            session_id: s.session_id.as_str().into(),
            task: s.task,
            sample_rate_hz: s.sample_rate_hz,
            difficulty_track: s.difficulty_track.clone(),
        });
        serde_json::to_writer(&mut out, &header).map_err(|e| io(e.into()))?;
        out.write_all(b"\n").map_err(io)?;
        for (seg, events) in s.segments.iter().zip(&s.score_events) {
            let rec = Record::Segment(SegmentRecord {
                window_index: seg.window_index,
                channels: std::borrow::Cow::Borrowed(&seg.channels),
                valence: seg.label.map(|l| l.valence),
                arousal: seg.label.map(|l| l.arousal),
                score_events: events.clone(),
            });
            serde_json::to_writer(&mut out, &rec).map_err(|e| io(e.into()))?;
            out.write_all(b"\n").map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

pub fn save_sessions(path: impl AsRef<Path>, sessions: &[SessionLog]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sessions(BufWriter::new(file), sessions).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

struct PendingSession {
    header_line: usize,
    participant_id: String,
    session_id: String,
    task: Task,
    sample_rate_hz: u32,
    difficulty_track: Vec<u8>,
    segments: Vec<EmgSegment>,
    score_events: Vec<Vec<ScoreEvent>>,
}

impl PendingSession {
    fn finish(self) -> Result<SessionLog> {
        let line = Some(self.header_line);
        if self.segments.is_empty() {
            return Err(Error::schema(line, "session header without segments"));
        }
        SessionLog::new(self.difficulty_track, self.segments, self.score_events).map_err(|e| match e {
            Error::Schema { message, .. } => Error::Schema { line, message },
            other => other,
        })
    }
}

/// Parse and validate sessions from a JSON-lines stream.
pub fn read_sessions<R: BufRead>(reader: R) -> Result<Vec<SessionLog>> {
    let mut sessions = Vec::new();
    let mut pending: Option<PendingSession> = None;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record<'_> = serde_json::from_str(&line)
            .map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        match record {
            Record::Header(h) => {
                if let Some(p) = pending.take() {
                    sessions.push(p.finish()?);
                }
                if h.sample_rate_hz == 0 {
                    return Err(Error::schema(Some(lineno), "sample_rate_hz must be positive"));
                }
                pending = Some(PendingSession {
                    header_line: lineno,
                    participant_id: h.participant_id.into_owned(),
                    session_id: h.session_id.into_owned(),
                    task: h.task,
                    sample_rate_hz: h.sample_rate_hz,
                    difficulty_track: h.difficulty_track,
                    segments: Vec::new(),
                    score_events: Vec::new(),
                });
            }
            Record::Segment(s) => {
                let p = pending
                    .as_mut()
                    .ok_or_else(|| Error::schema(Some(lineno), "segment record before any header"))?;
                let at = |e: Error| match e {
                    Error::Schema { message, .. } => Error::Schema { line: Some(lineno), message },
                    other => other,
                };
                let label = match (s.valence, s.arousal) {
                    (Some(v), Some(a)) => Some(AffectLabel::new(v, a).map_err(at)?),
                    (None, None) => None,
                    _ => return Err(Error::schema(Some(lineno), "valence and arousal must both be set or both be null")),
                };
                let segment = EmgSegment::new(
                    p.participant_id.clone(),
                    p.session_id.clone(),
                    p.task,
                    s.window_index,
                    p.sample_rate_hz,
                    s.channels.into_owned(),
                    label,
                )
                .map_err(at)?;
                if segment.window_index as usize != p.segments.len() {
                    return Err(Error::schema(
                        Some(lineno),
                        format!("window_index {} but expected {}", segment.window_index, p.segments.len()),
                    ));
                }
                p.segments.push(segment);
                p.score_events.push(s.score_events);
            }
        }
    }
    if let Some(p) = pending {
        sessions.push(p.finish()?);
    }
    Ok(sessions)
}

pub fn load_sessions(path: impl AsRef<Path>) -> Result<Vec<SessionLog>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sessions(BufReader::new(file))
}

/// Load every `*.jsonl` file in a directory (sorted by file name), or a single file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<SessionLog>> {
    let path = path.as_ref();
    if path.is_file() {
        return load_sessions(path);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(|e| Error::io(path, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    files.sort();
    let mut sessions = Vec::new();
    for f in files {
        sessions.extend(load_sessions(&f).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", f.display()) },
            Error::Schema { line, message } => Error::Schema { line, message: format!("{}: {message}", f.display()) },
            other => other,
        })?);
    }
    Ok(sessions)
}

/// Per-participant label counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    /// Indexed by [`Quadrant::index`].
    pub quadrants: [usize; 4],
    pub ambiguous: usize,
    pub unlabeled: usize,
}

impl ClassCounts {
    pub fn count(&self, q: Quadrant) -> usize {
        self.quadrants[q.index()]
    }
}

pub fn dataset_summary(sessions: &[SessionLog]) -> BTreeMap<String, ClassCounts> {
    let mut table: BTreeMap<String, ClassCounts> = BTreeMap::new();
    for s in sessions {
        let row = table.entry(s.participant_id.clone()).or_default();
        for seg in &s.segments {
            match seg.label.map(truncate_label) {
                Some(Ok(q)) => row.quadrants[q.index()] += 1,
                Some(Err(_)) => row.ambiguous += 1,
                None => row.unlabeled += 1,
            }
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(v: f64, a: f64) -> AffectLabel {
        AffectLabel::new(v, a).unwrap()
    }

    fn segment(window: u32, label: Option<AffectLabel>) -> EmgSegment {
        EmgSegment::new("P1", "S1", Task::Wm, window, 2, vec![vec![0.5; 90]; 8], label).unwrap()
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncate_label(label(0.5, 0.5)).unwrap(), Quadrant::EnergeticPositive);
        assert_eq!(truncate_label(label(-0.3, 0.9)).unwrap(), Quadrant::EnergeticNegative);
        assert_eq!(truncate_label(label(0.2, -0.7)).unwrap(), Quadrant::CalmPositive);
        assert_eq!(truncate_label(label(-0.2, -0.7)).unwrap(), Quadrant::CalmNegative);
        assert!(matches!(truncate_label(label(0.0, 0.2)), Err(Error::AmbiguousLabel { .. })));
        assert!(matches!(truncate_label(label(0.4, -0.0)), Err(Error::AmbiguousLabel { .. })));
    }

    #[test]
    fn label_range_checked() {
        assert!(AffectLabel::new(1.5, 0.0).is_err());
        assert!(AffectLabel::new(0.0, f64::NAN).is_err());
        assert!(AffectLabel::new(-1.0, 1.0).is_ok());
    }

    #[test]
    fn quadrant_order_and_codes() {
        let mut sorted = Quadrant::ALL;
        sorted.sort();
        assert_eq!(sorted, Quadrant::ALL);
        for q in Quadrant::ALL {
            assert_eq!(Quadrant::from_code(q.code()), Some(q));
            assert_eq!(Quadrant::from_index(q.index()), Some(q));
        }
    }

    #[test]
    fn channel_site_bijection() {
        for ch in ChannelId::all() {
            assert_eq!(ChannelId::from_site(ch.site()), ch);
        }
        assert!(ChannelId::new(8).is_none());
    }

    #[test]
    fn segment_shape_is_enforced() {
        let bad = EmgSegment::new("P", "S", Task::Em, 0, 2, vec![vec![0.0; 90]; 7], None);
        assert!(matches!(bad, Err(Error::Schema { .. })));
        let short = EmgSegment::new("P", "S", Task::Em, 0, 2, vec![vec![0.0; 89]; 8], None);
        assert!(matches!(short, Err(Error::Schema { .. })));
        let mut chans = vec![vec![0.0; 90]; 8];
        chans[3][10] = f64::INFINITY;
        assert!(EmgSegment::new("P", "S", Task::Em, 0, 2, chans, None).is_err());
    }

    #[test]
    fn session_requires_contiguous_windows() {
        let segs = vec![segment(0, None), segment(2, None)];
        assert!(SessionLog::new(vec![1, 1], segs, vec![vec![], vec![]]).is_err());
        let segs = vec![segment(0, None), segment(1, None)];
        assert!(SessionLog::new(vec![1], segs.clone(), vec![vec![], vec![]]).is_err());
        assert!(SessionLog::new(vec![1, 11], segs.clone(), vec![vec![], vec![]]).is_err());
        assert!(SessionLog::new(vec![1, 2], segs, vec![vec![], vec![]]).is_ok());
    }

    fn five_window_session() -> SessionLog {
        let segs = (0..5).map(|w| segment(w, Some(label(0.5, 0.5)))).collect();
        SessionLog::new(vec![3; 5], segs, vec![vec![ScoreEvent::Correct]; 5]).unwrap()
    }

    #[test]
    fn load_five_windows() {
        let mut buf = Vec::new();
        write_sessions(&mut buf, &[five_window_session()]).unwrap();
        let loaded = read_sessions(buf.as_slice()).unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0].window_count(), 5);
        assert_eq!(loaded[0], five_window_session());
    }

    fn header(track: &str) -> String {
        format!(
            r#"{{"kind":"header","participant_id":"P1","session_id":"S1","task":"WM","sample_rate_hz":1,"difficulty_track":{track}}}"#
        )
    }

    fn seg_line(window: u32, n_channels: usize, valence: &str) -> String {
        let ch = format!("[{}]", vec!["0.0"; 45].join(","));
        let chans = vec![ch; n_channels].join(",");
        format!(
            r#"{{"kind":"segment","window_index":{window},"channels":[{chans}],"valence":{valence},"arousal":0.3,"score_events":["correct","incorrect"]}}"#
        )
    }

    #[test]
    fn seven_channels_is_schema_error() {
        let text = format!("{}\n{}\n", header("[1]"), seg_line(0, 7, "0.1"));
        let err = read_sessions(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn out_of_range_valence_is_schema_error() {
        let text = format!("{}\n{}\n", header("[1]"), seg_line(0, 8, "1.5"));
        let err = read_sessions(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { line: Some(2), .. }), "{err}");
    }

    #[test]
    fn half_null_label_is_rejected() {
        let text = format!("{}\n{}\n", header("[1]"), seg_line(0, 8, "null"));
        assert!(matches!(read_sessions(text.as_bytes()), Err(Error::Schema { .. })));
    }

    #[test]
    fn malformed_json_reports_line() {
        let text = format!("{}\n{}\n{{oops\n", header("[1,1]"), seg_line(0, 8, "0.1"));
        let err = read_sessions(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn track_length_mismatch_points_at_header() {
        let text = format!("{}\n{}\n", header("[1,2]"), seg_line(0, 8, "0.1"));
        let err = read_sessions(text.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Schema { line: Some(1), .. }), "{err}");
    }

    #[test]
    fn segment_before_header() {
        let text = format!("{}\n", seg_line(0, 8, "0.1"));
        assert!(matches!(read_sessions(text.as_bytes()), Err(Error::Schema { line: Some(1), .. })));
    }

    #[test]
    fn summary_counts() {
        let table = dataset_summary(&[five_window_session()]);
        assert_eq!(table["P1"].count(Quadrant::EnergeticPositive), 5);
        assert_eq!(table["P1"].ambiguous, 0);

        let segs = (0..3).map(|w| segment(w, None)).collect();
        let unlabeled = SessionLog::new(vec![1; 3], segs, vec![vec![]; 3]).unwrap();
        let table = dataset_summary(&[unlabeled]);
        assert_eq!(table["P1"].quadrants, [0; 4]);
        assert_eq!(table["P1"].unlabeled, 3);
    }
}
