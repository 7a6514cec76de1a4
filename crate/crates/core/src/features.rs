//! Temporal sEMG features and the 112-dimensional feature vector.
//!
//! Every channel contributes the same fourteen features, computed on the DWT
//! approximation band of the baseline-normalized signal. Four of them (SSC,
//! MMAV1, ZC, RMS) are the ones that rank highly on real recordings; the rest
//! are standard companions from the same catalogue. Swapping the set means
//! editing [`FeatureKind`] and [`extract_channel_features`] together.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::{truncate_label, ChannelId, EmgSegment, Quadrant, CHANNEL_COUNT};
use crate::dsp::{dwt_haar_approx, normalize, BaselineProfile, DwtConfig, NormalizationMode};
use crate::error::{Error, Result};

pub const FEATURES_PER_CHANNEL: usize = 14;
pub const FEATURE_COUNT: usize = CHANNEL_COUNT * FEATURES_PER_CHANNEL;

/// Guards `ln(0)` in the LOG feature.
pub const LOG_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureKind {
    /// Integrated EMG.
    Iemg,
    /// Mean absolute value.
    Mav,
    /// Modified MAV, step weighting.
    Mmav1,
    /// Modified MAV, trapezoidal weighting.
    Mmav2,
    Rms,
    /// Second moment about zero, `N - 1` normalized.
    Var,
    /// Sample standard deviation about the mean.
    Sd,
    /// Waveform length.
    Wl,
    /// Zero crossings.
    Zc,
    /// Slope sign changes.
    Ssc,
    /// Willison amplitude.
    Wamp,
    /// Log detector.
    Log,
    /// Difference absolute standard deviation value.
    Dasdv,
    /// Myopulse percentage rate.
    Myop,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; FEATURES_PER_CHANNEL] = [
        FeatureKind::Iemg,
        FeatureKind::Mav,
        FeatureKind::Mmav1,
        FeatureKind::Mmav2,
        FeatureKind::Rms,
        FeatureKind::Var,
        FeatureKind::Sd,
        FeatureKind::Wl,
        FeatureKind::Zc,
        FeatureKind::Ssc,
        FeatureKind::Wamp,
        FeatureKind::Log,
        FeatureKind::Dasdv,
        FeatureKind::Myop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Iemg => "iemg",
            FeatureKind::Mav => "mav",
            FeatureKind::Mmav1 => "mmav1",
            FeatureKind::Mmav2 => "mmav2",
            FeatureKind::Rms => "rms",
            FeatureKind::Var => "var",
            FeatureKind::Sd => "sd",
            FeatureKind::Wl => "wl",
            FeatureKind::Zc => "zc",
            FeatureKind::Ssc => "ssc",
            FeatureKind::Wamp => "wamp",
            FeatureKind::Log => "log",
            FeatureKind::Dasdv => "dasdv",
            FeatureKind::Myop => "myop",
        }
    }

    /// Threshold-gated event counts (or rates) rather than amplitudes.
    pub fn is_count(self) -> bool {
        matches!(self, FeatureKind::Zc | FeatureKind::Ssc | FeatureKind::Wamp | FeatureKind::Myop)
    }
}

/// A (channel, kind) pair. Canonical order is channel-major, kind-minor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureId {
    pub channel: ChannelId,
    pub kind: FeatureKind,
}

impl FeatureId {
    pub fn index(self) -> usize {
        self.channel.index() * FEATURES_PER_CHANNEL + self.kind as usize
    }

    pub fn from_index(index: usize) -> Option<FeatureId> {
        let channel = ChannelId::new(index / FEATURES_PER_CHANNEL)?;
        Some(FeatureId { channel, kind: FeatureKind::ALL[index % FEATURES_PER_CHANNEL] })
    }

    pub fn all() -> impl Iterator<Item = FeatureId> {
        (0..FEATURE_COUNT).map(|i| FeatureId::from_index(i).unwrap())
    }

    /// e.g. `eye_right_ssc`.
    pub fn name(self) -> String {
        format!("{}_{}", self.channel.site().name(), self.kind.name())
    }

    pub fn from_name(name: &str) -> Option<FeatureId> {
        FeatureId::all().find(|id| id.name() == name)
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Amplitude thresholds for the gated count features, in normalized signal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub zc_threshold: f64,
    pub ssc_threshold: f64,
    pub wamp_threshold: f64,
    pub myop_threshold: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig { zc_threshold: 0.01, ssc_threshold: 0.01, wamp_threshold: 0.01, myop_threshold: 0.016 }
    }
}

impl ThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("zc_threshold", self.zc_threshold),
            ("ssc_threshold", self.ssc_threshold),
            ("wamp_threshold", self.wamp_threshold),
            ("myop_threshold", self.myop_threshold),
        ];
        for (name, v) in all {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be a finite value >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> ThresholdConfig {
        ThresholdConfig {
            zc_threshold: self.zc_threshold * c,
            ssc_threshold: self.ssc_threshold * c,
            wamp_threshold: self.wamp_threshold * c,
            myop_threshold: self.myop_threshold * c,
        }
    }
}

/// The fourteen features of one channel, indexed by [`FeatureKind`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelFeatures(pub [f64; FEATURES_PER_CHANNEL]);

impl ChannelFeatures {
    pub fn get(&self, kind: FeatureKind) -> f64 {
        self.0[kind as usize]
    }
}

pub fn extract_channel_features(x: &[f64], th: &ThresholdConfig) -> Result<ChannelFeatures> {
    let n = x.len();
    if n < 3 {
        return Err(Error::SignalTooShort { len: n, needed: 3 });
    }
    let nf = n as f64;

    let iemg: f64 = x.iter().map(|v| v.abs()).sum();
    let mav = iemg / nf;

    // Weights use 1-based sample positions i = 1..=N.
    let (lo, hi) = (0.25 * nf, 0.75 * nf);
    let mut mmav1 = 0.0;
    let mut mmav2 = 0.0;
    for (k, v) in x.iter().enumerate() {
        let i = (k + 1) as f64;
        let a = v.abs();
        let middle = i >= lo && i <= hi;
        mmav1 += if middle { a } else { 0.5 * a };
        let w2 = if middle {
            1.0
        } else if i < lo {
            4.0 * i / nf
        } else {
            4.0 * (nf - i) / nf
        };
        mmav2 += w2 * a;
    }
    mmav1 /= nf;
    mmav2 /= nf;

    let sum_sq: f64 = x.iter().map(|v| v * v).sum();
    let rms = (sum_sq / nf).sqrt();
    let var = sum_sq / (nf - 1.0);
    let mean = x.iter().sum::<f64>() / nf;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();

    let mut wl = 0.0;
    let mut diff_sq = 0.0;
    let mut zc = 0usize;
    let mut wamp = 0usize;
    for w in x.windows(2) {
        let d = w[1] - w[0];
        wl += d.abs();
        diff_sq += d * d;
        if w[0] * w[1] < 0.0 && d.abs() >= th.zc_threshold {
            zc += 1;
        }
        if d.abs() >= th.wamp_threshold {
            wamp += 1;
        }
    }
    let dasdv = (diff_sq / (nf - 1.0)).sqrt();

    let ssc = x
        .windows(3)
        .filter(|w| {
            let (back, fwd) = (w[1] - w[0], w[1] - w[2]);
            back * fwd > 0.0 && back.abs().max(fwd.abs()) >= th.ssc_threshold
        })
        .count();

    let log = (x.iter().map(|v| (v.abs() + LOG_EPSILON).ln()).sum::<f64>() / nf).exp();
    let myop = x.iter().filter(|v| v.abs() >= th.myop_threshold).count() as f64 / nf;

    Ok(ChannelFeatures([
        iemg,
        mav,
        mmav1,
        mmav2,
        rms,
        var,
        sd,
        wl,
        zc as f64,
        ssc as f64,
        wamp as f64,
        log,
        dasdv,
        myop,
    ]))
}

/// Settings for the segment → feature-vector stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub normalization: NormalizationMode,
    /// `None` extracts features from the normalized signal directly.
    pub dwt: Option<DwtConfig>,
    pub thresholds: ThresholdConfig,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            normalization: NormalizationMode::SubtractMean,
            dwt: Some(DwtConfig::default()),
            thresholds: ThresholdConfig::default(),
        }
    }
}

/// 112 named features for one window plus where it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub participant_id: String,
    pub session_id: String,
    pub window_index: u32,
    /// `None` for unlabeled or ambiguous windows.
    pub label: Option<Quadrant>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn get(&self, id: FeatureId) -> f64 {
        self.values[id.index()]
    }
}

/// normalize → DWT approximation → per-channel features, in canonical order.
pub fn extract_feature_vector(
    segment: &EmgSegment,
    baseline: &BaselineProfile,
    config: &ExtractionConfig,
) -> Result<FeatureVector> {
    let normalized = normalize(segment, baseline, config.normalization)?;
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for ch in normalized.channels() {
        let feats = match &config.dwt {
            Some(dwt) => extract_channel_features(&dwt_haar_approx(ch, dwt)?, &config.thresholds)?,
            None => extract_channel_features(ch, &config.thresholds)?,
        };
        values.extend_from_slice(&feats.0);
    }
    let label = segment.label().and_then(|l| truncate_label(l).ok());
    Ok(FeatureVector {
        participant_id: segment.participant_id().to_owned(),
        session_id: segment.session_id().to_owned(),
        window_index: segment.window_index(),
        label,
        values,
    })
}

/// Extract every window of a session against the session's own first-window baseline.
pub fn extract_session(session: &crate::dataset::SessionLog, config: &ExtractionConfig) -> Result<Vec<FeatureVector>> {
    let baseline = crate::dsp::compute_baseline(&session.segments()[0])?;
    session.segments().iter().map(|s| extract_feature_vector(s, &baseline, config)).collect()
}

/// Extract a whole corpus, sessions in parallel, output in input order.
pub fn extract_corpus(sessions: &[crate::dataset::SessionLog], config: &ExtractionConfig) -> Result<Vec<FeatureVector>> {
    use rayon::prelude::*;
    let per_session: Vec<Vec<FeatureVector>> =
        sessions.par_iter().map(|s| extract_session(s, config)).collect::<Result<_>>()?;
    Ok(per_session.into_iter().flatten().collect())
}

const ID_COLUMNS: [&str; 4] = ["participant_id", "session_id", "window_index", "quadrant"];

/// CSV with `participant_id,session_id,window_index,quadrant` followed by the
/// 112 canonical feature names. Unlabeled rows have an empty quadrant.
pub fn write_feature_csv<W: Write>(out: W, vectors: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> =
        ID_COLUMNS.iter().map(|s| s.to_string()).chain(FeatureId::all().map(|id| id.name())).collect();
    w.write_record(&header)?;
    for v in vectors {
        let mut row = vec![
            v.participant_id.clone(),
            v.session_id.clone(),
            v.window_index.to_string(),
            v.label.map(|q| q.code().to_owned()).unwrap_or_default(),
        ];
        row.extend(v.values.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_feature_csv<R: Read>(input: R) -> Result<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let expected: Vec<String> =
        ID_COLUMNS.iter().map(|s| s.to_string()).chain(FeatureId::all().map(|id| id.name())).collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::schema(Some(1), "feature CSV header does not match the canonical column layout"));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let bad = |m: String| Error::Parse { line, message: m };
        let window_index = rec[2].parse().map_err(|e| bad(format!("window_index: {e}")))?;
        let label = match &rec[3] {
            "" => None,
            code => Some(Quadrant::from_code(code).ok_or_else(|| bad(format!("unknown quadrant {code:?}")))?),
        };
        let values = rec
            .iter()
            .skip(ID_COLUMNS.len())
            .map(|s| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        out.push(FeatureVector {
            participant_id: rec[0].to_owned(),
            session_id: rec[1].to_owned(),
            window_index,
            label,
            values,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AffectLabel, Task};
    use crate::dsp::compute_baseline;

    fn feats(x: &[f64]) -> ChannelFeatures {
        extract_channel_features(x, &ThresholdConfig::default()).unwrap()
    }

    #[test]
    fn simple_examples() {
        assert_eq!(feats(&[1.0, -1.0, 2.0, -2.0]).get(FeatureKind::Mav), 1.5);
        assert_eq!(feats(&[1.0, 2.0, 3.0, 4.0, 5.0]).get(FeatureKind::Ssc), 0.0);
        assert_eq!(feats(&[0.0, 1.0, 0.0]).get(FeatureKind::Wl), 2.0);
        assert!(matches!(
            extract_channel_features(&[1.0, 2.0], &ThresholdConfig::default()),
            Err(Error::SignalTooShort { len: 2, needed: 3 })
        ));
    }

    #[test]
    fn zero_signal_has_finite_log() {
        let f = feats(&[0.0; 16]);
        assert!(f.0.iter().all(|v| v.is_finite()));
        assert!(f.get(FeatureKind::Log) < 1e-11);
    }

    #[test]
    fn feature_ids_are_canonical() {
        let ids: Vec<FeatureId> = FeatureId::all().collect();
        assert_eq!(ids.len(), 112);
        for (i, id) in ids.iter().enumerate() {
            assert_eq!(id.index(), i);
            assert_eq!(FeatureId::from_name(&id.name()), Some(*id));
        }
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(sorted, ids);
        assert_eq!(ids[9].name(), "eye_left_ssc");
        assert_eq!(ids[14].name(), "eye_right_iemg");
    }

    fn segment(window: u32, value: f64) -> EmgSegment {
        let label = AffectLabel::new(0.3, 0.4).ok();
        EmgSegment::new("P", "S", Task::Wm, window, 4, vec![vec![value; 180]; 8], label).unwrap()
    }

    #[test]
    fn zero_segment_has_zero_amplitudes() {
        let zero = segment(0, 0.0);
        let base = compute_baseline(&zero).unwrap();
        let fv = extract_feature_vector(&zero, &base, &ExtractionConfig::default()).unwrap();
        assert_eq!(fv.values.len(), FEATURE_COUNT);
        assert_eq!(fv.label, Some(Quadrant::EnergeticPositive));
        use FeatureKind::*;
        for id in FeatureId::all().filter(|id| [Iemg, Mav, Rms, Wl, Var, Sd, Dasdv].contains(&id.kind)) {
            assert_eq!(fv.get(id), 0.0, "{id}");
        }
        // A constant segment equal to its baseline is indistinguishable from zero.
        let base7 = compute_baseline(&segment(0, 7.0)).unwrap();
        let fv7 = extract_feature_vector(&segment(1, 7.0), &base7, &ExtractionConfig::default()).unwrap();
        assert_eq!(fv7.values, fv.values);
    }

    #[test]
    fn csv_round_trip() {
        let base = compute_baseline(&segment(0, 0.0)).unwrap();
        let s = EmgSegment::new(
            "P",
            "S",
            Task::Em,
            1,
            4,
            (0..8).map(|c| (0..180).map(|i| ((c * 7 + i) as f64 * 0.37).sin()).collect()).collect(),
            None,
        )
        .unwrap();
        let fv = extract_feature_vector(&s, &base, &ExtractionConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_feature_csv(&mut buf, std::slice::from_ref(&fv)).unwrap();
        let back = read_feature_csv(buf.as_slice()).unwrap();
        assert_eq!(back, vec![fv]);
    }
}
