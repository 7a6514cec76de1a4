//! Baseline normalization and the Haar DWT approximation band.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::dataset::{EmgSegment, CHANNEL_COUNT};
use crate::error::{Error, Result};

/// Per-channel resting statistics taken from the first window of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineProfile {
    pub means: [f64; CHANNEL_COUNT],
    /// Population standard deviations.
    pub sds: [f64; CHANNEL_COUNT],
    pub source_window_index: u32,
}

pub fn compute_baseline(first_segment: &EmgSegment) -> Result<BaselineProfile> {
    if first_segment.window_index() != 0 {
        return Err(Error::WrongWindow(first_segment.window_index()));
    }
    let mut means = [0.0; CHANNEL_COUNT];
    let mut sds = [0.0; CHANNEL_COUNT];
    for (c, ch) in first_segment.channels().iter().enumerate() {
        let n = ch.len() as f64;
        let mean = ch.iter().sum::<f64>() / n;
        let var = ch.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        means[c] = mean;
        sds[c] = var.sqrt();
    }
    Ok(BaselineProfile { means, sds, source_window_index: 0 })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// x - mean
    #[default]
    SubtractMean,
    /// (x - mean) / sd
    ZScore,
}

pub fn normalize(segment: &EmgSegment, baseline: &BaselineProfile, mode: NormalizationMode) -> Result<EmgSegment> {
    if mode == NormalizationMode::ZScore {
        if let Some(c) = baseline.sds.iter().position(|&sd| sd == 0.0) {
            return Err(Error::ZeroVariance { channel: c });
        }
    }
    let channels = segment
        .channels()
        .iter()
        .enumerate()
        .map(|(c, ch)| {
            let mean = baseline.means[c];
            match mode {
                NormalizationMode::SubtractMean => ch.iter().map(|x| x - mean).collect(),
                NormalizationMode::ZScore => {
                    let sd = baseline.sds[c];
                    ch.iter().map(|x| (x - mean) / sd).collect()
                }
            }
        })
        .collect();
    Ok(segment.with_channels(channels))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    #[default]
    Haar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DwtConfig {
    pub wavelet: Wavelet,
    pub level: u8,
}

impl DwtConfig {
    pub const MAX_LEVEL: u8 = 8;

    pub fn haar(level: u8) -> Result<Self> {
        let cfg = DwtConfig { wavelet: Wavelet::Haar, level };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=Self::MAX_LEVEL).contains(&self.level) {
            return Err(Error::Config(format!("dwt level {} outside [1, {}]", self.level, Self::MAX_LEVEL)));
        }
        Ok(())
    }
}

impl Default for DwtConfig {
    fn default() -> Self {
        DwtConfig { wavelet: Wavelet::Haar, level: 4 }
    }
}

/// One Haar analysis step: `(approximation, detail)`.
///
/// An odd-length input is extended by repeating its final sample.
pub fn haar_step(signal: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let half = signal.len().div_ceil(2);
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for pair in signal.chunks(2) {
        let (a, b) = match *pair {
            [a, b] => (a, b),
            [a] => (a, a),
            _ => unreachable!(),
        };
        approx.push((a + b) / SQRT_2);
        detail.push((a - b) / SQRT_2);
    }
    (approx, detail)
}

/// Level-`config.level` approximation coefficients.
///
/// Output length is `ceil(len / 2^level)`. Each band must hold at least two
/// samples before it is split.
pub fn dwt_haar_approx(signal: &[f64], config: &DwtConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let level = config.level as u32;
    // The band entering the last step has ceil(n / 2^(level-1)) samples.
    let needed = (1usize << (level - 1)) + 1;
    if signal.len() < needed {
        return Err(Error::SignalTooShort { len: signal.len(), needed });
    }
    let mut band = haar_step(signal).0;
    for _ in 1..level {
        band = haar_step(&band).0;
    }
    Ok(band)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Task;
    use approx::assert_relative_eq;

    fn seg(window: u32, fill: impl Fn(usize, usize) -> f64) -> EmgSegment {
        let channels = (0..8).map(|c| (0..90).map(|i| fill(c, i)).collect()).collect();
        EmgSegment::new("P", "S", Task::Wm, window, 2, channels, None).unwrap()
    }

    #[test]
    fn baseline_examples() {
        let b = compute_baseline(&seg(0, |_, _| 3.0)).unwrap();
        assert_eq!(b.means, [3.0; 8]);
        assert_eq!(b.sds, [0.0; 8]);

        let b = compute_baseline(&seg(0, |_, i| if i % 2 == 0 { 1.0 } else { -1.0 })).unwrap();
        assert_eq!(b.means, [0.0; 8]);
        assert_eq!(b.sds, [1.0; 8]);

        assert!(matches!(compute_baseline(&seg(2, |_, _| 0.0)), Err(Error::WrongWindow(2))));
    }

    #[test]
    fn normalize_examples() {
        let base = compute_baseline(&seg(0, |_, _| 4.0)).unwrap();
        let out = normalize(&seg(1, |_, _| 4.0), &base, NormalizationMode::SubtractMean).unwrap();
        assert!(out.channels().iter().flatten().all(|&x| x == 0.0));

        let zero = BaselineProfile { means: [0.0; 8], sds: [1.0; 8], source_window_index: 0 };
        let s = seg(3, |c, i| (c * 100 + i) as f64 * 0.25);
        assert_eq!(normalize(&s, &zero, NormalizationMode::SubtractMean).unwrap(), s);

        assert!(matches!(
            normalize(&s, &base, NormalizationMode::ZScore),
            Err(Error::ZeroVariance { channel: 0 })
        ));
    }

    #[test]
    fn zscore_scales() {
        let base = BaselineProfile { means: [1.0; 8], sds: [2.0; 8], source_window_index: 0 };
        let out = normalize(&seg(1, |_, _| 5.0), &base, NormalizationMode::ZScore).unwrap();
        assert!(out.channels().iter().flatten().all(|&x| x == 2.0));
        assert_eq!(out.window_index(), 1);
    }

    #[test]
    fn haar_examples() {
        let one = dwt_haar_approx(&[1.0; 4], &DwtConfig::haar(1).unwrap()).unwrap();
        assert_relative_eq!(one[0], SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(one[1], SQRT_2, epsilon = 1e-12);
        let two = dwt_haar_approx(&[1.0; 4], &DwtConfig::haar(2).unwrap()).unwrap();
        assert_eq!(two.len(), 1);
        assert_relative_eq!(two[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn haar_level_three_is_scaled_sum() {
        // Pair sums by hand: (3+1),(2+6),(4+2),(0+0) -> (4+8),(6+0) -> 18, each level / sqrt2.
        let x = [3.0, 1.0, 2.0, 6.0, 4.0, 2.0, 0.0, 0.0];
        let out = dwt_haar_approx(&x, &DwtConfig::haar(3).unwrap()).unwrap();
        assert_eq!(out.len(), 1);
        assert_relative_eq!(out[0], 18.0 / SQRT_2.powi(3), epsilon = 1e-12);
    }

    #[test]
    fn odd_length_repeats_last_sample() {
        let (a, d) = haar_step(&[1.0, 3.0, 5.0]);
        assert_relative_eq!(a[1], 10.0 / SQRT_2, epsilon = 1e-12);
        assert_eq!(d[1], 0.0);
        let out = dwt_haar_approx(&[1.0, 2.0, 3.0], &DwtConfig::haar(2).unwrap()).unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn too_short() {
        let cfg = DwtConfig::haar(2).unwrap();
        assert!(matches!(dwt_haar_approx(&[1.0, 2.0], &cfg), Err(Error::SignalTooShort { .. })));
        assert!(dwt_haar_approx(&[1.0], &DwtConfig::haar(1).unwrap()).is_err());
        assert!(DwtConfig::haar(0).is_err());
        assert!(DwtConfig::haar(9).is_err());
    }
}
