//! Histogram mutual information and mRMR forward selection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinStrategy {
    #[default]
    EqualWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiConfig {
    pub bins: usize,
    pub strategy: BinStrategy,
}

impl Default for MiConfig {
    fn default() -> Self {
        MiConfig { bins: 10, strategy: BinStrategy::EqualWidth }
    }
}

impl MiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::Config(format!("bins must be >= 2, got {}", self.bins)));
        }
        Ok(())
    }
}

/// Equal-width bin index over `[min, max]`. A constant input lands entirely in bin 0.
pub fn discretize(x: &[f64], cfg: &MiConfig) -> Vec<usize> {
    let (min, max) = x.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let width = max - min;
    if !(width > 0.0) {
        return vec![0; x.len()];
    }
    let top = cfg.bins - 1;
    x.iter()
        .map(|&v| (((v - min) / width * cfg.bins as f64) as usize).min(top))
        .collect()
}

/// MI in bits between two discrete sequences given their alphabet sizes.
pub fn discrete_mutual_information(a: &[usize], a_levels: usize, b: &[usize], b_levels: usize) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut joint = vec![0usize; a_levels * b_levels];
    let mut pa = vec![0usize; a_levels];
    let mut pb = vec![0usize; b_levels];
    for (&i, &j) in a.iter().zip(b) {
        joint[i * b_levels + j] += 1;
        pa[i] += 1;
        pb[j] += 1;
    }
    let nf = n as f64;
    let mut mi = 0.0;
    for i in 0..a_levels {
        for j in 0..b_levels {
            let c = joint[i * b_levels + j];
            if c == 0 {
                continue;
            }
            // p(a,b) / (p(a) p(b)) = c n / (na nb)
            let ratio = (c as f64 * nf) / (pa[i] as f64 * pb[j] as f64);
            mi += c as f64 / nf * ratio.log2();
        }
    }
    mi.max(0.0)
}

/// MI between a continuous feature (binned) and discrete class labels.
pub fn mutual_information(x: &[f64], y: &[usize], cfg: &MiConfig) -> Result<f64> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::SignalTooShort { len: x.len(), needed: 2 });
    }
    let bx = discretize(x, cfg);
    let levels = y.iter().max().map_or(1, |m| m + 1);
    Ok(discrete_mutual_information(&bx, cfg.bins, y, levels))
}

/// Selected feature indices in pick order with the objective value at each pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub ranked: Vec<usize>,
    pub scores: Vec<f64>,
}

impl SelectionResult {
    /// Interpret the indices as canonical 112-feature ids.
    pub fn feature_ids(&self) -> Vec<FeatureId> {
        self.ranked.iter().map(|&i| FeatureId::from_index(i).expect("index < 112")).collect()
    }

    /// `rank,feature,score` with 1-based ranks.
    pub fn write_csv<W: Write>(&self, out: W, name: impl Fn(usize) -> String) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["rank", "feature", "score"])?;
        for (r, (&idx, score)) in self.ranked.iter().zip(&self.scores).enumerate() {
            w.write_record([(r + 1).to_string(), name(idx), score.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Greedy mRMR with the difference (MID) criterion.
///
/// `columns[f]` holds feature `f` across samples; `labels` are class codes.
/// The first pick maximizes relevance `I(f; class)`. Each later pick maximizes
/// `I(f; class) - mean_{s in S} I(f; s)`. Ties go to the lower feature index.
pub fn mrmr_select(columns: &[Vec<f64>], labels: &[usize], k: usize, cfg: &MiConfig) -> Result<SelectionResult> {
    cfg.validate()?;
    let n = labels.len();
    if n == 0 || columns.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch { left: c.len(), right: n });
    }
    if k == 0 || k > columns.len() {
        return Err(Error::Config(format!("k = {k} must be in [1, {}]", columns.len())));
    }
    let class_levels = labels.iter().max().map_or(1, |m| m + 1);
    let distinct = {
        let mut seen = vec![false; class_levels];
        labels.iter().for_each(|&l| seen[l] = true);
        seen.iter().filter(|&&s| s).count()
    };
    if distinct < 2 {
        return Err(Error::InsufficientClasses { needed: 2, found: distinct });
    }

    let binned: Vec<Vec<usize>> = columns.iter().map(|c| discretize(c, cfg)).collect();
    let relevance: Vec<f64> =
        binned.iter().map(|b| discrete_mutual_information(b, cfg.bins, labels, class_levels)).collect();

    let d = columns.len();
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    let mut scores = Vec::with_capacity(k);
    let mut chosen = vec![false; d];
    // Running sum of I(f; s) over selected s, accumulated in pick order.
    let mut redundancy = vec![0.0; d];

    for step in 0..k {
        if let Some(&last) = selected.last() {
            for f in (0..d).filter(|&f| !chosen[f]) {
                redundancy[f] += discrete_mutual_information(&binned[f], cfg.bins, &binned[last], cfg.bins);
            }
        }
        let mut best: Option<(usize, f64)> = None;
        for f in (0..d).filter(|&f| !chosen[f]) {
            let score = if step == 0 { relevance[f] } else { relevance[f] - redundancy[f] / step as f64 };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((f, score));
            }
        }
        let (f, score) = best.expect("k <= d leaves a candidate");
        chosen[f] = true;
        selected.push(f);
        scores.push(score);
    }
    Ok(SelectionResult { ranked: selected, scores })
}
