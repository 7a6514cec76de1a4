use serde::{Deserialize, Serialize};

use crate::dataset::Quadrant;
use crate::error::{Error, Result};

/// What a report scores: one affect axis or the full quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EvalTask {
    Valence2,
    Arousal2,
    Quadrant4,
}

impl EvalTask {
    pub const ALL: [EvalTask; 3] = [EvalTask::Valence2, EvalTask::Arousal2, EvalTask::Quadrant4];

    pub fn class_names(self) -> &'static [&'static str] {
        match self {
            EvalTask::Valence2 => &["positive", "negative"],
            EvalTask::Arousal2 => &["high", "low"],
            EvalTask::Quadrant4 => &["EP", "CP", "EN", "CN"],
        }
    }

    pub fn class_of(self, q: Quadrant) -> usize {
        match self {
            EvalTask::Valence2 => usize::from(!q.is_positive_valence()),
            EvalTask::Arousal2 => usize::from(!q.is_high_arousal()),
            EvalTask::Quadrant4 => q.index(),
        }
    }
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix { counts: vec![vec![0; classes]; classes] }
    }

    pub fn from_pairs(task: EvalTask, pairs: &[(Quadrant, Quadrant)]) -> Self {
        let mut m = ConfusionMatrix::new(task.class_names().len());
        for &(truth, pred) in pairs {
            m.counts[task.class_of(truth)][task.class_of(pred)] += 1;
        }
        m
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.trace() as f64 / t as f64,
        }
    }

    /// Mean F1 over classes that occur in the truth or the predictions.
    pub fn macro_f1(&self) -> f64 {
        let k = self.counts.len();
        let mut f1s = Vec::new();
        for c in 0..k {
            let tp = self.counts[c][c] as f64;
            let actual: usize = self.counts[c].iter().sum();
            let predicted: usize = (0..k).map(|r| self.counts[r][c]).sum();
            if actual + predicted == 0 {
                continue;
            }
            f1s.push(2.0 * tp / (actual + predicted) as f64);
        }
        if f1s.is_empty() {
            0.0
        } else {
            f1s.iter().sum::<f64>() / f1s.len() as f64
        }
    }

    /// Fold a 4-class quadrant matrix onto one affect axis.
    pub fn collapse(&self, task: EvalTask) -> ConfusionMatrix {
        assert_eq!(self.counts.len(), 4, "collapse expects a quadrant matrix");
        let mut out = ConfusionMatrix::new(task.class_names().len());
        for t in Quadrant::ALL {
            for p in Quadrant::ALL {
                out.counts[task.class_of(t)][task.class_of(p)] += self.counts[t.index()][p.index()];
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldScore {
    pub participant_id: String,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Accuracy, confusion and macro-F1 of one classifier on one task under LOSO.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub task: EvalTask,
    pub classifier: String,
    pub classes: Vec<String>,
    pub folds: Vec<FoldScore>,
    /// Sample-weighted over folds.
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub macro_f1: f64,
}

impl EvalReport {
    /// `folds` pairs each held-out participant with its (truth, prediction) list.
    pub fn from_folds(task: EvalTask, classifier: &str, folds: &[(String, Vec<(Quadrant, Quadrant)>)]) -> Self {
        let mut confusion = ConfusionMatrix::new(task.class_names().len());
        let mut scores = Vec::with_capacity(folds.len());
        for (pid, pairs) in folds {
            let m = ConfusionMatrix::from_pairs(task, pairs);
            for (row, add) in confusion.counts.iter_mut().zip(&m.counts) {
                row.iter_mut().zip(add).for_each(|(a, b)| *a += b);
            }
            scores.push(FoldScore {
                participant_id: pid.clone(),
                n: m.total(),
                correct: m.trace(),
                accuracy: m.accuracy(),
            });
        }
        EvalReport {
            task,
            classifier: classifier.to_owned(),
            classes: task.class_names().iter().map(|s| s.to_string()).collect(),
            folds: scores,
            accuracy: confusion.accuracy(),
            macro_f1: confusion.macro_f1(),
            confusion,
        }
    }
}

/// Ranks starting at 1, ties sharing the mean of the ranks they span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::SignalTooShort { len: a.len(), needed: 2 });
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 {
        return Err(Error::ZeroVariance { channel: 0 });
    }
    if vb == 0.0 {
        return Err(Error::ZeroVariance { channel: 1 });
    }
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}
