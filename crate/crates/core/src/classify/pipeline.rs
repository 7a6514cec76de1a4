//! Standardization, fitted pipelines and leave-one-subject-out evaluation.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::knn::KnnModel;
use super::lda::LdaModel;
use super::metrics::{EvalReport, EvalTask};
use super::svm::{SvmModel, SvmParams};
use crate::dataset::{EmgSegment, Quadrant, SessionLog};
use crate::dsp::BaselineProfile;
use crate::error::{Error, Result};
use crate::features::{extract_corpus, extract_feature_vector, ExtractionConfig, FeatureVector};
use crate::selection::{mrmr_select, MiConfig};

/// Per-feature z-scoring fit on training rows. Constant features are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    input_dim: usize,
    /// Input indices kept, ascending.
    retained: Vec<usize>,
    dropped: Vec<usize>,
    mean: Vec<f64>,
    sd: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let dim = first.len();
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
        let n = rows.len() as f64;
        let mut s = Standardizer { input_dim: dim, retained: vec![], dropped: vec![], mean: vec![], sd: vec![] };
        for f in 0..dim {
            let constant = rows.iter().all(|r| r[f] == first[f]);
            let mean = rows.iter().map(|r| r[f]).sum::<f64>() / n;
            let sd = (rows.iter().map(|r| (r[f] - mean).powi(2)).sum::<f64>() / n).sqrt();
            if constant || !(sd > 0.0) {
                s.dropped.push(f);
            } else {
                s.retained.push(f);
                s.mean.push(mean);
                s.sd.push(sd);
            }
        }
        Ok(s)
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, got: x.len() });
        }
        Ok(self
            .retained
            .iter()
            .zip(self.mean.iter().zip(&self.sd))
            .map(|(&f, (m, s))| (x[f] - m) / s)
            .collect())
    }
}

pub fn fit_standardizer(train: &[Vec<f64>]) -> Result<Standardizer> {
    Standardizer::fit(train)
}

/// Which classifier to fit, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Knn { k: usize },
    Lda,
    Svm { gamma: Option<f64>, c: f64 },
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Knn { k: 4 }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::Knn { k } => write!(f, "kNN (k={k})"),
            ClassifierSpec::Lda => f.write_str("LDA"),
            ClassifierSpec::Svm { gamma: Some(g), c } => write!(f, "SVM (gamma={g}, C={c})"),
            ClassifierSpec::Svm { gamma: None, c } => write!(f, "SVM (gamma=1/dim, C={c})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classifier {
    Knn(KnnModel),
    Lda(LdaModel),
    Svm(SvmModel),
}

impl ClassifierSpec {
    pub fn fit(&self, x: &[Vec<f64>], y: &[Quadrant]) -> Result<Classifier> {
        Ok(match *self {
            ClassifierSpec::Knn { k } => Classifier::Knn(KnnModel::fit(x, y, k)?),
            ClassifierSpec::Lda => Classifier::Lda(LdaModel::fit(x, y)?),
            ClassifierSpec::Svm { gamma, c } => {
                Classifier::Svm(SvmModel::fit(x, y, &SvmParams { gamma, c, ..SvmParams::default() })?)
            }
        })
    }
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> Result<Quadrant> {
        match self {
            Classifier::Knn(m) => m.predict(x),
            Classifier::Lda(m) => m.predict(x),
            Classifier::Svm(m) => m.predict(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub k: usize,
    pub mi: MiConfig,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { k: 30, mi: MiConfig::default() }
    }
}

/// Everything after feature extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// `None` keeps every non-constant feature.
    pub selection: Option<SelectionConfig>,
    pub classifier: ClassifierSpec,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { selection: Some(SelectionConfig::default()), classifier: ClassifierSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub extraction: ExtractionConfig,
    pub model: ModelConfig,
}

/// standardize → select → classify, fit on labeled feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub extraction: ExtractionConfig,
    standardizer: Standardizer,
    /// Positions within the standardized vector, in mRMR rank order.
    selected_positions: Vec<usize>,
    classifier: Classifier,
}

impl TrainedPipeline {
    pub fn fit(train: &[&FeatureVector], extraction: ExtractionConfig, cfg: &ModelConfig) -> Result<Self> {
        let (rows, labels) = labeled_rows(train)?;
        let standardizer = Standardizer::fit(&rows)?;
        let z: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r)).collect::<Result<_>>()?;
        let dim = standardizer.retained().len();
        if dim == 0 {
            return Err(Error::Config("every feature is constant on the training set".into()));
        }
        let selected_positions = match cfg.selection {
            Some(sel) => {
                let k = sel.k.min(dim);
                if k < sel.k {
                    log::warn!("only {dim} non-constant features; selecting {k} instead of {}", sel.k);
                }
                let columns: Vec<Vec<f64>> = (0..dim).map(|f| z.iter().map(|r| r[f]).collect()).collect();
                let codes: Vec<usize> = labels.iter().map(|q| q.index()).collect();
                mrmr_select(&columns, &codes, k, &sel.mi)?.ranked
            }
            None => (0..dim).collect(),
        };
        let x: Vec<Vec<f64>> = z.iter().map(|r| selected_positions.iter().map(|&p| r[p]).collect()).collect();
        let classifier = cfg.classifier.fit(&x, &labels)?;
        Ok(TrainedPipeline { extraction, standardizer, selected_positions, classifier })
    }

    /// Canonical feature indices used by the classifier, in selection order.
    pub fn selected_features(&self) -> Vec<usize> {
        self.selected_positions.iter().map(|&p| self.standardizer.retained()[p]).collect()
    }

    pub fn classifier(&self) -> &Classifier {
        &self.classifier
    }

    pub fn predict_values(&self, values: &[f64]) -> Result<Quadrant> {
        let z = self.standardizer.apply(values)?;
        let x: Vec<f64> = self.selected_positions.iter().map(|&p| z[p]).collect();
        self.classifier.predict(&x)
    }

    pub fn predict_segment(&self, segment: &EmgSegment, baseline: &BaselineProfile) -> Result<Quadrant> {
        let fv = extract_feature_vector(segment, baseline, &self.extraction)?;
        self.predict_values(&fv.values)
    }
}

fn labeled_rows(train: &[&FeatureVector]) -> Result<(Vec<Vec<f64>>, Vec<Quadrant>)> {
    let (rows, labels): (Vec<_>, Vec<_>) =
        train.iter().filter_map(|v| v.label.map(|q| (v.values.clone(), q))).unzip();
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((rows, labels))
}

/// Anything fit on training vectors that can label a held-out vector.
pub trait QuadrantPredictor {
    fn predict(&self, v: &FeatureVector) -> Result<Quadrant>;
    /// Canonical feature indices the predictor relies on, if it selects any.
    fn selected_features(&self) -> Vec<usize> {
        Vec::new()
    }
}

impl QuadrantPredictor for TrainedPipeline {
    fn predict(&self, v: &FeatureVector) -> Result<Quadrant> {
        self.predict_values(&v.values)
    }

    fn selected_features(&self) -> Vec<usize> {
        TrainedPipeline::selected_features(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldDetail {
    pub participant_id: String,
    pub train_size: usize,
    pub selected_features: Vec<usize>,
    /// (truth, prediction) per held-out window.
    pub predictions: Vec<(Quadrant, Quadrant)>,
}

/// Result of one classifier under LOSO, scored on every task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosoOutcome {
    pub classifier: String,
    pub folds: Vec<FoldDetail>,
    /// Held-out participants whose training split lacked a class.
    pub skipped: Vec<String>,
    pub valence: EvalReport,
    pub arousal: EvalReport,
    pub quadrant: EvalReport,
}

impl LosoOutcome {
    pub fn report(&self, task: EvalTask) -> &EvalReport {
        match task {
            EvalTask::Valence2 => &self.valence,
            EvalTask::Arousal2 => &self.arousal,
            EvalTask::Quadrant4 => &self.quadrant,
        }
    }
}

/// Leave-one-subject-out with a caller-supplied fitting routine.
///
/// Only labeled vectors take part. `fit` sees nothing from the held-out
/// participant. Folds run in parallel; results keep participant order.
pub fn loso_with<P, F>(vectors: &[FeatureVector], name: &str, fit: F) -> Result<LosoOutcome>
where
    P: QuadrantPredictor,
    F: Fn(&[&FeatureVector]) -> Result<P> + Sync,
{
    let labeled: Vec<&FeatureVector> = vectors.iter().filter(|v| v.label.is_some()).collect();
    let participants: BTreeSet<&str> = labeled.iter().map(|v| v.participant_id.as_str()).collect();
    if participants.len() < 2 {
        return Err(Error::TooFewParticipants(participants.len()));
    }
    let all_classes: BTreeSet<Quadrant> = labeled.iter().filter_map(|v| v.label).collect();

    let results: Vec<Option<FoldDetail>> = participants
        .par_iter()
        .map(|&pid| {
            let (test, train): (Vec<&FeatureVector>, Vec<&FeatureVector>) =
                labeled.iter().partition(|v| v.participant_id == pid);
            let train_classes: BTreeSet<Quadrant> = train.iter().filter_map(|v| v.label).collect();
            if train_classes != all_classes {
                log::warn!("skipping fold {pid}: training split lacks some classes");
                return Ok(None);
            }
            let model = fit(&train)?;
            let predictions = test
                .iter()
                .map(|v| Ok((v.label.expect("labeled"), model.predict(v)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Some(FoldDetail {
                participant_id: pid.to_owned(),
                train_size: train.len(),
                selected_features: model.selected_features(),
                predictions,
            }))
        })
        .collect::<Result<_>>()?;

    let mut folds = Vec::new();
    let mut skipped = Vec::new();
    for (pid, r) in participants.iter().zip(results) {
        match r {
            Some(f) => folds.push(f),
            None => skipped.push(pid.to_string()),
        }
    }
    let pairs: Vec<(String, Vec<(Quadrant, Quadrant)>)> =
        folds.iter().map(|f| (f.participant_id.clone(), f.predictions.clone())).collect();
    Ok(LosoOutcome {
        classifier: name.to_owned(),
        valence: EvalReport::from_folds(EvalTask::Valence2, name, &pairs),
        arousal: EvalReport::from_folds(EvalTask::Arousal2, name, &pairs),
        quadrant: EvalReport::from_folds(EvalTask::Quadrant4, name, &pairs),
        folds,
        skipped,
    })
}

/// LOSO over already-extracted feature vectors.
pub fn loso_evaluate_features(
    vectors: &[FeatureVector],
    extraction: ExtractionConfig,
    model: &ModelConfig,
) -> Result<LosoOutcome> {
    loso_with(vectors, &model.classifier.to_string(), |train| TrainedPipeline::fit(train, extraction, model))
}

/// Extract features (per-session baselines) and run LOSO.
pub fn loso_evaluate(sessions: &[SessionLog], cfg: &PipelineConfig) -> Result<LosoOutcome> {
    let vectors = extract_corpus(sessions, &cfg.extraction)?;
    loso_evaluate_features(&vectors, cfg.extraction, &cfg.model)
}

/// Plain-text accuracy table: one row per classifier, columns valence, arousal, 4-class.
pub fn render_accuracy_table(outcomes: &[LosoOutcome]) -> String {
    let width = outcomes.iter().map(|o| o.classifier.len()).max().unwrap_or(10).max(10);
    let mut s = format!("{:<width$}  {:>8}  {:>8}  {:>8}\n", "classifier", "valence", "arousal", "4-class");
    s.push_str(&format!("{}\n", "-".repeat(width + 30)));
    for o in outcomes {
        s.push_str(&format!(
            "{:<width$}  {:>7.1}%  {:>7.1}%  {:>7.1}%\n",
            o.classifier,
            o.valence.accuracy * 100.0,
            o.arousal.accuracy * 100.0,
            o.quadrant.accuracy * 100.0
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizer_examples() {
        let s = Standardizer::fit(&[vec![2.0, 7.0], vec![4.0, 7.0]]).unwrap();
        assert_eq!(s.dropped(), &[1]);
        assert_eq!(s.apply(&[2.0, 7.0]).unwrap(), vec![-1.0]);
        assert_eq!(s.apply(&[4.0, 0.0]).unwrap(), vec![1.0]);
        assert!(matches!(Standardizer::fit(&[]), Err(Error::EmptyDataset)));
    }

    fn fv(pid: &str, label: Quadrant, values: Vec<f64>) -> FeatureVector {
        FeatureVector { participant_id: pid.into(), session_id: "s".into(), window_index: 0, label: Some(label), values }
    }

    struct Always(Quadrant);
    impl QuadrantPredictor for Always {
        fn predict(&self, _: &FeatureVector) -> Result<Quadrant> {
            Ok(self.0)
        }
    }

    #[test]
    fn constant_predictor_fold() {
        let data = vec![
            fv("A", Quadrant::EnergeticPositive, vec![0.0]),
            fv("A", Quadrant::EnergeticPositive, vec![1.0]),
            fv("B", Quadrant::EnergeticPositive, vec![2.0]),
        ];
        let out = loso_with(&data, "always", |_| Ok(Always(Quadrant::EnergeticPositive))).unwrap();
        assert_eq!(out.folds.len(), 2);
        assert!(out.quadrant.folds.iter().all(|f| f.accuracy == 1.0));
    }

    #[test]
    fn one_participant_is_too_few() {
        let data = vec![fv("A", Quadrant::CalmNegative, vec![0.0]), fv("A", Quadrant::CalmPositive, vec![1.0])];
        assert!(matches!(
            loso_with(&data, "x", |_| Ok(Always(Quadrant::CalmNegative))),
            Err(Error::TooFewParticipants(1))
        ));
    }

    #[test]
    fn fold_missing_a_class_is_skipped() {
        let data = vec![
            fv("A", Quadrant::CalmNegative, vec![0.0]),
            fv("B", Quadrant::CalmPositive, vec![1.0]),
            fv("C", Quadrant::CalmPositive, vec![1.0]),
        ];
        let out = loso_with(&data, "x", |_| Ok(Always(Quadrant::CalmPositive))).unwrap();
        assert_eq!(out.skipped, vec!["A".to_string()]);
        assert_eq!(out.folds.len(), 2);
    }
}
