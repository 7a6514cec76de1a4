//! The declarative run configuration shared by every subcommand.

use std::path::{Path, PathBuf};

use affect_dda::classify::{ClassifierSpec, ModelConfig, SelectionConfig};
use affect_dda::dataset::{Quadrant, Task, CHANNEL_COUNT};
use affect_dda::dsp::{DwtConfig, NormalizationMode};
use affect_dda::features::{ExtractionConfig, ThresholdConfig, FEATURE_COUNT};
use affect_dda::gamesim::{CorpusConfig, PlayerModel, SynthEmgConfig};
use affect_dda::selection::MiConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Every knob of every subcommand. Missing keys take their defaults; unknown
/// keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root of all randomness.
    pub seed: u64,
    /// Worker threads for parallel stages; 0 picks one per core.
    pub workers: usize,
    pub corpus: CorpusSection,
    pub emg: EmgSection,
    pub extraction: ExtractionSection,
    pub selection: SelectionSection,
    pub classifier: ClassifierSection,
    pub evaluate: EvaluateSection,
    pub simulate: SimulateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            workers: 0,
            corpus: CorpusSection::default(),
            emg: EmgSection::default(),
            extraction: ExtractionSection::default(),
            selection: SelectionSection::default(),
            classifier: ClassifierSection::default(),
            evaluate: EvaluateSection::default(),
            simulate: SimulateSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub participants: usize,
    pub sessions_per_participant: usize,
    pub windows_per_session: usize,
    pub sample_rate_hz: u32,
    pub levels: Vec<u8>,
    pub offset_sd: f64,
    pub scale_sd: f64,
    pub error_steepness: f64,
}

impl Default for CorpusSection {
    fn default() -> Self {
        let c = CorpusConfig::default();
        CorpusSection {
            participants: c.participants,
            sessions_per_participant: c.sessions_per_participant,
            windows_per_session: c.windows_per_session,
            sample_rate_hz: c.sample_rate_hz,
            levels: c.levels,
            offset_sd: c.offset_sd,
            scale_sd: c.scale_sd,
            error_steepness: c.error_steepness,
        }
    }
}

/// Channel gains per quadrant, in channel order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainTable {
    #[serde(rename = "EP")]
    pub ep: [f64; CHANNEL_COUNT],
    #[serde(rename = "CP")]
    pub cp: [f64; CHANNEL_COUNT],
    #[serde(rename = "EN")]
    pub en: [f64; CHANNEL_COUNT],
    #[serde(rename = "CN")]
    pub cn: [f64; CHANNEL_COUNT],
}

impl GainTable {
    fn from_array(g: &[[f64; CHANNEL_COUNT]; 4]) -> Self {
        let at = |q: Quadrant| g[q.index()];
        GainTable {
            ep: at(Quadrant::EnergeticPositive),
            cp: at(Quadrant::CalmPositive),
            en: at(Quadrant::EnergeticNegative),
            cn: at(Quadrant::CalmNegative),
        }
    }

    fn to_array(&self) -> [[f64; CHANNEL_COUNT]; 4] {
        let mut g = [[0.0; CHANNEL_COUNT]; 4];
        g[Quadrant::EnergeticPositive.index()] = self.ep;
        g[Quadrant::CalmPositive.index()] = self.cp;
        g[Quadrant::EnergeticNegative.index()] = self.en;
        g[Quadrant::CalmNegative.index()] = self.cn;
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmgSection {
    pub noise_sd: f64,
    pub smoothness: f64,
    pub burst_rate_calm: f64,
    pub burst_rate_energetic: f64,
    pub burst_seconds: f64,
    pub burst_gain: f64,
    pub quantum: f64,
    pub gains: GainTable,
}

impl Default for EmgSection {
    fn default() -> Self {
        let s = SynthEmgConfig::default();
        EmgSection {
            noise_sd: s.noise_sd,
            smoothness: s.smoothness,
            burst_rate_calm: s.burst_rate_calm,
            burst_rate_energetic: s.burst_rate_energetic,
            burst_seconds: s.burst_seconds,
            burst_gain: s.burst_gain,
            quantum: s.quantum,
            gains: GainTable::from_array(&s.gains),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionSection {
    pub normalization: NormalizationMode,
    pub dwt: bool,
    pub dwt_level: u8,
    pub zc_threshold: f64,
    pub ssc_threshold: f64,
    pub wamp_threshold: f64,
    pub myop_threshold: f64,
}

impl Default for ExtractionSection {
    fn default() -> Self {
        let t = ThresholdConfig::default();
        ExtractionSection {
            normalization: NormalizationMode::default(),
            dwt: true,
            dwt_level: DwtConfig::default().level,
            zc_threshold: t.zc_threshold,
            ssc_threshold: t.ssc_threshold,
            wamp_threshold: t.wamp_threshold,
            myop_threshold: t.myop_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectionSection {
    /// When false every non-constant feature reaches the classifier.
    pub enabled: bool,
    pub k: usize,
    pub bins: usize,
}

impl Default for SelectionSection {
    fn default() -> Self {
        SelectionSection { enabled: true, k: SelectionConfig::default().k, bins: MiConfig::default().bins }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Knn,
    Lda,
    Svm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub kind: ClassifierKind,
    pub knn_k: usize,
    /// Absent means 1 / feature count.
    pub svm_gamma: Option<f64>,
    pub svm_c: f64,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        ClassifierSection { kind: ClassifierKind::Knn, knn_k: 4, svm_gamma: None, svm_c: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub classifiers: Vec<ClassifierKind>,
    /// kNN runs once per value, for sweeping k.
    pub knn_k: Vec<usize>,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        EvaluateSection { classifiers: vec![ClassifierKind::Knn, ClassifierKind::Lda, ClassifierKind::Svm], knn_k: vec![4] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AffectSourceKind {
    GroundTruth,
    Classifier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub skills: Vec<f64>,
    pub windows: usize,
    pub task: Task,
    pub start_difficulty: u8,
    pub affect_source: AffectSourceKind,
    /// Trained model file, required when `affect_source = "classifier"`.
    pub model: Option<PathBuf>,
    pub sample_rate_hz: u32,
    pub error_steepness: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            skills: vec![2.0, 5.0, 9.0],
            windows: 10,
            task: Task::Wm,
            start_difficulty: 1,
            affect_source: AffectSourceKind::GroundTruth,
            model: None,
            sample_rate_hz: CorpusConfig::default().sample_rate_hz,
            error_steepness: PlayerModel::DEFAULT_ERROR_STEEPNESS,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string().trim_end().to_owned()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| config_err(format!("{}: {}", path.display(), e.to_string().trim_end())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Check every section; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.corpus_config().validate().map_err(|e| config_err(format!("corpus/emg: {e}")))?;
        self.extraction_config()?;
        let s = &self.selection;
        if s.k == 0 || s.k > FEATURE_COUNT {
            return Err(config_err(format!("selection.k = {} must be in [1, {FEATURE_COUNT}]", s.k)));
        }
        if s.bins < 2 {
            return Err(config_err(format!("selection.bins = {} must be >= 2", s.bins)));
        }
        let c = &self.classifier;
        if c.knn_k == 0 {
            return Err(config_err("classifier.knn_k must be >= 1"));
        }
        if let Some(g) = c.svm_gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(config_err(format!("classifier.svm_gamma = {g} must be positive")));
            }
        }
        if !(c.svm_c > 0.0 && c.svm_c.is_finite()) {
            return Err(config_err(format!("classifier.svm_c = {} must be positive", c.svm_c)));
        }
        if self.evaluate.classifiers.is_empty() {
            return Err(config_err("evaluate.classifiers must name at least one classifier"));
        }
        if self.evaluate.knn_k.is_empty() || self.evaluate.knn_k.contains(&0) {
            return Err(config_err("evaluate.knn_k must be a non-empty list of positive integers"));
        }
        let m = &self.simulate;
        if m.skills.is_empty() || m.skills.iter().any(|s| !(1.0..=10.0).contains(s)) {
            return Err(config_err("simulate.skills must be a non-empty list of values in [1, 10]"));
        }
        if m.windows == 0 {
            return Err(config_err("simulate.windows must be >= 1"));
        }
        if !(1..=10).contains(&m.start_difficulty) {
            return Err(config_err(format!("simulate.start_difficulty = {} must be in [1, 10]", m.start_difficulty)));
        }
        if m.sample_rate_hz == 0 {
            return Err(config_err("simulate.sample_rate_hz must be positive"));
        }
        if !(m.error_steepness > 0.0 && m.error_steepness.is_finite()) {
            return Err(config_err("simulate.error_steepness must be positive"));
        }
        if m.affect_source == AffectSourceKind::Classifier && m.model.is_none() {
            return Err(config_err("simulate.affect_source = \"classifier\" needs simulate.model (a trained model file)"));
        }
        Ok(())
    }

    pub fn synth_config(&self, seed: u64) -> SynthEmgConfig {
        let e = &self.emg;
        SynthEmgConfig {
            gains: e.gains.to_array(),
            noise_sd: e.noise_sd,
            smoothness: e.smoothness,
            burst_rate_calm: e.burst_rate_calm,
            burst_rate_energetic: e.burst_rate_energetic,
            burst_seconds: e.burst_seconds,
            burst_gain: e.burst_gain,
            quantum: e.quantum,
            seed,
        }
    }

    pub fn corpus_config(&self) -> CorpusConfig {
        let c = &self.corpus;
        CorpusConfig {
            participants: c.participants,
            sessions_per_participant: c.sessions_per_participant,
            windows_per_session: c.windows_per_session,
            sample_rate_hz: c.sample_rate_hz,
            levels: c.levels.clone(),
            offset_sd: c.offset_sd,
            scale_sd: c.scale_sd,
            error_steepness: c.error_steepness,
            seed: self.seed,
            synth: self.synth_config(self.seed),
        }
    }

    pub fn extraction_config(&self) -> Result<ExtractionConfig> {
        let e = &self.extraction;
        let dwt = if e.dwt {
            Some(DwtConfig::haar(e.dwt_level).map_err(|_| {
                config_err(format!("extraction.dwt_level = {} must be in [1, {}]", e.dwt_level, DwtConfig::MAX_LEVEL))
            })?)
        } else {
            None
        };
        let thresholds = ThresholdConfig {
            zc_threshold: e.zc_threshold,
            ssc_threshold: e.ssc_threshold,
            wamp_threshold: e.wamp_threshold,
            myop_threshold: e.myop_threshold,
        };
        thresholds.validate().map_err(|err| config_err(format!("extraction: {err}")))?;
        Ok(ExtractionConfig { normalization: e.normalization, dwt, thresholds })
    }

    pub fn selection_config(&self) -> Option<SelectionConfig> {
        let s = &self.selection;
        s.enabled.then(|| SelectionConfig { k: s.k, mi: MiConfig { bins: s.bins, ..MiConfig::default() } })
    }

    pub fn classifier_spec(&self, kind: ClassifierKind, knn_k: usize) -> ClassifierSpec {
        match kind {
            ClassifierKind::Knn => ClassifierSpec::Knn { k: knn_k },
            ClassifierKind::Lda => ClassifierSpec::Lda,
            ClassifierKind::Svm => ClassifierSpec::Svm { gamma: self.classifier.svm_gamma, c: self.classifier.svm_c },
        }
    }

    /// The model `train` fits.
    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            selection: self.selection_config(),
            classifier: self.classifier_spec(self.classifier.kind, self.classifier.knn_k),
        }
    }

    /// The models `evaluate` compares, kNN once per swept k.
    pub fn evaluate_models(&self) -> Vec<ModelConfig> {
        let mut out = Vec::new();
        for &kind in &self.evaluate.classifiers {
            let ks: &[usize] = if kind == ClassifierKind::Knn { &self.evaluate.knn_k } else { &[0] };
            for &k in ks {
                out.push(ModelConfig { selection: self.selection_config(), classifier: self.classifier_spec(kind, k) });
            }
        }
        out
    }
}
