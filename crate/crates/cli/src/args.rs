//! Command-line arguments. Flags override the config file, which overrides
//! the built-in defaults.

use std::path::PathBuf;

use affect_dda::dataset::Task;
use affect_dda::dsp::NormalizationMode;
use clap::{Args, Parser, Subcommand};

use crate::config::{AffectSourceKind, ClassifierKind, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "affect-dda", version, about = "Facial-EMG affect recognition and affect-driven difficulty adjustment", propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic corpus, one session file per participant.
    Synth(SynthArgs),
    /// Extract the 112-feature matrix from session files.
    Extract(ExtractArgs),
    /// Rank features with mRMR.
    Select(SelectArgs),
    /// Fit a pipeline on every labeled window and save it.
    Train(TrainArgs),
    /// Leave-one-subject-out evaluation of one or more classifiers.
    Evaluate(EvaluateArgs),
    /// Closed-loop adaptive vs non-adaptive sessions with synthetic players.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Root random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR", required_unless_present = "dump_config")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExtractionArgs {
    /// Extract features from the normalized signal without the DWT.
    #[arg(long)]
    pub no_dwt: bool,
    #[arg(long)]
    pub dwt_level: Option<u8>,
    /// subtract-mean or z-score.
    #[arg(long, value_parser = parse_normalization)]
    pub normalization: Option<NormalizationMode>,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct SourceArgs {
    /// Session file or directory of session files.
    #[arg(long, value_name = "PATH")]
    pub corpus: Option<PathBuf>,
    /// Feature CSV written by `extract`.
    #[arg(long, value_name = "FILE")]
    pub features: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    /// Number of features mRMR keeps.
    #[arg(short = 'k', long = "top-k")]
    pub top_k: Option<usize>,
    /// Histogram bins for mutual information.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Feed every non-constant feature to the classifier.
    #[arg(long)]
    pub no_selection: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub participants: Option<usize>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub sample_rate: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub extraction: ExtractionArgs,
    /// Session file or directory of session files.
    #[arg(long, value_name = "PATH", required_unless_present = "dump_config")]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub extraction: ExtractionArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub extraction: ExtractionArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, value_enum)]
    pub classifier: Option<ClassifierKind>,
    #[arg(long)]
    pub knn_k: Option<usize>,
    #[arg(long)]
    pub svm_gamma: Option<f64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub extraction: ExtractionArgs,
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Classifiers to compare.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub classifier: Vec<ClassifierKind>,
    /// kNN neighbour counts; several values sweep k.
    #[arg(long, value_delimiter = ',')]
    pub knn_k: Vec<usize>,
    #[arg(long)]
    pub svm_gamma: Option<f64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Player skills, one simulated player each.
    #[arg(long, value_delimiter = ',')]
    pub skills: Vec<f64>,
    #[arg(long)]
    pub windows: Option<usize>,
    /// WM or EM.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<Task>,
    #[arg(long)]
    pub start_difficulty: Option<u8>,
    #[arg(long, value_enum)]
    pub affect_source: Option<AffectSourceKind>,
    /// Model file written by `train`.
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub sample_rate: Option<u32>,
}

fn parse_normalization(s: &str) -> Result<NormalizationMode, String> {
    match s {
        "subtract-mean" => Ok(NormalizationMode::SubtractMean),
        "z-score" => Ok(NormalizationMode::ZScore),
        _ => Err(format!("expected subtract-mean or z-score, got {s}")),
    }
}

fn parse_task(s: &str) -> Result<Task, String> {
    match s.to_ascii_uppercase().as_str() {
        "WM" => Ok(Task::Wm),
        "EM" => Ok(Task::Em),
        _ => Err(format!("expected WM or EM, got {s}")),
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.workers, self.workers);
    }
}

impl ExtractionArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.no_dwt {
            cfg.extraction.dwt = false;
        }
        set(&mut cfg.extraction.dwt_level, self.dwt_level);
        set(&mut cfg.extraction.normalization, self.normalization);
    }
}

impl SelectionArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        set(&mut cfg.selection.k, self.top_k);
        set(&mut cfg.selection.bins, self.bins);
        if self.no_selection {
            cfg.selection.enabled = false;
        }
    }
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Synth(a) => &a.common,
            Command::Extract(a) => &a.common,
            Command::Select(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::Evaluate(a) => &a.common,
            Command::Simulate(a) => &a.common,
        }
    }

    /// Fold this command's flags into `cfg`.
    pub fn apply(&self, cfg: &mut RunConfig) {
        self.common().apply(cfg);
        match self {
            Command::Synth(a) => {
                set(&mut cfg.corpus.participants, a.participants);
                set(&mut cfg.emg.noise_sd, a.noise_sd);
                set(&mut cfg.corpus.sample_rate_hz, a.sample_rate);
            }
            Command::Extract(a) => a.extraction.apply(cfg),
            Command::Select(a) => {
                a.extraction.apply(cfg);
                a.selection.apply(cfg);
            }
            Command::Train(a) => {
                a.extraction.apply(cfg);
                a.selection.apply(cfg);
                set(&mut cfg.classifier.kind, a.classifier);
                set(&mut cfg.classifier.knn_k, a.knn_k);
                if a.svm_gamma.is_some() {
                    cfg.classifier.svm_gamma = a.svm_gamma;
                }
                set(&mut cfg.classifier.svm_c, a.svm_c);
            }
            Command::Evaluate(a) => {
                a.extraction.apply(cfg);
                a.selection.apply(cfg);
                if !a.classifier.is_empty() {
                    cfg.evaluate.classifiers = a.classifier.clone();
                }
                if !a.knn_k.is_empty() {
                    cfg.evaluate.knn_k = a.knn_k.clone();
                }
                if a.svm_gamma.is_some() {
                    cfg.classifier.svm_gamma = a.svm_gamma;
                }
                set(&mut cfg.classifier.svm_c, a.svm_c);
            }
            Command::Simulate(a) => {
                if !a.skills.is_empty() {
                    cfg.simulate.skills = a.skills.clone();
                }
                set(&mut cfg.simulate.windows, a.windows);
                set(&mut cfg.simulate.task, a.task);
                set(&mut cfg.simulate.start_difficulty, a.start_difficulty);
                set(&mut cfg.simulate.affect_source, a.affect_source);
                if a.model.is_some() {
                    cfg.simulate.model = a.model.clone();
                }
                set(&mut cfg.simulate.sample_rate_hz, a.sample_rate);
            }
        }
    }
}
