//! One function per subcommand. Each validates the whole configuration before
//! touching the filesystem and writes the effective configuration next to its
//! outputs.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use affect_dda::classify::{
    loso_evaluate_features, render_accuracy_table, LosoOutcome, ModelConfig, Standardizer, TrainedPipeline,
};
use affect_dda::dataset::{load_corpus, save_sessions, SessionLog};
use affect_dda::features::{
    extract_corpus, read_feature_csv, write_feature_csv, ExtractionConfig, FeatureId, FeatureVector,
};
use affect_dda::gamesim::{
    derive_seed, generate_corpus, simulate_session, write_simulation_csv, AffectSource, CorpusConfig,
    ParticipantDraw, PlayerModel, SessionMode, SimulationConfig,
};
use affect_dda::selection::{mrmr_select, SelectionResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{AffectSourceKind, RunConfig};
use crate::error::{CliError, Result};

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FEATURES_FILE: &str = "features.csv";
pub const RANKING_FILE: &str = "ranking.csv";
pub const MODEL_FILE: &str = "model.json";
pub const REPORT_FILE: &str = "report.json";
pub const TABLE_FILE: &str = "table.txt";
pub const SESSIONS_FILE: &str = "sessions.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TRAJECTORY_DIR: &str = "trajectories";

/// Simulated players draw seeds from streams above the corpus participants'.
const SIMULATION_STREAM: u64 = 1 << 32;

/// Where labeled feature vectors come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureSource {
    /// Session files; features are extracted with the configured settings.
    Corpus(PathBuf),
    /// A feature CSV written by `extract`.
    Features(PathBuf),
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> Result<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create_file(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::json(path, e))?;
    w.write_all(b"\n").map_err(|e| CliError::io(path, e))?;
    finish(path, w)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    write_text(&dir.join(CONFIG_FILE), &cfg.to_toml())
}

/// Load labeled and unlabeled feature vectors from either source.
pub fn load_vectors(cfg: &RunConfig, source: &FeatureSource) -> Result<Vec<FeatureVector>> {
    match source {
        FeatureSource::Corpus(path) => {
            let sessions = load_corpus(path)?;
            log::info!("extracting features from {} sessions", sessions.len());
            Ok(extract_corpus(&sessions, &cfg.extraction_config()?)?)
        }
        FeatureSource::Features(path) => {
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            Ok(read_feature_csv(std::io::BufReader::new(file))?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub corpus: CorpusConfig,
    pub participants: Vec<ParticipantDraw>,
}

/// Generate a labeled corpus, one session file per participant.
pub fn cmd_synth(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let corpus_cfg = cfg.corpus_config();
    let corpus = generate_corpus(&corpus_cfg)?;
    create_dir(out)?;
    let mut files = Vec::new();
    for (draw, sessions) in corpus.draws.iter().zip(&corpus.sessions) {
        let path = out.join(format!("{}.jsonl", draw.participant_id));
        save_sessions(&path, sessions)?;
        files.push(path);
    }
    let manifest = SynthManifest { seed: cfg.seed, corpus: corpus_cfg, participants: corpus.draws };
    write_json(&out.join(MANIFEST_FILE), &manifest)?;
    write_config(out, cfg)?;
    log::info!("wrote {} participant files to {}", files.len(), out.display());
    Ok(files)
}

/// Baseline-normalize, transform and extract the 112 features of every window.
pub fn cmd_extract(cfg: &RunConfig, corpus: &Path, out: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let vectors = load_vectors(cfg, &FeatureSource::Corpus(corpus.to_owned()))?;
    create_dir(out)?;
    let path = out.join(FEATURES_FILE);
    let mut w = create_file(&path)?;
    write_feature_csv(&mut w, &vectors)?;
    finish(&path, w)?;
    write_config(out, cfg)?;
    Ok(path)
}

/// Rank features with mRMR over every labeled window.
pub fn select_features(cfg: &RunConfig, vectors: &[FeatureVector]) -> Result<(SelectionResult, Vec<usize>)> {
    let labeled: Vec<&FeatureVector> = vectors.iter().filter(|v| v.label.is_some()).collect();
    if labeled.is_empty() {
        return Err(affect_dda::Error::EmptyDataset.into());
    }
    let rows: Vec<Vec<f64>> = labeled.iter().map(|v| v.values.clone()).collect();
    let standardizer = Standardizer::fit(&rows)?;
    let retained = standardizer.retained().to_vec();
    let k = cfg.selection.k;
    if k > retained.len() {
        return Err(CliError::Config(format!(
            "selection.k = {k} exceeds the {} non-constant features in this data",
            retained.len()
        )));
    }
    let z: Vec<Vec<f64>> = rows.iter().map(|r| standardizer.apply(r)).collect::<Result<_, _>>()?;
    let columns: Vec<Vec<f64>> = (0..retained.len()).map(|f| z.iter().map(|r| r[f]).collect()).collect();
    let codes: Vec<usize> = labeled.iter().map(|v| v.label.expect("labeled").index()).collect();
    let mi = cfg.selection_config().map(|s| s.mi).unwrap_or_default();
    Ok((mrmr_select(&columns, &codes, k, &mi)?, retained))
}

/// Write the mRMR ranking as `rank,feature,score`.
pub fn cmd_select(cfg: &RunConfig, source: &FeatureSource, out: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let vectors = load_vectors(cfg, source)?;
    let (ranking, retained) = select_features(cfg, &vectors)?;
    create_dir(out)?;
    let path = out.join(RANKING_FILE);
    let mut w = create_file(&path)?;
    ranking.write_csv(&mut w, |pos| {
        FeatureId::from_index(retained[pos]).expect("feature index in range").name()
    })?;
    finish(&path, w)?;
    write_config(out, cfg)?;
    Ok(path)
}

/// A fitted pipeline plus what it expects from incoming segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub seed: u64,
    pub model: ModelConfig,
    pub training_windows: usize,
    pub pipeline: TrainedPipeline,
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|e| CliError::json(path, e))
}

/// Fit the configured pipeline on every labeled window.
pub fn cmd_train(cfg: &RunConfig, source: &FeatureSource, out: &Path) -> Result<PathBuf> {
    cfg.validate()?;
    let vectors = load_vectors(cfg, source)?;
    let labeled: Vec<&FeatureVector> = vectors.iter().filter(|v| v.label.is_some()).collect();
    let model = cfg.model_config();
    let pipeline = TrainedPipeline::fit(&labeled, cfg.extraction_config()?, &model)?;
    create_dir(out)?;
    let path = out.join(MODEL_FILE);
    write_json(&path, &ModelFile { seed: cfg.seed, model, training_windows: labeled.len(), pipeline })?;
    write_config(out, cfg)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub seed: u64,
    pub extraction: ExtractionConfig,
    pub outcomes: Vec<LosoOutcome>,
}

/// Leave-one-subject-out evaluation of every configured classifier.
pub fn cmd_evaluate(cfg: &RunConfig, source: &FeatureSource, out: &Path) -> Result<EvaluationReport> {
    cfg.validate()?;
    let extraction = cfg.extraction_config()?;
    let vectors = load_vectors(cfg, source)?;
    let outcomes = cfg
        .evaluate_models()
        .iter()
        .map(|m| {
            log::info!("LOSO with {}", m.classifier);
            loso_evaluate_features(&vectors, extraction, m)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = EvaluationReport { seed: cfg.seed, extraction, outcomes };
    create_dir(out)?;
    write_json(&out.join(REPORT_FILE), &report)?;
    write_text(&out.join(TABLE_FILE), &render_accuracy_table(&report.outcomes))?;
    write_config(out, cfg)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub final_difficulty: u8,
    /// Fraction of windows played within one level of the player's skill.
    pub time_in_flow_band: f64,
    pub trajectory: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSummary {
    pub participant_id: String,
    pub skill: f64,
    pub adaptive: SessionSummary,
    pub non_adaptive: SessionSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub affect_source: AffectSourceKind,
    pub players: Vec<PlayerSummary>,
}

/// Matched adaptive and non-adaptive sessions for every configured player.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<SimulationSummary> {
    cfg.validate()?;
    let sim = &cfg.simulate;
    let model = match (sim.affect_source, &sim.model) {
        (AffectSourceKind::Classifier, Some(path)) => Some(load_model(path)?),
        _ => None,
    };
    let source = match &model {
        Some(m) => AffectSource::Classifier(&m.pipeline),
        None => AffectSource::GroundTruth,
    };

    let runs = sim
        .skills
        .par_iter()
        .enumerate()
        .map(|(i, &skill)| {
            let pid = format!("SIM{:02}", i + 1);
            let stream = SIMULATION_STREAM + 2 * i as u64;
            let player = PlayerModel::new(skill, sim.error_steepness, derive_seed(cfg.seed, stream))?;
            let synth = cfg.synth_config(derive_seed(cfg.seed, stream + 1));
            let run = |mode: SessionMode, label: &str| {
                let config = SimulationConfig {
                    participant_id: pid.clone(),
                    session_id: format!("{pid}-{label}"),
                    task: sim.task,
                    mode,
                    windows: sim.windows,
                    start_difficulty: sim.start_difficulty,
                    sample_rate_hz: sim.sample_rate_hz,
                    synth: synth.clone(),
                };
                simulate_session(&player, &config, source)
            };
            let adaptive = run(SessionMode::Adaptive, "adaptive")?;
            let fixed = run(SessionMode::NonAdaptive, "non-adaptive")?;
            Ok((pid, player, adaptive, fixed))
        })
        .collect::<Result<Vec<_>, affect_dda::Error>>()?;

    create_dir(&out.join(TRAJECTORY_DIR))?;
    let mut logs: Vec<SessionLog> = Vec::new();
    let mut players = Vec::new();
    for (pid, player, adaptive, fixed) in runs {
        let mut summarize = |s: &affect_dda::gamesim::SimulatedSession| -> Result<SessionSummary> {
            let session_id = s.log.session_id().to_owned();
            let rel = PathBuf::from(TRAJECTORY_DIR).join(format!("{session_id}.csv"));
            let path = out.join(&rel);
            let mut w = create_file(&path)?;
            write_simulation_csv(&mut w, &s.trajectory)?;
            finish(&path, w)?;
            logs.push(s.log.clone());
            Ok(SessionSummary {
                session_id,
                final_difficulty: s.final_difficulty(),
                time_in_flow_band: s.time_in_band(player.flow_band()),
                trajectory: rel,
            })
        };
        let adaptive = summarize(&adaptive)?;
        let non_adaptive = summarize(&fixed)?;
        players.push(PlayerSummary { participant_id: pid, skill: player.skill, adaptive, non_adaptive });
    }
    save_sessions(out.join(SESSIONS_FILE), &logs)?;
    let summary = SimulationSummary { seed: cfg.seed, affect_source: sim.affect_source, players };
    write_json(&out.join(SUMMARY_FILE), &summary)?;
    write_config(out, cfg)?;
    Ok(summary)
}

/// Human-readable lines for the simulation summary.
pub fn render_simulation_summary(summary: &SimulationSummary) -> String {
    let mut s = format!("{:<8} {:>5}  {:>15}  {:>19}\n", "player", "skill", "adaptive final", "non-adaptive final");
    for p in &summary.players {
        s.push_str(&format!(
            "{:<8} {:>5.1}  {:>6} ({:>4.0}%)  {:>10} ({:>4.0}%)\n",
            p.participant_id,
            p.skill,
            p.adaptive.final_difficulty,
            p.adaptive.time_in_flow_band * 100.0,
            p.non_adaptive.final_difficulty,
            p.non_adaptive.time_in_flow_band * 100.0,
        ));
    }
    s
}
