mod common;

use affect_dda::classify::{ModelConfig, TrainedPipeline};
use affect_dda::dataset::{read_sessions, write_sessions, Quadrant, Task};
use affect_dda::dda::{classify_performance, PerformanceClass};
use affect_dda::features::{extract_corpus, ExtractionConfig};
use affect_dda::gamesim::{
    generate_corpus, perform_items, simulate_session, AffectSource, CorpusConfig, PlayerModel, SessionMode,
    SimulationConfig, SynthEmgConfig,
};

fn config(task: Task, mode: SessionMode, windows: usize, start: u8) -> SimulationConfig {
    SimulationConfig {
        participant_id: "SIM".into(),
        session_id: "SIM-1".into(),
        task,
        mode,
        windows,
        start_difficulty: start,
        sample_rate_hz: 8,
        synth: SynthEmgConfig::default(),
    }
}

#[test]
fn adaptive_sessions_settle_in_the_flow_band() {
    for task in [Task::Wm, Task::Em] {
        for skill in [2.0, 5.0, 9.0] {
            for start in [1, 10] {
                for seed in 0..5 {
                    let player = PlayerModel::new(skill, PlayerModel::DEFAULT_ERROR_STEEPNESS, seed).unwrap();
                    let cfg = config(task, SessionMode::Adaptive, 30, start);
                    let s = simulate_session(&player, &cfg, AffectSource::GroundTruth).unwrap();
                    let (lo, hi) = player.flow_band();
                    let d = s.difficulties();
                    let inside = |v: u8| (lo..=hi).contains(&(v as f64));
                    let entry = d.iter().position(|&v| inside(v)).expect("never entered");
                    assert!(entry < 10, "{task:?} skill {skill} start {start} seed {seed}: {d:?}");
                    assert!(d[entry..].iter().all(|&v| inside(v)), "{task:?} skill {skill} start {start} seed {seed}: {d:?}");
                }
            }
        }
    }
}

#[test]
fn mid_skill_from_easiest_ends_near_skill() {
    let player = PlayerModel::new(5.0, PlayerModel::DEFAULT_ERROR_STEEPNESS, 1).unwrap();
    let s = simulate_session(&player, &config(Task::Wm, SessionMode::Adaptive, 10, 1), AffectSource::GroundTruth).unwrap();
    assert!((4..=6).contains(&s.final_difficulty()), "{:?}", s.difficulties());
}

#[test]
fn nonadaptive_ignores_the_player() {
    let a = PlayerModel::new(2.0, 1.0, 1).unwrap();
    let b = PlayerModel::new(9.0, 5.0, 2).unwrap();
    let cfg = config(Task::Em, SessionMode::NonAdaptive, 10, 1);
    let sa = simulate_session(&a, &cfg, AffectSource::GroundTruth).unwrap();
    let sb = simulate_session(&b, &cfg, AffectSource::GroundTruth).unwrap();
    assert_eq!(sa.difficulties(), (1..=10).collect::<Vec<u8>>());
    assert_eq!(sa.difficulties(), sb.difficulties());
    assert_ne!(sa.log.score_events(), sb.log.score_events());
}

#[test]
fn emitted_log_round_trips() {
    let player = PlayerModel::new(4.0, 2.0, 3).unwrap();
    let s = simulate_session(&player, &config(Task::Wm, SessionMode::Adaptive, 4, 3), AffectSource::GroundTruth).unwrap();
    let mut buf = Vec::new();
    write_sessions(&mut buf, std::slice::from_ref(&s.log)).unwrap();
    let back = read_sessions(buf.as_slice()).unwrap();
    assert_eq!(back, vec![s.log.clone()]);
    assert_eq!(s.log.difficulty_track(), s.difficulties().as_slice());
}

#[test]
fn simulation_is_deterministic() {
    let player = PlayerModel::new(6.0, 2.0, 8).unwrap();
    let cfg = config(Task::Em, SessionMode::Adaptive, 6, 2);
    let a = simulate_session(&player, &cfg, AffectSource::GroundTruth).unwrap();
    let b = simulate_session(&player, &cfg, AffectSource::GroundTruth).unwrap();
    assert_eq!(a, b);
}

#[test]
fn performance_follows_the_skill_gap() {
    // Gap -8 at steepness 1: per-item error 1/(1+e^8), so a 2-item round is
    // perfect with probability (1 - 3.35e-4)^2 > 0.999.
    let easy = PlayerModel::new(9.0, 1.0, 0).unwrap();
    let p = 1.0 / (1.0 + 8f64.exp());
    assert!((easy.error_probability(1) - p).abs() < 1e-15);
    assert!((1.0 - p).powi(2) > 0.99);
    let mut rng = easy.rng();
    let perfect = (0..10_000)
        .filter(|_| classify_performance(&perform_items(&easy, 1, 2, &mut rng)) == PerformanceClass::PerfectScore)
        .count();
    assert!(perfect as f64 / 10_000.0 > 0.99);

    let hard = PlayerModel::new(1.0, 1.0, 0).unwrap();
    let mut rng = hard.rng();
    let negative = (0..1_000)
        .filter(|_| classify_performance(&perform_items(&hard, 10, 12, &mut rng)) == PerformanceClass::NegativeScore)
        .count();
    assert!(negative > 500);
}

#[test]
fn classifier_in_the_loop() {
    let corpus = CorpusConfig { participants: 4, sample_rate_hz: 16, ..Default::default() };
    let sessions: Vec<_> = generate_corpus(&corpus).unwrap().sessions.into_iter().flatten().collect();
    let vectors = extract_corpus(&sessions, &ExtractionConfig::default()).unwrap();
    let refs: Vec<_> = vectors.iter().collect();
    let model = TrainedPipeline::fit(&refs, ExtractionConfig::default(), &ModelConfig::default()).unwrap();

    let player = PlayerModel::new(5.0, PlayerModel::DEFAULT_ERROR_STEEPNESS, 4).unwrap();
    let mut cfg = config(Task::Wm, SessionMode::Adaptive, 10, 1);
    cfg.sample_rate_hz = 16;
    let s = simulate_session(&player, &cfg, AffectSource::Classifier(&model)).unwrap();
    let agree = s.trajectory.iter().filter(|r| r.affect == r.true_affect).count();
    assert!(agree >= 8, "{:?}", s.trajectory);
    assert!(s.trajectory.iter().all(|r| Quadrant::ALL.contains(&r.affect)));
}
