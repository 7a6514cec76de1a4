mod common;

use std::collections::BTreeMap;

use affect_dda::dataset::{ChannelId, EmgSegment, Quadrant, Site, Task};
use affect_dda::dsp::compute_baseline;
use affect_dda::features::{
    extract_channel_features, extract_feature_vector, ExtractionConfig, FeatureId, FeatureKind, ThresholdConfig,
};
use affect_dda::gamesim::{synth_emg, ParticipantProfile, SegmentMeta, SynthEmgConfig};
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Golden {
    signal: Vec<f64>,
    thresholds: BTreeMap<String, f64>,
    features: BTreeMap<String, f64>,
}

#[test]
fn golden_sixteen_sample_vector() {
    let g: Golden = serde_json::from_str(include_str!("data/features_golden.json")).unwrap();
    let th = ThresholdConfig {
        zc_threshold: g.thresholds["zc"],
        ssc_threshold: g.thresholds["ssc"],
        wamp_threshold: g.thresholds["wamp"],
        myop_threshold: g.thresholds["myop"],
    };
    assert_eq!(th, ThresholdConfig::default());
    let f = extract_channel_features(&g.signal, &th).unwrap();
    for kind in FeatureKind::ALL {
        let want = g.features[kind.name()];
        assert!((f.get(kind) - want).abs() <= 1e-9, "{kind}: {} vs {want}", f.get(kind));
    }
}

#[test]
fn small_examples() {
    let th = ThresholdConfig::default();
    let f = extract_channel_features(&[1.0, -1.0, 2.0, -2.0], &th).unwrap();
    assert_eq!(f.get(FeatureKind::Mav), 1.5);
    let f = extract_channel_features(&[1.0, 2.0, 3.0, 4.0], &th).unwrap();
    assert_eq!(f.get(FeatureKind::Ssc), 0.0);
    let f = extract_channel_features(&[0.0, 1.0, 0.0], &th).unwrap();
    assert_eq!(f.get(FeatureKind::Wl), 2.0);
    assert!(extract_channel_features(&[1.0, 2.0], &th).is_err());
}

#[test]
fn names_round_trip() {
    let all: Vec<FeatureId> = FeatureId::all().collect();
    assert_eq!(all.len(), 112);
    for (i, id) in all.iter().enumerate() {
        assert_eq!(id.index(), i);
        assert_eq!(FeatureId::from_name(&id.name()), Some(*id));
    }
    let ssc = FeatureId { channel: ChannelId::from_site(Site::EyeRight), kind: FeatureKind::Ssc };
    assert_eq!(ssc.name(), "eye_right_ssc");
}

fn segment(window: u32, channels: Vec<Vec<f64>>) -> EmgSegment {
    EmgSegment::new("P", "S", Task::Em, window, 2, channels, None).unwrap()
}

#[test]
fn zero_and_baseline_constant_segments() {
    let amplitude = [
        FeatureKind::Iemg,
        FeatureKind::Mav,
        FeatureKind::Rms,
        FeatureKind::Wl,
        FeatureKind::Var,
        FeatureKind::Sd,
        FeatureKind::Dasdv,
    ];
    let cfg = ExtractionConfig::default();
    let zero = segment(0, vec![vec![0.0; 90]; 8]);
    let v0 = extract_feature_vector(&zero, &compute_baseline(&zero).unwrap(), &cfg).unwrap();
    let constant = segment(0, vec![vec![3.5; 90]; 8]);
    let vc = extract_feature_vector(&constant, &compute_baseline(&constant).unwrap(), &cfg).unwrap();
    for id in FeatureId::all() {
        if amplitude.contains(&id.kind) {
            assert_eq!(v0.get(id), 0.0, "{id}");
        }
        assert_eq!(v0.get(id), vc.get(id), "{id}");
    }
}

#[test]
fn positive_pattern_favours_mouth_over_corrugator() {
    let mut cfg = SynthEmgConfig::default();
    for site in Site::ALL {
        cfg.set_gain(Quadrant::EnergeticPositive, site, 1.0);
    }
    cfg.set_gain(Quadrant::EnergeticPositive, Site::MouthLeft, 2.0);
    cfg.set_gain(Quadrant::EnergeticPositive, Site::CorrugatorLeft, 0.2);
    let mut rng = common::rng(4);
    let meta = |w| SegmentMeta {
        participant_id: "P".into(),
        session_id: "S".into(),
        task: Task::Wm,
        window_index: w,
        sample_rate_hz: 64,
    };
    let profile = ParticipantProfile::default();
    let silent = SynthEmgConfig { gains: [[0.0; 8]; 4], ..cfg.clone() };
    let base = synth_emg(&silent, Quadrant::CalmPositive, &profile, &meta(0), &mut rng).unwrap();
    let seg = synth_emg(&cfg, Quadrant::EnergeticPositive, &profile, &meta(1), &mut rng).unwrap();
    let v = extract_feature_vector(&seg, &compute_baseline(&base).unwrap(), &ExtractionConfig::default()).unwrap();
    let rms = |site| v.get(FeatureId { channel: ChannelId::from_site(site), kind: FeatureKind::Rms });
    assert!(rms(Site::MouthLeft) > rms(Site::CorrugatorLeft));
}

fn signal() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3..128)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scale_covariance(x in signal(), c in 0.01f64..100.0) {
        let th = ThresholdConfig::default();
        let f = extract_channel_features(&x, &th).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let g = extract_channel_features(&scaled, &th.scaled(c)).unwrap();
        use FeatureKind::*;
        for k in [Iemg, Mav, Mmav1, Mmav2, Rms, Sd, Wl, Dasdv] {
            prop_assert!(close(g.get(k), c * f.get(k)), "{}", k);
        }
        prop_assert!(close(g.get(Var), c * c * f.get(Var)));
        for k in [Zc, Ssc, Wamp, Myop] {
            prop_assert_eq!(g.get(k), f.get(k), "{}", k);
        }
    }

    #[test]
    fn sign_symmetry(x in signal()) {
        let th = ThresholdConfig::default();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let f = extract_channel_features(&x, &th).unwrap();
        let g = extract_channel_features(&neg, &th).unwrap();
        for k in FeatureKind::ALL {
            prop_assert!(close(f.get(k), g.get(k)), "{}", k);
        }
    }

    #[test]
    fn counts_shrink_as_thresholds_grow(x in signal(), t in 0.0f64..1.0, dt in 0.0f64..1.0) {
        let lo = ThresholdConfig { zc_threshold: t, ssc_threshold: t, wamp_threshold: t, myop_threshold: t };
        let hi = ThresholdConfig { zc_threshold: t + dt, ssc_threshold: t + dt, wamp_threshold: t + dt, myop_threshold: t + dt };
        let f = extract_channel_features(&x, &lo).unwrap();
        let g = extract_channel_features(&x, &hi).unwrap();
        for k in [FeatureKind::Zc, FeatureKind::Ssc, FeatureKind::Wamp, FeatureKind::Myop] {
            prop_assert!(g.get(k) <= f.get(k), "{}", k);
        }
    }

    #[test]
    fn extraction_is_deterministic(x in prop::collection::vec(-2.0f64..2.0, 90)) {
        let seg = segment(0, vec![x; 8]);
        let base = compute_baseline(&seg).unwrap();
        let cfg = ExtractionConfig::default();
        let a = extract_feature_vector(&seg, &base, &cfg).unwrap();
        let b = extract_feature_vector(&seg, &base, &cfg).unwrap();
        prop_assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }
}
