mod common;

use affect_dda::selection::{discretize, mrmr_select, mutual_information, MiConfig};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn mrmr_matches_exhaustive_greedy() {
    let mut rng = common::rng(7);
    let cfg = MiConfig::default();
    for _ in 0..20 {
        let labels: Vec<usize> = (0..40).map(|_| rng.random_range(0..4)).collect();
        // Some features carry label information, some are pure noise.
        let columns: Vec<Vec<f64>> = (0..6)
            .map(|f| {
                let w = f as f64 * 0.3;
                labels.iter().map(|&l| w * l as f64 + rng.random_range(-1.0..1.0)).collect()
            })
            .collect();
        let got = mrmr_select(&columns, &labels, 6, &cfg).unwrap();
        assert_eq!(got.ranked, common::greedy_mrmr(&columns, &labels, 6, cfg.bins));
    }
}

#[test]
fn discretize_matches_reference_binning() {
    let mut rng = common::rng(8);
    for _ in 0..50 {
        let x = common::random_signal(&mut rng, 30, 10.0);
        assert_eq!(discretize(&x, &MiConfig::default()), common::equal_width_bins(&x, 10));
    }
}

proptest! {
    #[test]
    fn mi_agrees_with_reference(
        x in prop::collection::vec(-5.0f64..5.0, 2..80),
        seed in any::<u64>(),
    ) {
        let mut rng = common::rng(seed);
        let y: Vec<usize> = x.iter().map(|_| rng.random_range(0..4)).collect();
        let cfg = MiConfig::default();
        let got = mutual_information(&x, &y, &cfg).unwrap();
        let want = common::mi_bits(&common::equal_width_bins(&x, cfg.bins), &y);
        prop_assert!((got - want).abs() < 1e-12);
        prop_assert!(got >= -1e-12);
    }

    #[test]
    fn selection_is_a_permutation_prefix(
        seed in any::<u64>(),
        d in 2usize..10,
        k_frac in 0.0f64..1.0,
    ) {
        let mut rng = common::rng(seed);
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let columns: Vec<Vec<f64>> = (0..d).map(|_| common::random_signal(&mut rng, 30, 1.0)).collect();
        let k = 1 + ((d - 1) as f64 * k_frac) as usize;
        let r = mrmr_select(&columns, &labels, k, &MiConfig::default()).unwrap();
        let mut seen = r.ranked.clone();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), k);
        prop_assert!(r.ranked.iter().all(|&f| f < d));
        prop_assert_eq!(r.scores.len(), k);
    }
}
