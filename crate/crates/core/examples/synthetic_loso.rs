//! Generate a synthetic corpus and print LOSO accuracy for each classifier.
//!
//! Usage: `cargo run --release --example synthetic_loso [noise_sd] [participants]`

use affect_dda::classify::{loso_evaluate_features, render_accuracy_table, ClassifierSpec, ModelConfig, SelectionConfig};
use affect_dda::features::{extract_corpus, ExtractionConfig};
use affect_dda::gamesim::{generate_corpus, CorpusConfig};

fn main() -> affect_dda::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = CorpusConfig::default();
    if let Some(noise) = args.next() {
        cfg.synth.noise_sd = noise.parse().expect("noise_sd must be a number");
    }
    if let Some(n) = args.next() {
        cfg.participants = n.parse().expect("participants must be an integer");
    }
    let sessions: Vec<_> = generate_corpus(&cfg)?.sessions.into_iter().flatten().collect();
    for (label, extraction) in [
        ("dwt", ExtractionConfig::default()),
        ("no-dwt", ExtractionConfig { dwt: None, ..Default::default() }),
    ] {
        let vectors = extract_corpus(&sessions, &extraction)?;
        let mut outcomes = Vec::new();
        for classifier in [ClassifierSpec::Knn { k: 4 }, ClassifierSpec::Lda, ClassifierSpec::Svm { gamma: None, c: 1.0 }] {
            for selection in [Some(SelectionConfig::default()), None] {
                let model = ModelConfig { selection, classifier };
                let mut o = loso_evaluate_features(&vectors, extraction, &model)?;
                o.classifier = format!("{label} {classifier} {}", if selection.is_some() { "mrmr30" } else { "all" });
                outcomes.push(o);
            }
        }
        print!("{}", render_accuracy_table(&outcomes));
    }
    Ok(())
}
