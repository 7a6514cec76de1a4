//! Facial-EMG affect recognition and affect-driven dynamic difficulty adjustment.
//!
//! The recognition side turns 45 s, 8-channel facial EMG windows into one of
//! four valence/arousal quadrants:
//!
//! 1. [`dsp`]: subtract a per-session baseline and keep the Haar DWT
//!    approximation band,
//! 2. [`features`]: fourteen temporal features per channel (112 in total),
//! 3. [`selection`]: mRMR picks the most informative subset,
//! 4. [`classify`]: kNN, LDA or a Gaussian SVM, scored with
//!    leave-one-subject-out cross-validation.
//!
//! The adaptation side ([`dda`]) combines the recognized quadrant with the
//! player's score in the same window to move difficulty on a 1-10 scale, and
//! [`gamesim`] closes the loop with a synthetic player and synthetic EMG.
//!
//! ```
//! use affect_dda::dataset::Quadrant;
//! use affect_dda::dda::{DdaState, PerformanceClass};
//!
//! let state = DdaState::new(5)?;
//! let bored = state.step(Quadrant::CalmNegative, PerformanceClass::PerfectScore);
//! assert_eq!(bored.difficulty(), 7);
//! # Ok::<(), affect_dda::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod dataset;
pub mod dda;
pub mod dsp;
pub mod error;
pub mod features;
pub mod gamesim;
pub mod selection;

pub use error::{Error, Result};

// The guide's code blocks compile and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/session-files.md")]
    mod session_files {}
    #[doc = include_str!("../../../book/src/signal-processing.md")]
    mod signal_processing {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/feature-selection.md")]
    mod feature_selection {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/difficulty-adjustment.md")]
    mod difficulty_adjustment {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
