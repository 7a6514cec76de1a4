//! Quadrant classifiers, LOSO cross-validation and evaluation metrics.
//!
//! All classifiers label a standardized feature row with a [`Quadrant`]
//! and break exact ties in canonical quadrant order.
//!
//! [`Quadrant`]: crate::dataset::Quadrant

pub mod knn;
pub mod lda;
pub mod metrics;
pub mod pipeline;
pub mod svm;

pub use knn::{knn_predict, KnnModel};
pub use lda::{lda_fit, lda_predict, LdaModel};
pub use metrics::{average_ranks, spearman_rho, ConfusionMatrix, EvalReport, EvalTask, FoldScore};
pub use pipeline::{
    fit_standardizer, loso_evaluate, loso_evaluate_features, loso_with, render_accuracy_table, Classifier,
    ClassifierSpec, FoldDetail, LosoOutcome, ModelConfig, PipelineConfig, QuadrantPredictor, SelectionConfig,
    Standardizer, TrainedPipeline,
};
pub use svm::{svm_fit, svm_predict, BinarySvm, SvmModel, SvmParams};
