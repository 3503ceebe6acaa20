//! Splitting, cross-validation and scoring for the three pipelines.

mod cv;
mod metrics;
mod pipeline;
mod split;

pub use cv::{cross_validate, cross_validate_with, fold_indices, CvScheme, CvSummary, FoldResult};
pub use metrics::{metrics, ClassMetrics, ClassificationReport, ConfusionMatrix};
pub use pipeline::{
    run_pipeline, FitDiagnostics, PipelineMode, PipelineOutcome, PipelineSpec, PopulationWhiteners,
    WhiteningInfo, LABEL_LEAKAGE_NOTE,
};
pub use split::{stratified_split, Split, SplitSpec};
