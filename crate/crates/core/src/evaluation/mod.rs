//! Stratified cross-validation on complete sequences and on sampled
//! fragments, weighted F-measure, and report output.

mod folds;
mod grid;
mod metrics;
pub mod report;

pub use folds::{make_folds, FoldPlan};
pub use grid::{
    evaluate_complete, evaluate_fragments, mean_and_std, run_grid, Aggregate, ExperimentReport, FoldRecord,
    GridConfig, ItemPrediction, ReportMeta,
};
pub use metrics::{f_measure, weighted_f_measure, ClassMetrics, MetricRecord};
