//! Random Forest classification with stratified cross-validation and the
//! metric/delta machinery for usefulness prediction experiments.

mod cv;
mod forest;
mod metrics;

pub use cv::{evaluate_cv, stratified_folds};
pub use forest::{predict, train_forest, DecisionTree, ForestParams, MaxFeatures, RandomForestModel};
pub use metrics::{delta_report, mcc, ConfusionMatrix, DeltaReport, EvalMetrics};
