//! AUC, the select-retrain-score benchmark and its reports.

mod auc;
mod benchmark;
mod methods;
mod report;

pub use auc::{auc, AucResult};
pub use benchmark::{run_benchmark, run_benchmark_partial, BenchmarkFailure, BenchmarkReport, FeatureCell, MethodRow, RunMetadata, BASELINE};
pub use methods::{select_features, LambdaChoice, Method, MethodDetail, MethodOutput, MethodParams};
pub use report::{emit_report, ReportFormat};
