//! Monte Carlo orchestration, estimators and the acceptance suite.

pub mod acceptance;
pub mod plan;
pub mod stats;

pub use plan::{
    parallel_map, run_records, run_trials, summarize, work_budget, Report, ReportEntry,
    SamplerKind, Statistic, TrialPlan, TrialRecord, DEFAULT_MAX_WORK, MAX_WORK_ENV,
};
pub use stats::{
    chunked_moments, empirical_cov, empirical_cov_errors, empirical_pmf, ks_distance, ks_distance_2d,
    tv_distance, variance_with_error, Moments,
};
