//! Trace ingestion, synthetic episodes, experiment orchestration and
//! reporting.

mod config;
mod experiment;
mod report;
mod synthetic;
mod traces;

pub use config::{ExperimentConfig, PolicyId};
pub use experiment::{run_experiment, run_experiment_with};
pub use report::{
    aggregate, emit_report, reduction_ratio, write_report, Aggregate, RateSettings, Report, ReportFormat,
    ReportRow, REPORT_COLUMNS,
};
pub use synthetic::generate_synthetic;
pub use traces::{load_traces, read_traces, write_traces, Episode, TraceSet, TRACE_HEADER};
