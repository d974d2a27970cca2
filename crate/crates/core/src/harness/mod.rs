//! Simulated and measured experiments: the job protocol, count ingestion,
//! per-job witnesses with error reports, aggregation and drift detection.
//!
//! A job measures every gate count `k` in a contiguous range; the first
//! `offset` gates prepare the state, so witness index `n` is `k - offset`.

mod analysis;
mod config;
mod io;
mod simulate;

pub use analysis::{
    analyze_exact, analyze_jobs, drift_scan, drift_scan_series, AggregateReport, DriftPoint, DriftScan, JobWitness,
    WitnessSummary, AGGREGATION_NOTE, DEFAULT_WINDOW, FLAG_SIGMAS,
};
pub use config::{DriftModel, ExperimentConfig, NoiseConfig, MAX_CIRCUITS_PER_JOB};
pub use io::{
    ingest_counts, parse_report_csv, read_counts, render_csv, render_drift_csv, render_report, render_table,
    report_rows, write_counts, ReportFormat, ReportRow, COUNTS_HEADER,
};
pub use simulate::{simulate_experiment, simulate_probabilities, JobProbabilities, JobRecord, KCounts};
