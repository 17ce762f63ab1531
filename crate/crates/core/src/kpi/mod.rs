//! Deployment KPIs over an append-only log of alert, decision and outcome
//! events.
//!
//! Windows are half-open `[start, end)` in epoch seconds. The alert follow-up
//! rate belongs to the alert: an alert raised inside the window counts as
//! investigated if any decision on it says so, whenever that decision was made.

mod events;
mod report;

use thiserror::Error;

pub use events::{load_log, load_log_file, Alert, Decision, Event, EventLog, Outcome};
pub use report::{
    baseline_report, kpi_alert_followup_rate, kpi_failures_vs_investigations, kpi_total_downtime, window_kpis,
    FailuresVsInvestigations, KpiDeltas, KpiReport, Window, WindowKpis,
};

#[derive(Debug, Error)]
pub enum KpiError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("decision references unknown alert {alert_id:?}")]
    UnknownAlert { alert_id: String },
    #[error("alert {alert_id:?} already recorded")]
    DuplicateAlert { alert_id: String },
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("event log line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("event log io error: {0}")]
    Io(#[from] std::io::Error),
}
