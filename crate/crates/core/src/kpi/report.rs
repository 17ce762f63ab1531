use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{Event, EventLog, KpiError};

/// Half-open time window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: i64,
    pub end: i64,
}

impl Window {
    pub fn new(start: i64, end: i64) -> Result<Self, KpiError> {
        if start >= end {
            return Err(KpiError::Argument(format!(
                "window [{start}, {end}) is empty or inverted"
            )));
        }
        Ok(Window { start, end })
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t < self.end
    }

    pub fn duration(&self) -> i64 {
        self.end - self.start
    }

    fn checked(self) -> Result<Self, KpiError> {
        Window::new(self.start, self.end)
    }
}

/// Option 1: total turbine downtime from outcomes inside the window.
pub fn kpi_total_downtime(log: &EventLog, window: Window) -> Result<f64, KpiError> {
    let window = window.checked()?;
    Ok(log
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::Outcome(o) if window.contains(o.time) => Some(o.downtime_hours),
            _ => None,
        })
        // from +0.0: an empty f64 sum is -0.0
        .fold(0.0, |total, h| total + h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FailuresVsInvestigations {
    pub failures: u64,
    pub investigations: u64,
}

/// Option 2: failures against in-person investigations in the window.
pub fn kpi_failures_vs_investigations(log: &EventLog, window: Window) -> Result<FailuresVsInvestigations, KpiError> {
    let window = window.checked()?;
    let mut out = FailuresVsInvestigations {
        failures: 0,
        investigations: 0,
    };
    for e in log.events() {
        match e {
            Event::Outcome(o) if o.failed && window.contains(o.time) => out.failures += 1,
            Event::Decision(d) if d.investigated && window.contains(d.time) => out.investigations += 1,
            _ => {}
        }
    }
    Ok(out)
}

/// Option 3: share of alerts raised in the window that were investigated.
/// `None` when no alert falls in the window.
pub fn kpi_alert_followup_rate(log: &EventLog, window: Window) -> Result<Option<f64>, KpiError> {
    let window = window.checked()?;
    let investigated: HashSet<&str> = log
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::Decision(d) if d.investigated => Some(d.alert_id.as_str()),
            _ => None,
        })
        .collect();
    let (mut alerts, mut followed) = (0u64, 0u64);
    for e in log.events() {
        if let Event::Alert(a) = e {
            if window.contains(a.time) {
                alerts += 1;
                if investigated.contains(a.alert_id.as_str()) {
                    followed += 1;
                }
            }
        }
    }
    Ok((alerts > 0).then(|| followed as f64 / alerts as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowKpis {
    pub window: Window,
    pub kpi1_total_downtime_hours: f64,
    pub kpi2: FailuresVsInvestigations,
    pub kpi3_alert_followup_rate: Option<f64>,
}

pub fn window_kpis(log: &EventLog, window: Window) -> Result<WindowKpis, KpiError> {
    Ok(WindowKpis {
        window,
        kpi1_total_downtime_hours: kpi_total_downtime(log, window)?,
        kpi2: kpi_failures_vs_investigations(log, window)?,
        kpi3_alert_followup_rate: kpi_alert_followup_rate(log, window)?,
    })
}

/// Per-KPI values: used for both the baseline mean and the evaluation delta.
/// `None` when no baseline (or no defined rate) is available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KpiDeltas {
    pub kpi1_total_downtime_hours: Option<f64>,
    pub kpi2_failures: Option<f64>,
    pub kpi2_investigations: Option<f64>,
    pub kpi3_alert_followup_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KpiReport {
    #[serde(flatten)]
    pub evaluation: WindowKpis,
    pub baselines: Vec<WindowKpis>,
    pub baseline_mean: KpiDeltas,
    /// Evaluation value minus baseline mean.
    pub deltas: KpiDeltas,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// KPIs for the evaluation window next to historic windows of the same length.
pub fn baseline_report(log: &EventLog, eval_window: Window, historic: &[Window]) -> Result<KpiReport, KpiError> {
    let eval_window = eval_window.checked()?;
    for (i, w) in historic.iter().enumerate() {
        let w = w.checked()?;
        if w.duration() != eval_window.duration() {
            return Err(KpiError::Argument(format!(
                "baseline window {i} [{}, {}) lasts {} s, evaluation window lasts {} s",
                w.start,
                w.end,
                w.duration(),
                eval_window.duration()
            )));
        }
    }
    let evaluation = window_kpis(log, eval_window)?;
    let baselines = historic
        .iter()
        .map(|&w| window_kpis(log, w))
        .collect::<Result<Vec<_>, _>>()?;
    let baseline_mean = KpiDeltas {
        kpi1_total_downtime_hours: mean(baselines.iter().map(|b| b.kpi1_total_downtime_hours)),
        kpi2_failures: mean(baselines.iter().map(|b| b.kpi2.failures as f64)),
        kpi2_investigations: mean(baselines.iter().map(|b| b.kpi2.investigations as f64)),
        kpi3_alert_followup_rate: mean(baselines.iter().filter_map(|b| b.kpi3_alert_followup_rate)),
    };
    let diff = |value: Option<f64>, base: Option<f64>| Some(value? - base?);
    let deltas = KpiDeltas {
        kpi1_total_downtime_hours: diff(
            Some(evaluation.kpi1_total_downtime_hours),
            baseline_mean.kpi1_total_downtime_hours,
        ),
        kpi2_failures: diff(Some(evaluation.kpi2.failures as f64), baseline_mean.kpi2_failures),
        kpi2_investigations: diff(
            Some(evaluation.kpi2.investigations as f64),
            baseline_mean.kpi2_investigations,
        ),
        kpi3_alert_followup_rate: diff(
            evaluation.kpi3_alert_followup_rate,
            baseline_mean.kpi3_alert_followup_rate,
        ),
    };
    Ok(KpiReport {
        evaluation,
        baselines,
        baseline_mean,
        deltas,
    })
}
