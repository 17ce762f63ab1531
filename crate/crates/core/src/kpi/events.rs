use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::KpiError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Alert {
    pub alert_id: String,
    pub entity_id: String,
    pub time: i64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decision {
    pub alert_id: String,
    pub investigated: bool,
    pub time: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outcome {
    pub entity_id: String,
    pub time: i64,
    pub failed: bool,
    pub downtime_hours: f64,
}

/// One log line: `{"kind":"alert"|"decision"|"outcome", ...fields}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Alert(Alert),
    Decision(Decision),
    Outcome(Outcome),
}

impl Event {
    pub fn time(&self) -> i64 {
        match self {
            Event::Alert(a) => a.time,
            Event::Decision(d) => d.time,
            Event::Outcome(o) => o.time,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }
}

/// Events in arrival order. Alert ids are unique and every decision refers to
/// an alert recorded before it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
    alert_ids: HashSet<String>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Checks `event` against the log without appending it.
    pub fn check(&self, event: &Event) -> Result<(), KpiError> {
        match event {
            Event::Alert(a) => {
                if a.alert_id.is_empty() {
                    return Err(KpiError::InvalidEvent("alert_id is empty".into()));
                }
                if !a.score.is_finite() {
                    return Err(KpiError::InvalidEvent("alert score is not finite".into()));
                }
                if self.alert_ids.contains(&a.alert_id) {
                    return Err(KpiError::DuplicateAlert {
                        alert_id: a.alert_id.clone(),
                    });
                }
            }
            Event::Decision(d) => {
                if !self.alert_ids.contains(&d.alert_id) {
                    return Err(KpiError::UnknownAlert {
                        alert_id: d.alert_id.clone(),
                    });
                }
            }
            Event::Outcome(o) => {
                if !(o.downtime_hours >= 0.0 && o.downtime_hours.is_finite()) {
                    return Err(KpiError::InvalidEvent(format!(
                        "downtime_hours {} must be a finite non-negative number",
                        o.downtime_hours
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn record_event(&mut self, event: Event) -> Result<(), KpiError> {
        self.check(&event)?;
        if let Event::Alert(a) = &event {
            self.alert_ids.insert(a.alert_id.clone());
        }
        self.events.push(event);
        Ok(())
    }

    pub fn to_ndjson(&self) -> String {
        self.events.iter().map(|e| e.to_json_line() + "\n").collect()
    }
}

/// Replays a newline-delimited JSON log. Blank lines are skipped.
pub fn load_log(reader: impl BufRead) -> Result<EventLog, KpiError> {
    let mut log = EventLog::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |message: String| KpiError::Parse { line: i + 1, message };
        let event: Event = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        log.record_event(event).map_err(|e| parse_err(e.to_string()))?;
    }
    Ok(log)
}

pub fn load_log_file(path: impl AsRef<Path>) -> Result<EventLog, KpiError> {
    let file = std::fs::File::open(path)?;
    load_log(std::io::BufReader::new(file))
}
