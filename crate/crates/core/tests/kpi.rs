use brakewatch_core::kpi::{
    baseline_report, kpi_alert_followup_rate, kpi_total_downtime, Alert, Decision, Event, EventLog, KpiError, Outcome,
    Window,
};
use proptest::prelude::*;

fn alert(id: &str, time: i64) -> Event {
    Event::Alert(Alert {
        alert_id: id.into(),
        entity_id: "T01".into(),
        time,
        score: 0.8,
    })
}

fn decision(id: &str, investigated: bool, time: i64) -> Event {
    Event::Decision(Decision {
        alert_id: id.into(),
        investigated,
        time,
    })
}

fn outcome(time: i64, failed: bool, hours: f64) -> Event {
    Event::Outcome(Outcome {
        entity_id: "T02".into(),
        time,
        failed,
        downtime_hours: hours,
    })
}

#[test]
fn ten_alerts_three_investigated() {
    let mut log = EventLog::new();
    for i in 0..10 {
        log.record_event(alert(&format!("a{i}"), 100 + i)).unwrap();
    }
    for i in [1, 4, 7] {
        log.record_event(decision(&format!("a{i}"), true, 500)).unwrap();
    }
    log.record_event(decision("a2", false, 120)).unwrap();
    let w = Window::new(0, 200).unwrap();
    assert_eq!(kpi_alert_followup_rate(&log, w).unwrap(), Some(0.30));
    assert_eq!(
        kpi_alert_followup_rate(&log, Window::new(200, 300).unwrap()).unwrap(),
        None
    );
}

#[test]
fn baseline_deltas_on_hand_computed_fixture() {
    // eval [200,300): 2 alerts, 1 investigated, downtime 5, 1 failure
    // base [0,100): 5 alerts, 1 investigated, downtime 2
    // base [100,200): 5 alerts, 2 investigated, downtime 8, 2 failures
    let mut log = EventLog::new();
    for i in 0..5 {
        log.record_event(alert(&format!("p{i}"), 10 + i)).unwrap();
        log.record_event(alert(&format!("q{i}"), 110 + i)).unwrap();
    }
    log.record_event(alert("r0", 210)).unwrap();
    log.record_event(alert("r1", 220)).unwrap();
    log.record_event(decision("p0", true, 20)).unwrap();
    log.record_event(decision("q0", true, 120)).unwrap();
    log.record_event(decision("q1", true, 130)).unwrap();
    log.record_event(decision("r1", true, 230)).unwrap();
    log.record_event(outcome(50, false, 2.0)).unwrap();
    log.record_event(outcome(150, true, 3.0)).unwrap();
    log.record_event(outcome(160, true, 5.0)).unwrap();
    log.record_event(outcome(250, true, 5.0)).unwrap();

    let eval = Window::new(200, 300).unwrap();
    let bases = [Window::new(0, 100).unwrap(), Window::new(100, 200).unwrap()];
    let r = baseline_report(&log, eval, &bases).unwrap();
    assert_eq!(r.evaluation.kpi1_total_downtime_hours, 5.0);
    assert_eq!(r.evaluation.kpi3_alert_followup_rate, Some(0.5));
    assert_eq!(r.baseline_mean.kpi1_total_downtime_hours, Some(5.0));
    assert_eq!(r.deltas.kpi1_total_downtime_hours, Some(0.0));
    assert_eq!(r.baseline_mean.kpi2_failures, Some(1.0));
    assert_eq!(r.deltas.kpi2_failures, Some(0.0));
    assert_eq!(r.baseline_mean.kpi2_investigations, Some(1.5));
    assert_eq!(r.deltas.kpi2_investigations, Some(-0.5));
    let mean_rate = r.baseline_mean.kpi3_alert_followup_rate.unwrap();
    assert!((mean_rate - 0.3).abs() < 1e-15);
    assert!((r.deltas.kpi3_alert_followup_rate.unwrap() - 0.2).abs() < 1e-15);

    let same = baseline_report(&log, eval, &[eval]).unwrap();
    assert_eq!(same.deltas.kpi1_total_downtime_hours, Some(0.0));
    assert_eq!(same.deltas.kpi2_failures, Some(0.0));
    assert_eq!(same.deltas.kpi2_investigations, Some(0.0));
    assert_eq!(same.deltas.kpi3_alert_followup_rate, Some(0.0));

    let err = baseline_report(&log, eval, &[bases[0], Window::new(0, 99).unwrap()]).unwrap_err();
    assert!(matches!(err, KpiError::Argument(_)));
    assert!(err.to_string().contains("baseline window 1"), "{err}");
}

fn arb_log() -> impl Strategy<Value = EventLog> {
    prop::collection::vec((0i64..1000, any::<bool>(), 0u32..40, any::<bool>()), 0..60).prop_map(|items| {
        let mut log = EventLog::new();
        for (i, (t, failed, quarters, is_alert)) in items.into_iter().enumerate() {
            if is_alert {
                log.record_event(alert(&format!("a{i}"), t)).unwrap();
            } else {
                log.record_event(outcome(t, failed, f64::from(quarters) * 0.25))
                    .unwrap();
            }
        }
        log
    })
}

proptest! {
    #[test]
    fn downtime_is_additive_over_adjacent_windows(log in arb_log(), a in 0i64..300, ab in 1i64..400, bc in 1i64..400) {
        let (b, c) = (a + ab, a + ab + bc);
        let left = kpi_total_downtime(&log, Window::new(a, b).unwrap()).unwrap();
        let right = kpi_total_downtime(&log, Window::new(b, c).unwrap()).unwrap();
        let whole = kpi_total_downtime(&log, Window::new(a, c).unwrap()).unwrap();
        // quarter-hour durations sum exactly
        prop_assert_eq!(left + right, whole);
    }

    #[test]
    fn investigating_never_lowers_followup(log in arb_log(), pick in any::<prop::sample::Index>(), when in 0i64..2000) {
        let w = Window::new(100, 700).unwrap();
        let in_window: Vec<String> = log.events().iter().filter_map(|e| match e {
            Event::Alert(a) if w.contains(a.time) => Some(a.alert_id.clone()),
            _ => None,
        }).collect();
        prop_assume!(!in_window.is_empty());
        let before = kpi_alert_followup_rate(&log, w).unwrap().unwrap();
        let mut more = log.clone();
        more.record_event(decision(pick.get(&in_window), true, when)).unwrap();
        let after = kpi_alert_followup_rate(&more, w).unwrap().unwrap();
        prop_assert!(after >= before);
        prop_assert!((0.0..=1.0).contains(&after));
    }
}
