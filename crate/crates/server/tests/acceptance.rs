//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Run with `cargo test -p brakewatch-server --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use axum::http::StatusCode;
use brakewatch_core::data::{
    generate_synthetic, synthetic_catalog, synthetic_transforms, Dataset, EntityRow, SyntheticParams,
};
use brakewatch_core::explain::{
    compare_rows, dataset_contributions, feature_distribution, global_importance, local_contributions,
    nearest_neighbors, sample_background, shapley_oracle, DistanceConfig, ImportanceMethod,
};
use brakewatch_core::features::{FeatureCatalog, FeatureInfo, ValueType};
use brakewatch_core::kpi::{
    baseline_report, kpi_alert_followup_rate, kpi_total_downtime, Alert, Decision, Event, EventLog, Outcome, Window,
};
use brakewatch_core::model::{
    dense, save_model, train_matrix, train_reference, TrainParams, Tree, TreeEnsemble, TreeNode,
};
use brakewatch_core::testkit::{random_ensemble, random_rows, ModelShape};
use brakewatch_server::{router, AppConfig, AppState};
use common::{call, call_json, fixture, row_body, T0};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Verdict + 'a>);

/// method, uri, body, expected field, expected status
type Rejection<'a> = (&'a str, &'a str, Option<&'a str>, Option<&'a str>, StatusCode);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn numeric_catalog(n: usize) -> FeatureCatalog {
    catalog_of(&vec![ValueType::Numeric; n])
}

fn catalog_of(types: &[ValueType]) -> FeatureCatalog {
    FeatureCatalog::new(
        types
            .iter()
            .enumerate()
            .map(|(i, &t)| FeatureInfo {
                name: format!("f{i}"),
                display_name: format!("Feature {i}"),
                category: "test".into(),
                value_type: t,
                unit: None,
            })
            .collect(),
    )
}

/// The 500-row synthetic fleet with a model trained on it.
fn fleet_500() -> (Dataset, TreeEnsemble) {
    let params = SyntheticParams {
        n_turbines: 5,
        n_days: 25,
        readings_per_day: 4,
        failure_rate_per_month: 3.0,
        ..Default::default()
    };
    let fleet = generate_synthetic(&params, &synthetic_catalog()).unwrap();
    let model = train_reference(&fleet.dataset, &TrainParams::default()).unwrap();
    (fleet.dataset, model)
}

fn oracle_equivalence() -> Verdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let shape = ModelShape::default();
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let model = random_ensemble(&mut rng, shape);
        let n_bg = rng.gen_range(1..=8);
        let background = random_rows(&mut rng, n_bg, shape.n_features);
        let row = random_rows(&mut rng, 1, shape.n_features).remove(0);
        let fast = local_contributions(&model, &row, &background).map_err(|e| e.to_string())?;
        let slow = shapley_oracle(&model, &row, &background).map_err(|e| e.to_string())?;
        for (i, (a, b)) in fast.contributions.iter().zip(&slow.contributions).enumerate() {
            worst = worst.max((a - b).abs());
            ensure((a - b).abs() <= 1e-10, || {
                format!("trial {trial} feature {i}: {a} vs {b}")
            })?;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("200 trials, max |diff| {worst:.1e}, {secs:.2} s"))
}

fn local_accuracy(rt: &tokio::runtime::Runtime) -> Verdict {
    let (dataset, model) = fleet_500();
    ensure(dataset.len() == 500, || format!("{} rows", dataset.len()))?;
    let background = sample_background(&dataset, 64, 0);
    let sets = dataset_contributions(&model, &dataset, &background).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (set, row) in sets.iter().zip(dataset.rows()) {
        let margin = model.predict_margin(&row.values).unwrap();
        let gap = (set.base_value + set.contributions.iter().sum::<f64>() - margin).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-8, || format!("{}@{}: gap {gap:e}", row.entity_id, row.row_id))?;
    }

    let state = AppState::from_parts(
        AppConfig::with_paths("model.json", "dataset.csv", "catalog.csv"),
        model,
        &synthetic_catalog(),
        &synthetic_transforms(),
        dataset.clone(),
        EventLog::new(),
    )
    .map_err(|e| e.to_string())?;
    let app = router(state);
    let mut wire_worst: f64 = 0.0;
    rt.block_on(async {
        for row in dataset.rows() {
            let (status, v) = call_json(
                &app,
                "POST",
                "/api/v1/contributions",
                Some(&row_body(&row.entity_id, row.row_id)),
            )
            .await;
            ensure(status == StatusCode::OK, || format!("status {status}"))?;
            let total: f64 = v["contributions"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c["contribution"].as_f64().unwrap())
                .sum();
            let gap = (v["base_value"].as_f64().unwrap() + total - v["predicted_margin"].as_f64().unwrap()).abs();
            wire_worst = wire_worst.max(gap);
            ensure(gap <= 1e-8, || {
                format!("wire {}@{}: gap {gap:e}", row.entity_id, row.row_id)
            })?;
        }
        Ok::<(), String>(())
    })?;
    Ok(format!(
        "500 rows, max gap {worst:.1e}; 500 responses, max gap {wire_worst:.1e}"
    ))
}

fn dummy_and_symmetry() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut dummies = 0;
    for _ in 0..200 {
        let model = random_ensemble(
            &mut rng,
            ModelShape {
                max_used_features: 6,
                ..Default::default()
            },
        );
        let background = random_rows(&mut rng, 4, 12);
        let row = random_rows(&mut rng, 1, 12).remove(0);
        let fast = local_contributions(&model, &row, &background).unwrap();
        let slow = shapley_oracle(&model, &row, &background).unwrap();
        for (i, used) in model.used_features().into_iter().enumerate() {
            if !used {
                dummies += 1;
                ensure(fast.contributions[i] == 0.0 && slow.contributions[i] == 0.0, || {
                    format!("unused feature {i} got {}", fast.contributions[i])
                })?;
            }
        }
    }
    let leaf_only = TreeEnsemble::new(vec![Tree::new(0, vec![TreeNode::leaf(0, 1.5)]).unwrap()], 0.0, 3).unwrap();
    let c = shapley_oracle(&leaf_only, &dense(&[1.0, 2.0, 3.0]), &[dense(&[0.0, 0.0, 0.0])]).unwrap();
    ensure(c.contributions.iter().all(|&p| p == 0.0), || {
        "leaf-only model has nonzero attributions".into()
    })?;

    // f depends on x0, x1 only through how many are >= 0
    let sym = TreeEnsemble::new(
        vec![
            Tree::new(
                0,
                vec![
                    TreeNode::split(0, 0, 0.0, 1, 2),
                    TreeNode::split(1, 1, 0.0, 3, 4),
                    TreeNode::split(2, 1, 0.0, 5, 6),
                    TreeNode::leaf(3, -1.25),
                    TreeNode::leaf(4, 0.7),
                    TreeNode::leaf(5, 0.7),
                    TreeNode::leaf(6, 2.1),
                ],
            )
            .unwrap(),
            Tree::new(
                1,
                vec![
                    TreeNode::split(0, 1, 0.5, 1, 2),
                    TreeNode::split(1, 0, 0.5, 3, 4),
                    TreeNode::split(2, 0, 0.5, 5, 6),
                    TreeNode::leaf(3, 0.0),
                    TreeNode::leaf(4, 0.3),
                    TreeNode::leaf(5, 0.3),
                    TreeNode::leaf(6, -0.4),
                ],
            )
            .unwrap(),
        ],
        0.1,
        2,
    )
    .unwrap();
    let mut checked = 0;
    for _ in 0..100 {
        let mut bg = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let (p, q) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            bg.push(dense(&[p, q]));
            bg.push(dense(&[q, p]));
        }
        let v = rng.gen_range(-2.0..2.0);
        let w = rng.gen_range(-2.0..2.0);
        for explain in [local_contributions, shapley_oracle] {
            let same = explain(&sym, &dense(&[v, v]), &bg).unwrap();
            ensure((same.contributions[0] - same.contributions[1]).abs() <= 1e-12, || {
                format!("symmetric features differ: {:?}", same.contributions)
            })?;
            let a = explain(&sym, &dense(&[v, w]), &bg).unwrap();
            let b = explain(&sym, &dense(&[w, v]), &bg).unwrap();
            ensure(
                (a.contributions[0] - b.contributions[1]).abs() <= 1e-12
                    && (a.contributions[1] - b.contributions[0]).abs() <= 1e-12,
                || "swapping symmetric features did not swap attributions".into(),
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "{dummies} unused-feature attributions exactly 0; {checked} symmetric cases"
    ))
}

fn knn_oracle(ds: &Dataset, query: &[Option<f64>], k: usize, cfg: &DistanceConfig) -> Vec<(String, i64, f64)> {
    let n = ds.n_features();
    let subset: Vec<usize> = cfg.features.clone().unwrap_or_else(|| {
        (0..n)
            .filter(|&i| ds.value_types()[i] != ValueType::Categorical)
            .collect()
    });
    let mut scored: Vec<(String, i64, f64)> = ds
        .rows()
        .iter()
        .map(|r| {
            let total: f64 = subset
                .iter()
                .map(|&i| {
                    let w = cfg.weights.get(&i).copied().unwrap_or(1.0);
                    let t = match (query[i], r.values[i]) {
                        (None, None) => 0.0,
                        (None, _) | (_, None) => 1.0,
                        (Some(x), Some(y)) if ds.value_types()[i] == ValueType::Categorical => {
                            f64::from(u8::from(x != y))
                        }
                        (Some(x), Some(y)) if cfg.standardize => match ds.stats()[i] {
                            Some(s) if s.std > 0.0 => ((x - y) / s.std).powi(2),
                            _ => 0.0,
                        },
                        (Some(x), Some(y)) => (x - y).powi(2),
                    };
                    w * t
                })
                .sum();
            (r.entity_id.clone(), r.row_id, total.sqrt())
        })
        .collect();
    scored.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    scored.sort_by(|a, b| a.2.total_cmp(&b.2));
    scored.truncate(k);
    scored
}

fn knn_equivalence() -> Verdict {
    let types = [
        ValueType::Numeric,
        ValueType::Numeric,
        ValueType::Boolean,
        ValueType::Categorical,
        ValueType::Numeric,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let value = |rng: &mut ChaCha8Rng, c: usize| -> Option<f64> {
        if rng.gen_bool(0.05) {
            return None;
        }
        Some(match types[c] {
            ValueType::Boolean => f64::from(u8::from(rng.gen_bool(0.5))),
            ValueType::Categorical => rng.gen_range(0..3) as f64,
            ValueType::Numeric => rng.gen_range(-3..=3) as f64,
        })
    };
    let mut rows = Vec::new();
    for e in (0..7).rev() {
        for t in 0..14 {
            rows.push(EntityRow {
                entity_id: format!("T{e:02}"),
                row_id: T0 + 600 * (13 - t),
                values: (0..5).map(|c| value(&mut rng, c)).collect(),
                label: Some(rng.gen_bool(0.3)),
            });
        }
    }
    let ds = Dataset::new(&catalog_of(&types), rows).unwrap();
    let configs = [
        DistanceConfig::default(),
        DistanceConfig {
            standardize: false,
            ..Default::default()
        },
        DistanceConfig {
            features: Some(vec![1, 3]),
            standardize: false,
            ..Default::default()
        },
        DistanceConfig {
            weights: BTreeMap::from([(0, 3.0), (2, 0.0), (4, 0.5)]),
            ..Default::default()
        },
        DistanceConfig {
            features: Some(vec![0, 1, 2, 3, 4]),
            weights: BTreeMap::from([(3, 2.0)]),
            standardize: true,
        },
    ];
    let mut ties = 0;
    for q in 0..50 {
        let query: Vec<Option<f64>> = if q % 4 == 0 {
            ds.rows()[(q * 7) % ds.len()].values.clone()
        } else {
            (0..5).map(|c| value(&mut rng, c)).collect()
        };
        let k = [1, 2, 5, 12, 1000][q % 5];
        for (ci, cfg) in configs.iter().enumerate() {
            let got: Vec<(String, i64, f64)> = nearest_neighbors(&ds, &query, k, cfg)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|n| (n.row.entity_id, n.row.row_id, n.distance))
                .collect();
            let want = knn_oracle(&ds, &query, k, cfg);
            ties += want.windows(2).filter(|w| w[0].2 == w[1].2).count();
            ensure(got == want, || format!("query {q} config {ci} differs"))?;
        }
    }
    ensure(ties > 0, || "no ties exercised".into())?;

    // explicit tie fixture: equal distances come back in (entity_id, row_id) order
    let tie_rows = [("T02", 5, 1.0), ("T01", 9, -1.0), ("T01", 3, 1.0), ("T03", 1, -1.0)]
        .iter()
        .map(|&(e, t, v)| EntityRow {
            entity_id: e.into(),
            row_id: t,
            values: vec![Some(v)],
            label: None,
        })
        .collect();
    let tie_ds = Dataset::new(&numeric_catalog(1), tie_rows).unwrap();
    let cfg = DistanceConfig {
        standardize: false,
        ..Default::default()
    };
    let order: Vec<(String, i64)> = nearest_neighbors(&tie_ds, &[Some(0.0)], 4, &cfg)
        .unwrap()
        .into_iter()
        .map(|n| (n.row.entity_id, n.row.row_id))
        .collect();
    let want: Vec<(String, i64)> = [("T01", 3), ("T01", 9), ("T02", 5), ("T03", 1)]
        .iter()
        .map(|&(e, t)| (e.to_string(), t))
        .collect();
    ensure(order == want, || format!("tie order {order:?}"))?;
    Ok(format!(
        "50 queries x 5 configs, {ties} tied pairs, tie fixture ordered"
    ))
}

fn type7(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    v[lo] + (h - h.floor()) * (v[hi] - v[lo])
}

fn quartile_oracle() -> Verdict {
    let column = |values: &[Option<f64>]| {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| EntityRow {
                entity_id: "T01".into(),
                row_id: i as i64,
                values: vec![v],
                label: None,
            })
            .collect();
        Dataset::new(&numeric_catalog(1), rows).unwrap()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for sample in 0..100 {
        let n = rng.gen_range(1..80);
        let values: Vec<Option<f64>> = (0..n)
            .map(|_| rng.gen_bool(0.9).then(|| rng.gen_range(-50.0..50.0)))
            .collect();
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let got = feature_distribution(&column(&values), 0);
        if present.is_empty() {
            ensure(got.is_err(), || "all-missing column should not summarize".into())?;
            continue;
        }
        let s = got.map_err(|e| e.to_string())?;
        for (name, g, p) in [
            ("min", s.min, 0.0),
            ("q1", s.q1, 0.25),
            ("median", s.median, 0.5),
            ("q3", s.q3, 0.75),
            ("max", s.max, 1.0),
        ] {
            let diff = (g - type7(&present, p)).abs();
            worst = worst.max(diff);
            ensure(diff <= 1e-12, || {
                format!("sample {sample} {name}: {g} vs {}", type7(&present, p))
            })?;
        }
        ensure(s.count == present.len(), || "count excludes missing values".into())?;
    }
    let five = feature_distribution(&column(&dense(&[1.0, 2.0, 3.0, 4.0, 5.0])), 0).unwrap();
    ensure(
        (five.min, five.q1, five.median, five.q3, five.max) == (1.0, 2.0, 3.0, 4.0, 5.0),
        || format!("{five:?}"),
    )?;
    let four = feature_distribution(&column(&dense(&[1.0, 2.0, 3.0, 4.0])), 0).unwrap();
    ensure((four.q1, four.median, four.q3) == (1.75, 2.5, 3.25), || {
        format!("{four:?}")
    })?;
    Ok(format!("100 samples, max |diff| {worst:.1e}; fixtures exact"))
}

fn trainer_sanity() -> Verdict {
    let rows: Vec<Vec<Option<f64>>> = (0..50).map(|i| vec![Some(f64::from(i) * 0.1)]).collect();
    let labels: Vec<bool> = (0..50).map(|i| i >= 31).collect();
    let refs: Vec<&[Option<f64>]> = rows.iter().map(Vec::as_slice).collect();
    let params = TrainParams {
        n_trees: 5,
        ..Default::default()
    };
    let mut first_perfect = None;
    for rounds in 1..=5 {
        let (model, _) = train_matrix(
            &refs,
            &labels,
            1,
            &TrainParams {
                n_trees: rounds,
                ..params.clone()
            },
        )
        .unwrap();
        let hits = rows
            .iter()
            .zip(&labels)
            .filter(|(r, &y)| (model.predict_proba(r).unwrap() >= 0.5) == y)
            .count();
        if hits == rows.len() {
            first_perfect = Some(rounds);
            break;
        }
    }
    let rounds = first_perfect.ok_or("training accuracy below 1.0 after 5 rounds")?;

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..30 {
        let data = random_rows(&mut rng, 40, 5);
        let y: Vec<bool> = data
            .iter()
            .map(|r| r[0].unwrap_or(0.0) - r[1].unwrap_or(0.0) + rng.gen_range(-1.0..1.0) > 0.0)
            .collect();
        if y.iter().all(|&b| b) || y.iter().all(|&b| !b) {
            continue;
        }
        let refs: Vec<&[Option<f64>]> = data.iter().map(Vec::as_slice).collect();
        let (_, losses) = train_matrix(
            &refs,
            &y,
            5,
            &TrainParams {
                n_trees: 10,
                max_depth: 3,
                ..Default::default()
            },
        )
        .unwrap();
        ensure(losses.windows(2).all(|w| w[1] <= w[0]), || {
            format!("loss increased: {losses:?}")
        })?;
    }

    let (dataset, _) = fleet_500();
    let seeded = TrainParams {
        n_trees: 12,
        seed: 99,
        ..Default::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.json"), dir.path().join("b.json")];
    for p in &paths {
        std::fs::write(p, save_model(&train_reference(&dataset, &seeded).unwrap())).unwrap();
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    ensure(a == b, || "model files differ".into())?;
    Ok(format!(
        "accuracy 1.0 after {rounds} round(s); loss non-increasing on 30 random sets; {} byte model files identical",
        a.len()
    ))
}

fn gain_importance() -> Verdict {
    let tree = |i, gain| {
        Tree::new(
            i,
            vec![
                TreeNode::split(0, 2, 0.0, 1, 2).with_gain(gain),
                TreeNode::leaf(1, -0.5),
                TreeNode::leaf(2, 0.5),
            ],
        )
        .unwrap()
    };
    let model = TreeEnsemble::new(vec![tree(0, 1.5), tree(1, 2.5)], 0.0, 5).unwrap();
    let table = global_importance(
        &model,
        &Dataset::empty(&numeric_catalog(5)),
        &[],
        ImportanceMethod::Gain,
    )
    .map_err(|e| e.to_string())?;
    ensure(table.scores == vec![0.0, 0.0, 1.0, 0.0, 0.0], || {
        format!("{:?}", table.scores)
    })?;
    ensure(table.normalized, || "gain table not marked normalized".into())?;
    Ok("f2 = 1.0, others 0".into())
}

fn compare_consistency() -> Verdict {
    let (dataset, model) = fleet_500();
    let background = sample_background(&dataset, 32, 5);
    let rows = dataset.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..25 {
        let (a, b) = (&rows[rng.gen_range(0..rows.len())], &rows[rng.gen_range(0..rows.len())]);
        let report = compare_rows(&model, a, b, &background).map_err(|e| e.to_string())?;
        let ca = local_contributions(&model, &a.values, &background).unwrap();
        let cb = local_contributions(&model, &b.values, &background).unwrap();
        for (i, f) in report.features.iter().enumerate() {
            ensure(
                f.delta_contribution == cb.contributions[i] - ca.contributions[i],
                || format!("feature {i} delta differs"),
            )?;
        }
        let swapped = compare_rows(&model, b, a, &background).unwrap();
        for (f, g) in report.features.iter().zip(&swapped.features) {
            ensure(f.delta_contribution == -g.delta_contribution, || {
                "swap did not negate deltas".into()
            })?;
        }
    }
    Ok("25 random pairs exact; swaps negate".into())
}

fn kpi_fixtures() -> Verdict {
    let alert = |id: String, time| {
        Event::Alert(Alert {
            alert_id: id,
            entity_id: "T01".into(),
            time,
            score: 0.9,
        })
    };
    let decision = |id: String, time| {
        Event::Decision(Decision {
            alert_id: id,
            investigated: true,
            time,
        })
    };
    let outcome = |time, hours| {
        Event::Outcome(Outcome {
            entity_id: "T01".into(),
            time,
            failed: true,
            downtime_hours: hours,
        })
    };

    let mut log = EventLog::new();
    for i in 0..10 {
        log.record_event(alert(format!("a{i}"), i)).unwrap();
    }
    for i in [0, 4, 9] {
        log.record_event(decision(format!("a{i}"), 100)).unwrap();
    }
    let rate = kpi_alert_followup_rate(&log, Window::new(0, 10).unwrap()).unwrap();
    ensure(rate == Some(0.30), || format!("kpi3 {rate:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let mut random = EventLog::new();
        for _ in 0..rng.gen_range(0..40) {
            random
                .record_event(outcome(
                    rng.gen_range(0..1000),
                    f64::from(rng.gen_range(0..48u32)) * 0.25,
                ))
                .unwrap();
        }
        let a = rng.gen_range(0..400);
        let b = a + rng.gen_range(1..400);
        let c = b + rng.gen_range(1..400);
        let left = kpi_total_downtime(&random, Window::new(a, b).unwrap()).unwrap();
        let right = kpi_total_downtime(&random, Window::new(b, c).unwrap()).unwrap();
        let whole = kpi_total_downtime(&random, Window::new(a, c).unwrap()).unwrap();
        ensure(left + right == whole, || {
            format!("[{a},{b})+[{b},{c}) = {} != {whole}", left + right)
        })?;
    }

    // eval [20,30): 2 alerts, 1 investigated, 6 h; baselines [0,10): 0.2 / 2 h and [10,20): 0.4 / 4 h
    let mut fx = EventLog::new();
    for i in 0..5 {
        fx.record_event(alert(format!("p{i}"), i)).unwrap();
        fx.record_event(alert(format!("q{i}"), 10 + i)).unwrap();
    }
    fx.record_event(alert("r0".into(), 21)).unwrap();
    fx.record_event(alert("r1".into(), 22)).unwrap();
    for id in ["p0", "q0", "q1", "r0"] {
        fx.record_event(decision(id.into(), 25)).unwrap();
    }
    fx.record_event(outcome(5, 2.0)).unwrap();
    fx.record_event(outcome(15, 4.0)).unwrap();
    fx.record_event(outcome(29, 6.0)).unwrap();
    let eval = Window::new(20, 30).unwrap();
    let r = baseline_report(&fx, eval, &[Window::new(0, 10).unwrap(), Window::new(10, 20).unwrap()])
        .map_err(|e| e.to_string())?;
    let d3 = r.deltas.kpi3_alert_followup_rate.ok_or("kpi3 delta undefined")?;
    ensure((d3 - 0.2).abs() < 1e-15, || format!("kpi3 delta {d3}"))?;
    ensure(r.deltas.kpi1_total_downtime_hours == Some(3.0), || {
        format!("kpi1 delta {:?}", r.deltas.kpi1_total_downtime_hours)
    })?;
    ensure(r.deltas.kpi2_investigations == Some(4.0), || {
        format!("kpi2 investigations delta {:?}", r.deltas.kpi2_investigations)
    })?;
    ensure(r.deltas.kpi2_failures == Some(0.0), || "kpi2 failures delta".into())?;
    let same = baseline_report(&fx, eval, &[eval]).unwrap();
    ensure(
        [
            same.deltas.kpi1_total_downtime_hours,
            same.deltas.kpi2_failures,
            same.deltas.kpi2_investigations,
            same.deltas.kpi3_alert_followup_rate,
        ]
        .iter()
        .all(|d| *d == Some(0.0)),
        || "identity baseline deltas not 0".into(),
    )?;
    let err = baseline_report(&fx, eval, &[Window::new(0, 11).unwrap()]);
    ensure(
        err.as_ref().is_err_and(|e| e.to_string().contains("baseline window 0")),
        || format!("{err:?}"),
    )?;
    Ok("kpi3 = 0.30; 200 additivity checks; baseline deltas and length check".into())
}

fn service_contract(rt: &tokio::runtime::Runtime) -> Verdict {
    let fx = fixture();
    let app = &fx.app;
    let row = row_body("T01", T0 + 21_600);
    let other = row_body("T02", T0);
    rt.block_on(async {
        let endpoints: Vec<(&str, String, Option<String>, StatusCode)> = vec![
            ("GET", "/api/v1/entities".into(), None, StatusCode::OK),
            ("GET", "/api/v1/entities/T01/rows".into(), None, StatusCode::OK),
            ("GET", "/api/v1/features".into(), None, StatusCode::OK),
            ("POST", "/api/v1/predict".into(), Some(row.clone()), StatusCode::OK),
            (
                "POST",
                "/api/v1/contributions".into(),
                Some(row.clone()),
                StatusCode::OK,
            ),
            (
                "POST",
                "/api/v1/similar".into(),
                Some(format!(r#"{{"entity_id":"T01","row_id":{},"k":3}}"#, T0 + 21_600)),
                StatusCode::OK,
            ),
            (
                "POST",
                "/api/v1/compare".into(),
                Some(format!(r#"{{"a":{row},"b":{other}}}"#)),
                StatusCode::OK,
            ),
            ("GET", "/api/v1/importance?method=gain".into(), None, StatusCode::OK),
            (
                "GET",
                "/api/v1/importance?method=mean_abs_shap".into(),
                None,
                StatusCode::OK,
            ),
            (
                "GET",
                "/api/v1/importance?method=signed_mean_shap".into(),
                None,
                StatusCode::OK,
            ),
            (
                "GET",
                "/api/v1/feature/brake_caliper_temp/scatter".into(),
                None,
                StatusCode::OK,
            ),
            (
                "GET",
                "/api/v1/feature/brake_caliper_temp/distribution".into(),
                None,
                StatusCode::OK,
            ),
            (
                "GET",
                format!(
                    "/api/v1/kpi/report?start={T0}&end={}&baselines={}:{T0}",
                    T0 + 86_400,
                    T0 - 86_400
                ),
                None,
                StatusCode::OK,
            ),
        ];
        for (method, uri, body, want) in &endpoints {
            let first = call(app, method, uri, body.as_deref()).await;
            ensure(first.0 == *want, || format!("{method} {uri}: {}", first.0))?;
            let again = call(app, method, uri, body.as_deref()).await;
            ensure(again == first, || format!("{method} {uri}: repeated read differs"))?;
        }
        let (s, v) = call_json(
            app,
            "POST",
            "/api/v1/events",
            Some(r#"{"kind":"alert","alert_id":"x1","entity_id":"T01","time":1700000100,"score":0.5}"#),
        )
        .await;
        ensure(s == StatusCode::CREATED, || format!("events: {s} {v}"))?;
        let (s, _) = call_json(
            app,
            "POST",
            "/api/v1/events",
            Some(r#"{"kind":"alert","alert_id":"x1","entity_id":"T01","time":1700000100,"score":0.5}"#),
        )
        .await;
        ensure(s == StatusCode::CONFLICT, || format!("duplicate alert: {s}"))?;

        let (_, c) = call_json(app, "POST", "/api/v1/contributions", Some(&row)).await;
        let total: f64 = c["contributions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["contribution"].as_f64().unwrap())
            .sum();
        let gap = (c["base_value"].as_f64().unwrap() + total - c["predicted_margin"].as_f64().unwrap()).abs();
        ensure(gap <= 1e-8, || format!("contribution response gap {gap:e}"))?;
        let (_, s) = call_json(
            app,
            "POST",
            "/api/v1/similar",
            Some(&format!(r#"{{"entity_id":"T01","row_id":{},"k":3}}"#, T0 + 21_600)),
        )
        .await;
        let d: Vec<f64> = s["neighbors"]
            .as_array()
            .unwrap()
            .iter()
            .map(|n| n["distance"].as_f64().unwrap())
            .collect();
        ensure(d.len() == 3 && d.windows(2).all(|w| w[0] <= w[1]), || {
            format!("similar distances {d:?}")
        })?;

        let bad: [Rejection; 6] = [
            (
                "POST",
                "/api/v1/similar",
                Some(r#"{"entity_id":"T01","row_id":1700000000,"k":0}"#),
                Some("k"),
                StatusCode::BAD_REQUEST,
            ),
            (
                "POST",
                "/api/v1/predict",
                Some(r#"{"entity_id":"T01","row_id":1700000000,"foo":1}"#),
                Some("foo"),
                StatusCode::BAD_REQUEST,
            ),
            (
                "POST",
                "/api/v1/contributions",
                Some(r#"{"entity_id":"T01"}"#),
                Some("row_id"),
                StatusCode::BAD_REQUEST,
            ),
            (
                "POST",
                "/api/v1/compare",
                Some("not json"),
                None,
                StatusCode::BAD_REQUEST,
            ),
            (
                "GET",
                "/api/v1/importance?method=nope",
                None,
                Some("method"),
                StatusCode::BAD_REQUEST,
            ),
            (
                "POST",
                "/api/v1/contributions",
                Some(r#"{"entity_id":"T01","row_id":7}"#),
                None,
                StatusCode::NOT_FOUND,
            ),
        ];
        for (method, uri, body, field, status) in bad {
            let (s, v) = call_json(app, method, uri, body).await;
            ensure(s == status, || format!("{uri} {body:?}: {s}"))?;
            ensure(
                v["error"].is_string() && v.get("field").and_then(Value::as_str) == field,
                || format!("{uri}: body {v}"),
            )?;
            if status == StatusCode::NOT_FOUND {
                ensure(v["entity_id"] == "T01" && v["row_id"] == 7, || format!("404 body {v}"))?;
            }
        }
        Ok(format!(
            "{} endpoint calls plus events, repeated reads identical, 6 rejections structured; no UI build involved",
            endpoints.len()
        ))
    })
}

fn main() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let criteria: Vec<Criterion> = vec![
        (
            "Shapley oracle equivalence (200 trials, 1e-10)",
            Box::new(oracle_equivalence),
        ),
        (
            "Local accuracy (500 rows and /contributions, 1e-8)",
            Box::new(|| local_accuracy(&rt)),
        ),
        ("Dummy and symmetry axioms (exact, 1e-12)", Box::new(dummy_and_symmetry)),
        (
            "kNN equivalence (50 queries x 5 configs, ties)",
            Box::new(knn_equivalence),
        ),
        (
            "Quartile oracle (100 samples, 1e-12; fixtures exact)",
            Box::new(quartile_oracle),
        ),
        (
            "Trainer sanity (separable data, loss, determinism)",
            Box::new(trainer_sanity),
        ),
        ("Gain importance fixture", Box::new(gain_importance)),
        (
            "Compare consistency (exact, swap negates)",
            Box::new(compare_consistency),
        ),
        ("KPI fixtures (rate, additivity, baselines)", Box::new(kpi_fixtures)),
        (
            "Service contract (endpoints, strict 400s, idempotent reads)",
            Box::new(|| service_contract(&rt)),
        ),
    ];
    // panics become FAIL lines; the default hook would interleave backtraces
    std::panic::set_hook(Box::new(|_| {}));
    let total = criteria.len();
    let mut failed = 0;
    for (name, run) in criteria {
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        match verdict {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of {total} criteria passed", total - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
