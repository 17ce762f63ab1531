//! Synthetic stand-in fleet telemetry.
//!
//! The channel list and dynamics here are illustrative, not a model of any
//! real turbine fleet. Failure episodes arrive fleet-wide as a Poisson process
//! at `failure_rate_per_month` (a month is 30 days). During the label window
//! before each failure the brake channels drift toward a worn state and rows
//! are labeled 1; every other row is labeled 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use super::{DataError, Dataset, EntityRow};
use crate::features::{FeatureCatalog, FeatureInfo, Transform, TransformSpec, ValueType};

const DAY: i64 = 86_400;
const DAYS_PER_MONTH: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticParams {
    pub n_turbines: usize,
    pub n_days: usize,
    pub readings_per_day: usize,
    /// Expected failures per 30 days across the whole fleet.
    pub failure_rate_per_month: f64,
    pub seed: u64,
    pub label_window_days: f64,
    /// Epoch seconds of the first reading.
    pub start_time: i64,
    /// Probability that any one sensor reading is dropped.
    pub missing_rate: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            n_turbines: 10,
            n_days: 60,
            readings_per_day: 4,
            failure_rate_per_month: 1.0,
            seed: 7,
            label_window_days: 14.0,
            start_time: 1_700_000_000,
            missing_rate: 0.01,
        }
    }
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: &str| Err(DataError::Params(m.to_string()));
        if self.n_turbines < 1 || self.n_days < 1 || self.readings_per_day < 1 {
            return bad("n_turbines, n_days and readings_per_day must be at least 1");
        }
        if self.readings_per_day > DAY as usize {
            return bad("readings_per_day exceeds one reading per second");
        }
        if !self.failure_rate_per_month.is_finite() || self.failure_rate_per_month <= 0.0 {
            return bad("failure_rate_per_month must be positive");
        }
        if self.label_window_days.is_nan() || self.label_window_days <= 0.0 {
            return bad("label_window_days must be positive");
        }
        if !(0.0..1.0).contains(&self.missing_rate) {
            return bad("missing_rate must lie in [0, 1)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureEpisode {
    pub entity_id: String,
    /// Epoch seconds of the failure.
    pub failure_time: i64,
}

#[derive(Debug, Clone)]
pub struct SyntheticFleet {
    pub dataset: Dataset,
    pub episodes: Vec<FailureEpisode>,
    pub label_window_secs: i64,
}

/// Channels the generator knows how to simulate. Columns with other names get
/// generic noise of their type.
#[derive(Clone, Copy)]
enum Channel {
    BrakeCaliperTemp,
    BrakePadThickness,
    BrakePressure,
    GearboxOilTemp,
    GeneratorBearingTempK,
    NacelleTemp,
    AmbientTemp,
    RotorSpeed,
    WindSpeed,
    VibX,
    VibY,
    VibZ,
    Mode(usize),
    TurbineModel,
    Other(ValueType),
}

impl Channel {
    fn for_column(info: &FeatureInfo) -> Self {
        match info.name.as_str() {
            "brake_caliper_temp" => Channel::BrakeCaliperTemp,
            "brake_pad_thickness" => Channel::BrakePadThickness,
            "brake_pressure" => Channel::BrakePressure,
            "gearbox_oil_temp" => Channel::GearboxOilTemp,
            "generator_bearing_temp_k" => Channel::GeneratorBearingTempK,
            "nacelle_temp" => Channel::NacelleTemp,
            "ambient_temp" => Channel::AmbientTemp,
            "rotor_speed" => Channel::RotorSpeed,
            "wind_speed" => Channel::WindSpeed,
            "vib_x" => Channel::VibX,
            "vib_y" => Channel::VibY,
            "vib_z" => Channel::VibZ,
            "mode_normal" => Channel::Mode(0),
            "mode_curtailed" => Channel::Mode(1),
            "mode_maintenance" => Channel::Mode(2),
            "turbine_model" => Channel::TurbineModel,
            _ => Channel::Other(info.value_type),
        }
    }

    fn is_sensor(self) -> bool {
        !matches!(self, Channel::Mode(_) | Channel::TurbineModel)
    }
}

/// Shared physical state of one reading.
struct Conditions {
    ambient: f64,
    wind: f64,
    rotor: f64,
    mode: usize,
}

pub fn generate_synthetic(params: &SyntheticParams, catalog: &FeatureCatalog) -> Result<SyntheticFleet, DataError> {
    params.validate()?;
    let width = params.n_turbines.to_string().len().max(2);
    let ids: Vec<String> = (1..=params.n_turbines).map(|i| format!("T{i:0width$}")).collect();
    let window = (params.label_window_days * DAY as f64).round() as i64;
    let episodes = failure_episodes(params, &ids);

    let channels: Vec<Channel> = catalog.features().iter().map(Channel::for_column).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let interval = DAY / params.readings_per_day as i64;

    let mut rows = Vec::with_capacity(params.n_turbines * params.n_days * params.readings_per_day);
    for (ti, entity_id) in ids.iter().enumerate() {
        let pad_base = 18.0 + 1.5 * std_normal.sample(&mut rng);
        let own: Vec<i64> = episodes
            .iter()
            .filter(|e| e.entity_id == *entity_id)
            .map(|e| e.failure_time)
            .collect();
        for day in 0..params.n_days {
            for k in 0..params.readings_per_day {
                let t = params.start_time + day as i64 * DAY + k as i64 * interval;
                // strongest drift among the failures this reading precedes
                let progress = own
                    .iter()
                    .filter(|&&f| t < f && t >= f - window)
                    .map(|&f| 1.0 - (f - t) as f64 / window as f64)
                    .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))));
                let hour = (t - params.start_time).rem_euclid(DAY) as f64 / 3600.0;

                let mode_draw: f64 = rng.gen();
                let mode = if mode_draw < 0.85 {
                    0
                } else if mode_draw < 0.97 {
                    1
                } else {
                    2
                };
                let ambient =
                    12.0 + 6.0 * (std::f64::consts::TAU * (hour - 9.0) / 24.0).sin() + std_normal.sample(&mut rng);
                let wind = (8.0 + 2.5 * std_normal.sample(&mut rng)).max(0.0);
                let curtail = if mode == 1 {
                    0.6
                } else if mode == 2 {
                    0.0
                } else {
                    1.0
                };
                let rotor = ((1.6 * wind).min(16.0) * curtail + 0.5 * std_normal.sample(&mut rng)).max(0.0);
                let cond = Conditions {
                    ambient,
                    wind,
                    rotor,
                    mode,
                };
                let drift = progress.unwrap_or(0.0);

                let mut values = Vec::with_capacity(channels.len());
                for &ch in &channels {
                    let noise = std_normal.sample(&mut rng);
                    let drop: f64 = rng.gen();
                    let v = channel_value(ch, &cond, noise, drift, pad_base, day, ti);
                    let v = (v * 100.0).round() / 100.0;
                    values.push(if ch.is_sensor() && drop < params.missing_rate {
                        None
                    } else {
                        Some(v)
                    });
                }
                rows.push(EntityRow {
                    entity_id: entity_id.clone(),
                    row_id: t,
                    values,
                    label: Some(progress.is_some()),
                });
            }
        }
    }
    Ok(SyntheticFleet {
        dataset: Dataset::new(catalog, rows)?,
        episodes,
        label_window_secs: window,
    })
}

fn channel_value(
    ch: Channel,
    c: &Conditions,
    noise: f64,
    drift: f64,
    pad_base: f64,
    day: usize,
    turbine: usize,
) -> f64 {
    match ch {
        Channel::BrakeCaliperTemp => 40.0 + 0.5 * c.ambient + 2.0 * noise + 25.0 * drift,
        Channel::BrakePadThickness => pad_base - 0.01 * day as f64 + 0.2 * noise - 6.0 * drift,
        Channel::BrakePressure => 120.0 + 4.0 * noise - 15.0 * drift,
        Channel::GearboxOilTemp => 55.0 + 0.5 * c.ambient + 0.4 * c.rotor + 1.5 * noise,
        Channel::GeneratorBearingTempK => 333.15 + 0.3 * c.ambient + 0.5 * c.rotor + 1.5 * noise,
        Channel::NacelleTemp => c.ambient + 15.0 + noise,
        Channel::AmbientTemp => c.ambient,
        Channel::RotorSpeed => c.rotor,
        Channel::WindSpeed => c.wind,
        Channel::VibX | Channel::VibY => 2.0 + 0.05 * c.wind + 0.3 * noise,
        Channel::VibZ => 1.5 + 0.2 * noise + 1.5 * drift,
        Channel::Mode(m) => f64::from(u8::from(c.mode == m)),
        Channel::TurbineModel => (turbine % 3) as f64,
        Channel::Other(ValueType::Numeric) => noise,
        Channel::Other(ValueType::Boolean) => f64::from(u8::from(noise > 0.0)),
        Channel::Other(ValueType::Categorical) => 0.0,
    }
}

/// Fleet-wide Poisson arrivals. Inter-arrival draws come from their own
/// stream and do not depend on the rate, so raising the rate only compresses
/// the same arrival sequence in time.
fn failure_episodes(params: &SyntheticParams, ids: &[String]) -> Vec<FailureEpisode> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    let mut episodes = Vec::new();
    let mut cumulative = 0.0;
    loop {
        let gap: f64 = Exp1.sample(&mut rng);
        let turbine = rng.gen_range(0..ids.len());
        cumulative += gap;
        let day = cumulative / params.failure_rate_per_month * DAYS_PER_MONTH;
        if day >= params.n_days as f64 {
            break;
        }
        episodes.push(FailureEpisode {
            entity_id: ids[turbine].clone(),
            failure_time: params.start_time + (day * DAY as f64).floor() as i64,
        });
    }
    episodes
}

/// The stand-in catalog the generator is designed around.
pub fn synthetic_catalog() -> FeatureCatalog {
    use ValueType::*;
    let f = |name: &str, display: &str, category: &str, ty: ValueType, unit: &str| FeatureInfo {
        name: name.into(),
        display_name: display.into(),
        category: category.into(),
        value_type: ty,
        unit: Some(unit.to_string()).filter(|u| !u.is_empty()),
    };
    FeatureCatalog::new(vec![
        f(
            "brake_caliper_temp",
            "Brake caliper temperature",
            "Brakes",
            Numeric,
            "°C",
        ),
        f("brake_pad_thickness", "Brake pad thickness", "Brakes", Numeric, "mm"),
        f("brake_pressure", "Brake hydraulic pressure", "Brakes", Numeric, "bar"),
        f(
            "gearbox_oil_temp",
            "Gearbox oil temperature",
            "Drivetrain",
            Numeric,
            "°C",
        ),
        f(
            "generator_bearing_temp_k",
            "Generator bearing temperature",
            "Drivetrain",
            Numeric,
            "°C",
        ),
        f("nacelle_temp", "Nacelle temperature", "Environment", Numeric, "°C"),
        f("ambient_temp", "Outside air temperature", "Environment", Numeric, "°C"),
        f("rotor_speed", "Rotor speed", "Operation", Numeric, "rpm"),
        f("wind_speed", "Wind speed", "Environment", Numeric, "m/s"),
        f("vib_x", "Nacelle vibration (fore-aft)", "Vibration", Numeric, "mm/s"),
        f("vib_y", "Nacelle vibration (side-side)", "Vibration", Numeric, "mm/s"),
        f("vib_z", "Brake assembly vibration", "Vibration", Numeric, "mm/s"),
        f("mode_normal", "Mode: normal", "Operation", Boolean, ""),
        f("mode_curtailed", "Mode: curtailed", "Operation", Boolean, ""),
        f("mode_maintenance", "Mode: maintenance", "Operation", Boolean, ""),
        f("turbine_model", "Turbine model", "Asset", Categorical, ""),
    ])
}

/// Display transforms matching [`synthetic_catalog`]: the operating-mode
/// indicators become one feature and the bearing temperature is shown in °C.
pub fn synthetic_transforms() -> TransformSpec {
    TransformSpec {
        transforms: vec![
            Transform::OneHotGroup {
                name: "operating_mode".into(),
                columns: vec!["mode_normal".into(), "mode_curtailed".into(), "mode_maintenance".into()],
                display_name: Some("Operating mode".into()),
                category: Some("Operation".into()),
            },
            Transform::Affine {
                column: "generator_bearing_temp_k".into(),
                scale: 1.0,
                offset: -273.15,
            },
        ],
    }
}
