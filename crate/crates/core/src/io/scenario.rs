//! Scenario files: a strict JSON schema (see `docs/scenario.schema.json`).

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::forecast::{ForecastDistribution, DEFAULT_VARIANCE_COEFFICIENT};
use crate::provider::{DispatchableUnit, UnitKind};
use crate::vg::{PenaltyFactors, VgSchedule};

use super::series::{load_series, UnitTag};

/// Per-hour numbers, either inline or in a `hour,value` CSV next to the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesSource {
    Inline(Vec<f64>),
    File { file: PathBuf },
}

/// A single number for every hour, or one per hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HourlyValue {
    Constant(f64),
    PerHour(SeriesSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BrsPriceModel {
    /// $/MW for each side.
    Absolute { down: f64, up: f64 },
    /// Fraction of the hour's day-ahead price for each side.
    Ratio { down: f64, up: f64 },
}

impl BrsPriceModel {
    pub fn prices(&self, da_price: f64) -> (f64, f64) {
        match *self {
            BrsPriceModel::Absolute { down, up } => (down, up),
            BrsPriceModel::Ratio { down, up } => (down * da_price, up * da_price),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VgConfig {
    pub id: String,
    /// MW
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<String>,
    /// Day-ahead point forecast, MW.
    pub forecast_mean: SeriesSource,
    /// Day-ahead schedule, MW; defaults to the point forecast.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub da_schedule: Option<SeriesSource>,
    /// Realized output, MW; sampled from the forecast with the scenario seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized: Option<SeriesSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_coefficient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitConfig {
    pub id: String,
    pub kind: UnitKind,
    pub p_min: f64,
    pub p_max: f64,
    pub marginal_cost: f64,
    pub da_schedule: HourlyValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub upward_opportunity_cost: f64,
    /// Real-time output override, MW; the merit rule applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rt_output: Option<SeriesSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfferConfig {
    pub seller: String,
    pub hour: u32,
    pub direction: Direction,
    /// $/MW
    pub price: f64,
    /// MW
    pub quantity: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

fn default_first_hour() -> u32 {
    1
}

fn default_penalty() -> PenaltyFactors {
    PenaltyFactors { over: 0.3, under: 0.3 }
}

fn default_coefficient() -> f64 {
    DEFAULT_VARIANCE_COEFFICIENT
}

fn default_scales() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_first_hour")]
    pub first_hour: u32,
    pub horizon: usize,
    /// $/MWh
    pub da_prices: SeriesSource,
    /// $/MWh; defaults to the day-ahead prices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rt_prices: Option<SeriesSource>,
    #[serde(default = "default_penalty")]
    pub penalty: PenaltyFactors,
    #[serde(default = "default_coefficient")]
    pub variance_coefficient: f64,
    #[serde(default = "default_scales")]
    pub variance_scales: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brs_price: Option<BrsPriceModel>,
    pub vg: Vec<VgConfig>,
    #[serde(default)]
    pub units: Vec<UnitConfig>,
    #[serde(default)]
    pub offers: Vec<OfferConfig>,
    /// Zone pairs across which BRS contracts are forbidden.
    #[serde(default)]
    pub congested_boundaries: Vec<[String; 2]>,
    /// Standard deviation (MW) of the near-real-time forecast used for execution claims.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub claim_noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedVg {
    pub id: String,
    pub capacity: f64,
    pub zone: Option<String>,
    pub variance_coefficient: f64,
    pub forecast_mean: Vec<f64>,
    pub da_schedule: Vec<f64>,
    pub realized: Option<Vec<f64>>,
}

impl ResolvedVg {
    pub fn forecast(&self, idx: usize) -> Result<ForecastDistribution> {
        ForecastDistribution::from_mean_coefficient(self.capacity, self.forecast_mean[idx], self.variance_coefficient)
    }

    pub fn schedule(&self, idx: usize, da_price: f64) -> Result<VgSchedule> {
        VgSchedule::new(self.capacity, self.da_schedule[idx], da_price)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedUnit {
    pub id: String,
    pub zone: Option<String>,
    pub kind: UnitKind,
    pub p_min: f64,
    pub p_max: f64,
    pub marginal_cost: f64,
    pub upward_opportunity_cost: f64,
    pub da_schedule: Vec<f64>,
    pub rt_output: Option<Vec<f64>>,
}

impl ResolvedUnit {
    pub fn at(&self, idx: usize) -> DispatchableUnit {
        DispatchableUnit {
            p_min: self.p_min,
            p_max: self.p_max,
            marginal_cost: self.marginal_cost,
            da_schedule: self.da_schedule[idx],
            kind: self.kind,
            upward_opportunity_cost: self.upward_opportunity_cost,
        }
    }
}

/// A validated scenario with every per-hour series materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hours: Vec<u32>,
    pub da_prices: Vec<f64>,
    pub rt_prices: Vec<f64>,
    pub vgs: Vec<ResolvedVg>,
    pub units: Vec<ResolvedUnit>,
}

impl Scenario {
    pub fn hour_index(&self, hour: u32) -> Option<usize> {
        self.hours.iter().position(|&h| h == hour)
    }

    pub fn vg(&self, id: &str) -> Option<&ResolvedVg> {
        self.vgs.iter().find(|v| v.id == id)
    }

    pub fn unit(&self, id: &str) -> Option<&ResolvedUnit> {
        self.units.iter().find(|u| u.id == id)
    }

    /// Validates `config`; relative series paths resolve against `base_dir`.
    pub fn from_config(config: ScenarioConfig, base_dir: &Path) -> Result<Self> {
        Resolver { base_dir, config: &config }.resolve()
    }
}

struct Resolver<'a> {
    base_dir: &'a Path,
    config: &'a ScenarioConfig,
}

impl Resolver<'_> {
    fn err(&self, path: impl Into<String>, reason: impl Into<String>) -> Error {
        Error::Schema {
            file: self.base_dir.to_path_buf(),
            path: path.into(),
            reason: reason.into(),
        }
    }

    fn hours(&self) -> Vec<u32> {
        (0..self.config.horizon as u32).map(|i| self.config.first_hour + i).collect()
    }

    fn series(&self, source: &SeriesSource, unit: UnitTag, path: &str) -> Result<Vec<f64>> {
        let values = match source {
            SeriesSource::Inline(v) => v.clone(),
            SeriesSource::File { file } => {
                let full = self.base_dir.join(file);
                let series = load_series(&full, unit)?;
                if series.hours != self.hours() {
                    return Err(self.err(
                        path,
                        format!(
                            "series in {} covers hours {:?}..={:?}, scenario needs {}..={}",
                            full.display(),
                            series.hours.first(),
                            series.hours.last(),
                            self.config.first_hour,
                            self.config.first_hour as usize + self.config.horizon - 1
                        ),
                    ));
                }
                series.values
            }
        };
        if values.len() != self.config.horizon {
            return Err(self.err(path, format!("expected {} values, found {}", self.config.horizon, values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(self.err(format!("{path}[{i}]"), "value is not finite"));
        }
        Ok(values)
    }

    fn resolve(&self) -> Result<Scenario> {
        let c = self.config;
        if c.horizon == 0 {
            return Err(self.err("horizon", "must be at least 1"));
        }
        let da_prices = self.series(&c.da_prices, UnitTag::DollarsPerMwh, "da_prices")?;
        if let Some(i) = da_prices.iter().position(|p| *p <= 0.0) {
            return Err(self.err(format!("da_prices[{i}]"), "day-ahead prices must be positive"));
        }
        let rt_prices = match &c.rt_prices {
            Some(src) => self.series(src, UnitTag::DollarsPerMwh, "rt_prices")?,
            None => da_prices.clone(),
        };
        c.penalty.validate().map_err(|e| self.err("penalty", e.to_string()))?;
        if !(c.variance_coefficient > 0.0 && c.variance_coefficient < 1.0) {
            return Err(self.err("variance_coefficient", "must lie in (0, 1)"));
        }
        for (i, s) in c.variance_scales.iter().enumerate() {
            if !(*s >= 0.0 && s.is_finite()) {
                return Err(self.err(format!("variance_scales[{i}]"), "must be finite and >= 0"));
            }
        }
        if let Some(model) = &c.brs_price {
            let (d, u) = match model {
                BrsPriceModel::Absolute { down, up } | BrsPriceModel::Ratio { down, up } => (*down, *up),
            };
            if !(d >= 0.0 && u >= 0.0 && d.is_finite() && u.is_finite()) {
                return Err(self.err("brs_price", "prices must be finite and >= 0"));
            }
        }
        if c.vg.is_empty() {
            return Err(self.err("vg", "at least one VG producer is required"));
        }
        if !(c.claim_noise_sd >= 0.0 && c.claim_noise_sd.is_finite()) {
            return Err(self.err("claim_noise_sd", "must be finite and >= 0"));
        }

        let mut ids = BTreeSet::new();
        let mut vgs = Vec::with_capacity(c.vg.len());
        for (i, v) in c.vg.iter().enumerate() {
            let at = |field: &str| format!("vg[{i}].{field}");
            if !ids.insert(v.id.clone()) {
                return Err(self.err(at("id"), format!("duplicate participant id `{}`", v.id)));
            }
            if !(v.capacity > 0.0 && v.capacity.is_finite()) {
                return Err(self.err(at("capacity"), "must be positive"));
            }
            let coefficient = v.variance_coefficient.unwrap_or(c.variance_coefficient);
            if !(coefficient > 0.0 && coefficient < 1.0) {
                return Err(self.err(at("variance_coefficient"), "must lie in (0, 1)"));
            }
            let forecast_mean = self.series(&v.forecast_mean, UnitTag::Mw, &at("forecast_mean"))?;
            if let Some(h) = forecast_mean.iter().position(|m| !(*m > 0.0 && *m < v.capacity)) {
                return Err(self.err(format!("{}[{h}]", at("forecast_mean")), "must lie strictly inside (0, capacity)"));
            }
            let da_schedule = match &v.da_schedule {
                Some(src) => self.series(src, UnitTag::Mw, &at("da_schedule"))?,
                None => forecast_mean.clone(),
            };
            let realized = v
                .realized
                .as_ref()
                .map(|src| self.series(src, UnitTag::Mw, &at("realized")))
                .transpose()?;
            for (field, values) in [("da_schedule", Some(&da_schedule)), ("realized", realized.as_ref())] {
                if let Some(h) = values.and_then(|vals| vals.iter().position(|q| !(0.0..=v.capacity).contains(q))) {
                    return Err(self.err(format!("{}[{h}]", at(field)), "must lie in [0, capacity]"));
                }
            }
            vgs.push(ResolvedVg {
                id: v.id.clone(),
                capacity: v.capacity,
                zone: v.zone.clone(),
                variance_coefficient: coefficient,
                forecast_mean,
                da_schedule,
                realized,
            });
        }

        let mut units = Vec::with_capacity(c.units.len());
        for (i, u) in c.units.iter().enumerate() {
            let at = |field: &str| format!("units[{i}].{field}");
            if !ids.insert(u.id.clone()) {
                return Err(self.err(at("id"), format!("duplicate participant id `{}`", u.id)));
            }
            if !(u.p_min <= u.p_max && u.p_min.is_finite() && u.p_max.is_finite()) {
                return Err(self.err(at("p_max"), "requires finite p_min <= p_max"));
            }
            let da_schedule = match &u.da_schedule {
                HourlyValue::Constant(v) => vec![*v; c.horizon],
                HourlyValue::PerHour(src) => self.series(src, UnitTag::Mw, &at("da_schedule"))?,
            };
            let rt_output = u
                .rt_output
                .as_ref()
                .map(|src| self.series(src, UnitTag::Mw, &at("rt_output")))
                .transpose()?;
            let resolved = ResolvedUnit {
                id: u.id.clone(),
                zone: u.zone.clone(),
                kind: u.kind,
                p_min: u.p_min,
                p_max: u.p_max,
                marginal_cost: u.marginal_cost,
                upward_opportunity_cost: u.upward_opportunity_cost,
                da_schedule,
                rt_output,
            };
            for h in 0..c.horizon {
                resolved
                    .at(h)
                    .validate()
                    .map_err(|e| self.err(format!("{}[{h}]", at("da_schedule")), e.to_string()))?;
            }
            units.push(resolved);
        }

        let hours = self.hours();
        for (i, o) in c.offers.iter().enumerate() {
            let at = |field: &str| format!("offers[{i}].{field}");
            if !units.iter().any(|u| u.id == o.seller) {
                return Err(self.err(at("seller"), format!("unknown unit `{}`", o.seller)));
            }
            if !hours.contains(&o.hour) {
                return Err(self.err(at("hour"), format!("hour {} outside the horizon", o.hour)));
            }
            if !(o.price >= 0.0 && o.price.is_finite()) {
                return Err(self.err(at("price"), "must be finite and >= 0"));
            }
            if !(o.quantity > 0.0 && o.quantity.is_finite()) {
                return Err(self.err(at("quantity"), "must be positive"));
            }
        }

        Ok(Scenario {
            config: c.clone(),
            hours,
            da_prices,
            rt_prices,
            vgs,
            units,
        })
    }
}

/// Strictly parses and validates a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let config: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
        file: path.to_path_buf(),
        path: e.path().to_string(),
        reason: e.inner().to_string(),
    })?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    Scenario::from_config(config, base_dir).map_err(|e| match e {
        Error::Schema { path: field, reason, .. } => Error::Schema {
            file: path.to_path_buf(),
            path: field,
            reason,
        },
        other => other,
    })
}

pub fn save_scenario(config: &ScenarioConfig, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(config).expect("scenario serializes");
    text.push('\n');
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}
