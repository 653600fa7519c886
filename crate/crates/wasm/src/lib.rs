//! Browser bindings for the single-hour VG producer view.
//!
//! Each export takes the hour as a JSON object (see [`HourInput`]) and
//! returns JSON. The `*_json` functions are the same operations for native
//! callers and tests.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use brs_core::direction::Direction;
use brs_core::vg::{demand_curve, expected_revenue, oic_report, optimal_position, DemandPoint, OicReport};
use brs_core::{BrsPosition, ForecastDistribution, PenaltyFactors, VarianceScale, VgSchedule};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HourInput {
    pub capacity: f64,
    pub forecast_mean: f64,
    pub variance_coefficient: f64,
    /// Defaults to the forecast mean.
    #[serde(default)]
    pub da_schedule: Option<f64>,
    pub da_price: f64,
    pub alpha_over: f64,
    pub alpha_under: f64,
}

struct Hour {
    schedule: VgSchedule,
    penalties: PenaltyFactors,
    forecast: ForecastDistribution,
}

#[derive(Debug)]
pub struct DemoError(String);

impl std::fmt::Display for DemoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<brs_core::Error> for DemoError {
    fn from(e: brs_core::Error) -> Self {
        DemoError(e.to_string())
    }
}

impl From<serde_json::Error> for DemoError {
    fn from(e: serde_json::Error) -> Self {
        DemoError(format!("bad input: {e}"))
    }
}

fn parse(input: &str) -> Result<Hour, DemoError> {
    let h: HourInput = serde_json::from_str(input)?;
    let forecast = ForecastDistribution::from_mean_coefficient(h.capacity, h.forecast_mean, h.variance_coefficient)?;
    let schedule = VgSchedule::new(h.capacity, h.da_schedule.unwrap_or(h.forecast_mean), h.da_price)?;
    let penalties = PenaltyFactors::new(h.alpha_over, h.alpha_under)?;
    Ok(Hour {
        schedule,
        penalties,
        forecast,
    })
}

#[derive(Serialize)]
struct Curves {
    down: Vec<DemandPoint>,
    up: Vec<DemandPoint>,
    /// Beta density over the capacity range for the background plot.
    density: Vec<[f64; 2]>,
}

pub fn demand_curves_json(input: &str, points: usize) -> Result<String, DemoError> {
    let h = parse(input)?;
    let curve = |d| demand_curve(&h.schedule, &h.penalties, &h.forecast, d, points).map(|c| c.points);
    let c = h.forecast.capacity();
    let density = (0..=200)
        .map(|i| {
            let p = c * f64::from(i) / 200.0;
            Ok([p, h.forecast.pdf(p)?])
        })
        .collect::<Result<Vec<_>, brs_core::Error>>()?
        .into_iter()
        .filter(|[_, v]| v.is_finite())
        .collect();
    Ok(serde_json::to_string(&Curves {
        down: curve(Direction::DownCoversOver)?,
        up: curve(Direction::UpCoversUnder)?,
        density,
    })?)
}

#[derive(Serialize)]
struct Optimal {
    position: BrsPosition,
    oic: OicReport,
}

pub fn optimal_json(input: &str, down_price: f64, up_price: f64) -> Result<String, DemoError> {
    let h = parse(input)?;
    let position = optimal_position(&h.schedule, &h.penalties, &h.forecast, down_price, up_price)?;
    let oic = oic_report(&h.schedule, &h.penalties, &position, &h.forecast)?;
    Ok(serde_json::to_string(&Optimal { position, oic })?)
}

#[derive(Serialize)]
struct ProfitSeries {
    scale: f64,
    /// `(price ratio, expected profit)`
    points: Vec<[f64; 2]>,
}

/// Expected profit of the hour against BRS price ratio, one series per variance scale.
pub fn profit_curve_json(input: &str, max_ratio: f64, steps: usize, scales: &[f64]) -> Result<String, DemoError> {
    let h = parse(input)?;
    if steps < 1 || max_ratio.is_nan() || max_ratio < 0.0 {
        return Err(DemoError("need steps >= 1 and max_ratio >= 0".into()));
    }
    let series = scales
        .iter()
        .map(|&s| {
            let d = h.forecast.scale_variance(VarianceScale::new(s)?);
            let points = (0..=steps)
                .map(|i| {
                    let ratio = max_ratio * i as f64 / steps as f64;
                    let price = ratio * h.schedule.da_price;
                    let pos = optimal_position(&h.schedule, &h.penalties, &d, price, price)?;
                    Ok([ratio, expected_revenue(&h.schedule, &h.penalties, &pos, &d)? - pos.premium()])
                })
                .collect::<Result<Vec<_>, brs_core::Error>>()?;
            Ok(ProfitSeries { scale: s, points })
        })
        .collect::<Result<Vec<_>, brs_core::Error>>()?;
    Ok(serde_json::to_string(&series)?)
}

fn to_js(r: Result<String, DemoError>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.0))
}

#[wasm_bindgen(js_name = demandCurves)]
pub fn demand_curves(input: &str, points: usize) -> Result<String, JsValue> {
    to_js(demand_curves_json(input, points))
}

#[wasm_bindgen(js_name = optimalPosition)]
pub fn optimal(input: &str, down_price: f64, up_price: f64) -> Result<String, JsValue> {
    to_js(optimal_json(input, down_price, up_price))
}

#[wasm_bindgen(js_name = profitCurve)]
pub fn profit_curve(input: &str, max_ratio: f64, steps: usize, scales: Vec<f64>) -> Result<String, JsValue> {
    to_js(profit_curve_json(input, max_ratio, steps, &scales))
}
