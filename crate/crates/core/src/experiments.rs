//! Table-producing experiments behind the command-line tool.

use serde::Serialize;

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::forecast::VarianceScale;
use crate::io::{Cell, ResolvedVg, Scenario, Table};
use crate::numeric::ExactSum;
use crate::provider::{
    compare_kinds, compare_kinds_exact, four_outcome_enumeration, reference_units, KindComparison, ScenarioGenerator,
    UnitKind,
};
use crate::vg::{demand_curve, expected_revenue, oic_report, optimal_position, BrsPosition, OicReport, PenaltyFactors};

/// Picks a VG by id, or the first one declared.
pub fn select_vg<'a>(scenario: &'a Scenario, id: Option<&str>) -> Result<&'a ResolvedVg> {
    match id {
        Some(id) => scenario
            .vg(id)
            .ok_or_else(|| Error::domain(format!("scenario has no VG `{id}`"))),
        None => scenario
            .vgs
            .first()
            .ok_or_else(|| Error::domain("scenario declares no VG")),
    }
}

fn hour_index(scenario: &Scenario, hour: u32) -> Result<usize> {
    scenario.hour_index(hour).ok_or_else(|| {
        Error::domain(format!(
            "hour {hour} outside the scenario horizon {}..={}",
            scenario.hours[0],
            scenario.hours[scenario.hours.len() - 1]
        ))
    })
}

/// Demand curves at one hour: a row per grid point, penalty factor and direction.
/// Each α is applied to both sides.
pub fn demand_curve_table(
    scenario: &Scenario,
    vg_id: Option<&str>,
    hour: u32,
    alphas: &[f64],
    points: usize,
) -> Result<Table> {
    let idx = hour_index(scenario, hour)?;
    let vg = select_vg(scenario, vg_id)?;
    let schedule = vg.schedule(idx, scenario.da_prices[idx])?;
    let forecast = vg.forecast(idx)?;
    let mut table = Table::new(["hour", "direction", "alpha", "quantity", "marginal_value"]);
    for direction in Direction::BOTH {
        for &alpha in alphas {
            let pf = PenaltyFactors::new(alpha, alpha)?;
            for p in demand_curve(&schedule, &pf, &forecast, direction, points)?.points {
                table.push(vec![
                    Cell::Num(hour.into()),
                    direction.label().into(),
                    alpha.into(),
                    p.quantity.into(),
                    p.marginal_value.into(),
                ]);
            }
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalReport {
    pub vg: String,
    pub hour: u32,
    pub da_price: f64,
    pub da_schedule: f64,
    pub position: BrsPosition,
    pub oic: OicReport,
}

impl OptimalReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["metric", "value"]);
        let rows: [(&str, f64); 11] = [
            ("down_quantity", self.position.down_covers_over.quantity),
            ("down_price", self.position.down_covers_over.price),
            ("up_quantity", self.position.up_covers_under.quantity),
            ("up_price", self.position.up_covers_under.price),
            ("premium_paid", self.oic.premium_paid),
            ("expected_residual_penalty", self.oic.expected_residual_penalty),
            ("total_oic", self.oic.total_oic),
            ("consumer_surplus", self.oic.consumer_surplus),
            ("unhedged_penalty", self.oic.unhedged_penalty),
            ("gross_expected_revenue", self.oic.gross_expected_revenue),
            ("net_expected_revenue", self.oic.net_expected_revenue),
        ];
        for (k, v) in rows {
            t.push(vec![k.into(), v.into()]);
        }
        t
    }
}

/// Optimal cover at one hour. Prices default to the scenario's BRS price model.
pub fn optimal_report(
    scenario: &Scenario,
    vg_id: Option<&str>,
    hour: u32,
    down_price: Option<f64>,
    up_price: Option<f64>,
) -> Result<OptimalReport> {
    let idx = hour_index(scenario, hour)?;
    let vg = select_vg(scenario, vg_id)?;
    let da = scenario.da_prices[idx];
    let model = scenario.config.brs_price.as_ref().map(|m| m.prices(da));
    let (down, up) = match (down_price, up_price, model) {
        (Some(d), Some(u), _) => (d, u),
        (d, u, Some((md, mu))) => (d.unwrap_or(md), u.unwrap_or(mu)),
        _ => return Err(Error::domain("BRS prices not given and the scenario has no brs_price model")),
    };
    let schedule = vg.schedule(idx, da)?;
    let forecast = vg.forecast(idx)?;
    let pf = scenario.config.penalty;
    let position = optimal_position(&schedule, &pf, &forecast, down, up)?;
    let oic = oic_report(&schedule, &pf, &position, &forecast)?;
    Ok(OptimalReport {
        vg: vg.id.clone(),
        hour,
        da_price: da,
        da_schedule: schedule.da_quantity,
        position,
        oic,
    })
}

/// Expected day profit of one VG over BRS price ratios and forecast variance
/// scales. At each hour both sides are priced at `ratio·λD`, the optimal
/// position is bought, and the profit is the gross expected revenue less
/// premiums, summed over hours. Rows are sorted by scale, then ratio.
pub fn profit_sweep(scenario: &Scenario, vg_id: Option<&str>, ratios: &[f64], scales: &[f64]) -> Result<Table> {
    let vg = select_vg(scenario, vg_id)?;
    for &r in ratios {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("price ratio must be finite and >= 0, got {r}")));
        }
    }
    let mut ratios = ratios.to_vec();
    ratios.sort_by(f64::total_cmp);
    let mut scales: Vec<VarianceScale> = scales.iter().map(|&s| VarianceScale::new(s)).collect::<Result<_>>()?;
    scales.sort_by(|a, b| a.factor().total_cmp(&b.factor()));

    let pf = scenario.config.penalty;
    let mut table = Table::new(["scale", "ratio", "expected_profit", "no_brs_revenue"]);
    for &scale in &scales {
        let mut hours = Vec::with_capacity(scenario.hours.len());
        for (idx, &da) in scenario.da_prices.iter().enumerate() {
            let schedule = vg.schedule(idx, da)?;
            let forecast = vg.forecast(idx)?.scale_variance(scale);
            hours.push((schedule, forecast));
        }
        let mut baseline = ExactSum::new();
        for (s, d) in &hours {
            baseline.add(expected_revenue(s, &pf, &BrsPosition::none(), d)?);
        }
        let baseline = baseline.value();
        for &ratio in &ratios {
            let mut profit = ExactSum::new();
            for (s, d) in &hours {
                let price = ratio * s.da_price;
                let pos = optimal_position(s, &pf, d, price, price)?;
                profit.add(expected_revenue(s, &pf, &pos, d)?);
                profit.add(-pos.premium());
            }
            table.push(vec![
                scale.factor().into(),
                ratio.into(),
                profit.value().into(),
                baseline.into(),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupplyRiskOptions {
    pub generator: ScenarioGenerator,
    pub samples: usize,
    pub seed: u64,
    /// Use the four-outcome enumeration instead of Monte Carlo.
    pub enumerate: bool,
    /// Price gap and execution magnitude for the enumeration.
    pub enumeration_gap: f64,
    pub enumeration_execution: f64,
}

impl Default for SupplyRiskOptions {
    fn default() -> Self {
        Self {
            generator: ScenarioGenerator::default(),
            samples: 100_000,
            seed: 0,
            enumerate: false,
            enumeration_gap: 5.0,
            enumeration_execution: 10.0,
        }
    }
}

pub fn supply_risk(opts: &SupplyRiskOptions) -> Result<KindComparison> {
    let (base, marginal) = reference_units(opts.generator.da_price);
    if opts.enumerate {
        let outcomes = four_outcome_enumeration(opts.generator.da_price, opts.enumeration_gap, opts.enumeration_execution);
        compare_kinds_exact(&base, &marginal, &outcomes)
    } else {
        if opts.samples < 2 {
            return Err(Error::domain(format!("supply risk needs at least 2 samples, got {}", opts.samples)));
        }
        let scenarios = opts.generator.generate(opts.samples, opts.seed)?;
        compare_kinds(&base, &marginal, &scenarios)
    }
}

/// One row per unit kind, optionally restricted to `kind`.
pub fn supply_risk_table(cmp: &KindComparison, kind: Option<UnitKind>) -> Table {
    let mut t = Table::new([
        "unit_kind",
        "expected_delta",
        "delta_stderr",
        "variance_without",
        "variance_with",
        "incremental_variance",
    ]);
    for (k, r) in [(UnitKind::BaseLoad, &cmp.base_load), (UnitKind::Marginal, &cmp.marginal)] {
        if kind.is_some_and(|want| want != k) {
            continue;
        }
        t.push(vec![
            k.to_string().into(),
            r.expected_delta.into(),
            r.delta_stderr.into(),
            r.variance_without.into(),
            r.variance_with.into(),
            r.incremental_variance.into(),
        ]);
    }
    t
}
