//! Economics of a dispatchable unit that sells BRS.
//!
//! Executing `Δr` MW of BRS (positive = upward, the unit's day-ahead schedule
//! rises) moves energy between the day-ahead and real-time settlements:
//!
//! ```text
//! R   = λD·p̂ + (p(λR) - p̂)·λR
//! R*  = λD·(p̂ + Δr) + (p(λR) - p̂ - Δr)·λR
//! R* - R = (λD - λR)·Δr
//! ```
//!
//! The expected difference is near zero when the execution is independent
//! of the price gap, but the cash flow gains variance. For a base-load unit
//! the real-time term vanishes and the increment is `var((λD - λR)·Δr)`; a
//! marginal unit whose real-time profit moves against the BRS cash flow
//! sees a smaller increment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::MW_TOLERANCE;
use crate::numeric::ExactSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    /// Real-time output insensitive to the real-time price.
    BaseLoad,
    /// Follows the merit rule against its marginal cost in real time.
    Marginal,
}

impl UnitKind {
    pub fn label(self) -> &'static str {
        match self {
            UnitKind::BaseLoad => "base_load",
            UnitKind::Marginal => "marginal",
        }
    }
}

impl std::fmt::Display for UnitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for UnitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base_load" | "base-load" => Ok(UnitKind::BaseLoad),
            "marginal" => Ok(UnitKind::Marginal),
            other => Err(format!("unknown unit kind `{other}` (expected `base_load` or `marginal`)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchableUnit {
    pub p_min: f64,
    pub p_max: f64,
    /// $/MWh
    pub marginal_cost: f64,
    /// Day-ahead schedule `p̂` in MW.
    pub da_schedule: f64,
    pub kind: UnitKind,
    /// $/MW added to the offer price of upward BRS (headroom held back from
    /// the day-ahead market).
    #[serde(default)]
    pub upward_opportunity_cost: f64,
}

impl DispatchableUnit {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_min <= self.da_schedule && self.da_schedule <= self.p_max) {
            return Err(Error::domain(format!(
                "unit schedule {} outside [{}, {}]",
                self.da_schedule, self.p_min, self.p_max
            )));
        }
        if !(self.marginal_cost >= 0.0 && self.marginal_cost.is_finite()) {
            return Err(Error::domain(format!("marginal cost must be >= 0, got {}", self.marginal_cost)));
        }
        if !(self.upward_opportunity_cost >= 0.0 && self.upward_opportunity_cost.is_finite()) {
            return Err(Error::domain(format!(
                "opportunity cost must be >= 0, got {}",
                self.upward_opportunity_cost
            )));
        }
        Ok(())
    }

    /// Room above the schedule, consumed by upward BRS.
    pub fn upward_headroom(&self) -> f64 {
        self.p_max - self.da_schedule
    }

    /// Room below the schedule, consumed by downward BRS.
    pub fn downward_headroom(&self) -> f64 {
        self.da_schedule - self.p_min
    }
}

/// One joint outcome of prices and executed BRS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointScenario {
    pub da_price: f64,
    pub rt_price: f64,
    /// Signed MW; positive means upward BRS executed.
    pub executed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub expected_delta: f64,
    /// Standard error of `expected_delta`; zero for exact distributions.
    pub delta_stderr: f64,
    pub variance_without: f64,
    pub variance_with: f64,
    pub incremental_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KindComparison {
    pub base_load: RiskReport,
    pub marginal: RiskReport,
    /// Strict: `marginal.incremental_variance < base_load.incremental_variance`.
    pub marginal_below_base: bool,
}

/// Real-time output of a price-taking unit that bids its marginal cost.
pub fn rt_dispatch(u: &DispatchableUnit, rt_price: f64) -> f64 {
    match u.kind {
        UnitKind::BaseLoad => u.da_schedule,
        UnitKind::Marginal => {
            if rt_price > u.marginal_cost {
                u.p_max
            } else if rt_price < u.marginal_cost {
                u.p_min
            } else {
                u.da_schedule
            }
        }
    }
}

pub fn revenue_unit(u: &DispatchableUnit, sc: &JointScenario) -> f64 {
    let output = rt_dispatch(u, sc.rt_price);
    sc.da_price * u.da_schedule + (output - u.da_schedule) * sc.rt_price
}

pub fn revenue_unit_with_brs(u: &DispatchableUnit, sc: &JointScenario) -> Result<f64> {
    revenue_unit_with_brs_at(u, sc, rt_dispatch(u, sc.rt_price))
}

/// Revenue with executed BRS when the real-time output is known rather than
/// given by the merit rule.
pub fn revenue_unit_with_brs_at(u: &DispatchableUnit, sc: &JointScenario, rt_output: f64) -> Result<f64> {
    let modified = u.da_schedule + sc.executed;
    if modified < u.p_min - MW_TOLERANCE || modified > u.p_max + MW_TOLERANCE {
        return Err(Error::ContractInfeasible(format!(
            "executing {} MW moves the schedule to {modified}, outside [{}, {}]",
            sc.executed, u.p_min, u.p_max
        )));
    }
    Ok(sc.da_price * modified + (rt_output - u.da_schedule - sc.executed) * sc.rt_price)
}

/// `(λD - λR)·Δr`
pub fn payoff_delta(sc: &JointScenario) -> f64 {
    (sc.da_price - sc.rt_price) * sc.executed
}

fn weighted_moments(weights: &[f64], values: &[f64], sample: bool) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let mean = {
        let mut acc = ExactSum::new();
        acc.extend(weights.iter().zip(values).map(|(w, v)| w * v));
        acc.value() / total
    };
    let mut acc = ExactSum::new();
    acc.extend(weights.iter().zip(values).map(|(w, v)| w * (v - mean) * (v - mean)));
    let denom = if sample { total - 1.0 } else { total };
    (mean, acc.value() / denom)
}

fn report(u: &DispatchableUnit, weights: &[f64], scenarios: &[JointScenario], sample: bool) -> Result<RiskReport> {
    let without: Vec<f64> = scenarios.iter().map(|sc| revenue_unit(u, sc)).collect();
    let with = scenarios
        .iter()
        .map(|sc| revenue_unit_with_brs(u, sc))
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = scenarios.iter().map(payoff_delta).collect();
    let (expected_delta, delta_var) = weighted_moments(weights, &deltas, sample);
    let (_, variance_without) = weighted_moments(weights, &without, sample);
    let (_, variance_with) = weighted_moments(weights, &with, sample);
    let delta_stderr = if sample {
        (delta_var / scenarios.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(RiskReport {
        expected_delta,
        delta_stderr,
        variance_without,
        variance_with,
        incremental_variance: variance_with - variance_without,
    })
}

/// Sample statistics (n - 1 normalization) over equally likely scenarios.
pub fn risk_report(u: &DispatchableUnit, scenarios: &[JointScenario]) -> Result<RiskReport> {
    if scenarios.len() < 2 {
        return Err(Error::domain(format!("risk report needs at least 2 scenarios, got {}", scenarios.len())));
    }
    u.validate()?;
    report(u, &vec![1.0; scenarios.len()], scenarios, true)
}

/// Exact moments of a discrete distribution given as `(probability, scenario)` pairs.
pub fn risk_report_exact(u: &DispatchableUnit, outcomes: &[(f64, JointScenario)]) -> Result<RiskReport> {
    if outcomes.is_empty() {
        return Err(Error::domain("risk report needs at least one outcome"));
    }
    u.validate()?;
    let weights: Vec<f64> = outcomes.iter().map(|(p, _)| *p).collect();
    if weights.iter().any(|p| !(*p >= 0.0)) || ((weights.iter().sum::<f64>()) - 1.0).abs() > 1e-12 {
        return Err(Error::domain("outcome probabilities must be nonnegative and sum to 1"));
    }
    let scenarios: Vec<JointScenario> = outcomes.iter().map(|(_, sc)| *sc).collect();
    report(u, &weights, &scenarios, false)
}

pub fn compare_kinds(base: &DispatchableUnit, marg: &DispatchableUnit, scenarios: &[JointScenario]) -> Result<KindComparison> {
    let base_load = risk_report(base, scenarios)?;
    let marginal = risk_report(marg, scenarios)?;
    Ok(KindComparison {
        base_load,
        marginal,
        marginal_below_base: marginal.incremental_variance < base_load.incremental_variance,
    })
}

pub fn compare_kinds_exact(
    base: &DispatchableUnit,
    marg: &DispatchableUnit,
    outcomes: &[(f64, JointScenario)],
) -> Result<KindComparison> {
    let base_load = risk_report_exact(base, outcomes)?;
    let marginal = risk_report_exact(marg, outcomes)?;
    Ok(KindComparison {
        base_load,
        marginal,
        marginal_below_base: marginal.incremental_variance < base_load.incremental_variance,
    })
}

/// Seeded generator of joint price/execution scenarios.
///
/// `λR = λD + gap_sd·Z1` and `Δr = execution_sd·(ρ·Z1 + sqrt(1 - ρ²)·Z2)`,
/// with `Δr` clipped to `±max_execution`. `ρ = 0` gives a zero-mean price
/// gap independent of the execution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioGenerator {
    pub da_price: f64,
    pub gap_sd: f64,
    pub execution_sd: f64,
    pub max_execution: f64,
    /// Correlation between `λR` and `Δr`.
    pub correlation: f64,
}

impl Default for ScenarioGenerator {
    fn default() -> Self {
        Self {
            da_price: 30.0,
            gap_sd: 8.0,
            execution_sd: 20.0,
            max_execution: 50.0,
            correlation: 0.0,
        }
    }
}

impl ScenarioGenerator {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.correlation) {
            return Err(Error::domain(format!("correlation must lie in [-1, 1], got {}", self.correlation)));
        }
        for (name, v) in [
            ("gap_sd", self.gap_sd),
            ("execution_sd", self.execution_sd),
            ("max_execution", self.max_execution),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !self.da_price.is_finite() {
            return Err(Error::domain("day-ahead price must be finite"));
        }
        Ok(())
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<Vec<JointScenario>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = self.correlation;
        let orth = (1.0 - rho * rho).max(0.0).sqrt();
        Ok((0..n)
            .map(|_| {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                JointScenario {
                    da_price: self.da_price,
                    rt_price: self.da_price + self.gap_sd * z1,
                    executed: (self.execution_sd * (rho * z1 + orth * z2))
                        .clamp(-self.max_execution, self.max_execution),
                }
            })
            .collect())
    }
}

/// Four equiprobable outcomes: price gap `±gap` independent of execution `±executed`.
pub fn four_outcome_enumeration(da_price: f64, gap: f64, executed: f64) -> Vec<(f64, JointScenario)> {
    let mut out = Vec::with_capacity(4);
    for g in [-gap, gap] {
        for e in [-executed, executed] {
            out.push((
                0.25,
                JointScenario {
                    da_price,
                    rt_price: da_price - g,
                    executed: e,
                },
            ));
        }
    }
    out
}

/// Unit pair used by the supply-risk experiment: a base-load unit scheduled
/// well above its marginal cost and a marginal unit priced at the day-ahead price.
pub fn reference_units(da_price: f64) -> (DispatchableUnit, DispatchableUnit) {
    (
        DispatchableUnit {
            p_min: 100.0,
            p_max: 400.0,
            marginal_cost: 10.0,
            da_schedule: 300.0,
            kind: UnitKind::BaseLoad,
            upward_opportunity_cost: 0.0,
        },
        DispatchableUnit {
            p_min: 50.0,
            p_max: 250.0,
            marginal_cost: da_price,
            da_schedule: 150.0,
            kind: UnitKind::Marginal,
            upward_opportunity_cost: 0.0,
        },
    )
}
