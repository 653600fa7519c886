//! VG producer economics: imbalance-penalized revenue, the value of BRS
//! cover, and the critical-fractile purchase rule.
//!
//! Realized revenue with cover `[p̂ - r-, p̂ + r+]` is `λ·p` inside the band;
//! surplus above it earns `(1 - α+)·λ` and shortfall below it is charged
//! `(1 + α-)·λ`. Taking expectations gives
//!
//! ```text
//! E[R] = λ·mean - λ·α+·E[(p - p̂ - r+)^+] - λ·α-·E[(p̂ - r- - p)^+]
//! ```
//!
//! Premiums are a separate upfront cash flow and are excluded from `E[R]`;
//! the net objective is `E[R] - π+·r+ - π-·r-`.

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::forecast::ForecastDistribution;

/// Imbalance penalty factors `α+` (over-generation) and `α-` (under-generation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyFactors {
    pub over: f64,
    pub under: f64,
}

impl PenaltyFactors {
    pub fn new(over: f64, under: f64) -> Result<Self> {
        let pf = Self { over, under };
        pf.validate()?;
        Ok(pf)
    }

    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.over) {
            return Err(Error::domain(format!(
                "over-generation penalty factor must lie in [0, 1], got {}",
                self.over
            )));
        }
        if !(self.under >= 0.0 && self.under.is_finite()) {
            return Err(Error::domain(format!(
                "under-generation penalty factor must be finite and >= 0, got {}",
                self.under
            )));
        }
        Ok(())
    }

    pub fn for_direction(&self, direction: Direction) -> f64 {
        match direction {
            Direction::DownCoversOver => self.over,
            Direction::UpCoversUnder => self.under,
        }
    }
}

/// Day-ahead position of a VG producer for one hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VgSchedule {
    pub capacity: f64,
    pub da_quantity: f64,
    pub da_price: f64,
}

impl VgSchedule {
    pub fn new(capacity: f64, da_quantity: f64, da_price: f64) -> Result<Self> {
        let s = Self {
            capacity,
            da_quantity,
            da_price,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return Err(Error::domain(format!("capacity must be positive, got {}", self.capacity)));
        }
        if !(0.0..=self.capacity).contains(&self.da_quantity) {
            return Err(Error::domain(format!(
                "day-ahead quantity {} outside [0, {}]",
                self.da_quantity, self.capacity
            )));
        }
        if !(self.da_price > 0.0 && self.da_price.is_finite()) {
            return Err(Error::domain(format!(
                "day-ahead price must be positive, got {}",
                self.da_price
            )));
        }
        Ok(())
    }

    /// Largest useful cover in `direction`: room to capacity for downward BRS,
    /// the scheduled quantity itself for upward BRS.
    pub fn headroom(&self, direction: Direction) -> f64 {
        match direction {
            Direction::DownCoversOver => self.capacity - self.da_quantity,
            Direction::UpCoversUnder => self.da_quantity,
        }
    }

    fn check_forecast(&self, d: &ForecastDistribution) -> Result<()> {
        self.validate()?;
        if d.capacity() != self.capacity {
            return Err(Error::domain(format!(
                "schedule capacity {} differs from forecast capacity {}",
                self.capacity,
                d.capacity()
            )));
        }
        Ok(())
    }
}

/// Quantity and premium price of one side of a BRS purchase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hedge {
    /// MW
    pub quantity: f64,
    /// $/MW
    pub price: f64,
}

/// Purchased BRS: `r+` (downward, covers over-generation) and `r-` (upward,
/// covers under-generation) with their premium prices `π+`, `π-`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrsPosition {
    pub down_covers_over: Hedge,
    pub up_covers_under: Hedge,
}

impl BrsPosition {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(down_qty: f64, up_qty: f64, down_price: f64, up_price: f64) -> Self {
        Self {
            down_covers_over: Hedge {
                quantity: down_qty,
                price: down_price,
            },
            up_covers_under: Hedge {
                quantity: up_qty,
                price: up_price,
            },
        }
    }

    pub fn side(&self, direction: Direction) -> Hedge {
        match direction {
            Direction::DownCoversOver => self.down_covers_over,
            Direction::UpCoversUnder => self.up_covers_under,
        }
    }

    /// `π+·r+ + π-·r-`
    pub fn premium(&self) -> f64 {
        self.down_covers_over.price * self.down_covers_over.quantity
            + self.up_covers_under.price * self.up_covers_under.quantity
    }

    pub fn validate(&self, s: &VgSchedule) -> Result<()> {
        for direction in Direction::BOTH {
            let hedge = self.side(direction);
            let headroom = s.headroom(direction);
            if !(0.0..=headroom).contains(&hedge.quantity) {
                return Err(Error::domain(format!(
                    "{direction} BRS quantity {} outside [0, {headroom}]",
                    hedge.quantity
                )));
            }
            if !(hedge.price >= 0.0 && hedge.price.is_finite()) {
                return Err(Error::domain(format!(
                    "{direction} BRS price must be finite and >= 0, got {}",
                    hedge.price
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandPoint {
    /// MW
    pub quantity: f64,
    /// $/MW
    pub marginal_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandCurve {
    pub direction: Direction,
    pub points: Vec<DemandPoint>,
}

/// Split of the overall imbalance cost (OIC) for a position.
///
/// With no cover the whole expected penalty is at stake. Buying cover turns
/// part of it into premium, removes part of it, and leaves the rest as a
/// residual penalty; `consumer_surplus` is the saving relative to buying nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OicReport {
    pub premium_paid: f64,
    pub expected_residual_penalty: f64,
    pub total_oic: f64,
    pub consumer_surplus: f64,
    /// Expected penalty without any BRS.
    pub unhedged_penalty: f64,
    pub gross_expected_revenue: f64,
    pub net_expected_revenue: f64,
}

fn check_actual(s: &VgSchedule, actual: f64) -> Result<()> {
    if !(0.0..=s.capacity).contains(&actual) {
        return Err(Error::domain(format!("actual output {actual} outside [0, {}]", s.capacity)));
    }
    Ok(())
}

fn banded_revenue(s: &VgSchedule, pf: &PenaltyFactors, lo: f64, hi: f64, actual: f64) -> f64 {
    let price = s.da_price;
    if actual > hi {
        price * hi + (1.0 - pf.over) * price * (actual - hi)
    } else if actual < lo {
        price * lo - (1.0 + pf.under) * price * (lo - actual)
    } else {
        price * actual
    }
}

/// Realized revenue without BRS.
pub fn revenue_realized(s: &VgSchedule, pf: &PenaltyFactors, actual: f64) -> Result<f64> {
    s.validate()?;
    pf.validate()?;
    check_actual(s, actual)?;
    Ok(banded_revenue(s, pf, s.da_quantity, s.da_quantity, actual))
}

/// Realized revenue with BRS cover, premium excluded.
pub fn revenue_with_brs(s: &VgSchedule, pf: &PenaltyFactors, pos: &BrsPosition, actual: f64) -> Result<f64> {
    s.validate()?;
    pf.validate()?;
    pos.validate(s)?;
    check_actual(s, actual)?;
    let lo = s.da_quantity - pos.up_covers_under.quantity;
    let hi = s.da_quantity + pos.down_covers_over.quantity;
    Ok(banded_revenue(s, pf, lo, hi, actual))
}

/// Expected penalty on the uncovered tails, `(over-generation part, under-generation part)`.
fn expected_penalties(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    down_qty: f64,
    up_qty: f64,
    d: &ForecastDistribution,
) -> Result<(f64, f64)> {
    let over = if pf.over == 0.0 {
        0.0
    } else {
        s.da_price * pf.over * d.expected_surplus_above(s.da_quantity + down_qty)?
    };
    let under = if pf.under == 0.0 {
        0.0
    } else {
        s.da_price * pf.under * d.expected_shortfall_below(s.da_quantity - up_qty)?
    };
    Ok((over, under))
}

/// Gross expected revenue `E[R]` of a position (premium excluded).
pub fn expected_revenue(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    pos: &BrsPosition,
    d: &ForecastDistribution,
) -> Result<f64> {
    s.check_forecast(d)?;
    pf.validate()?;
    pos.validate(s)?;
    let (over, under) = expected_penalties(
        s,
        pf,
        pos.down_covers_over.quantity,
        pos.up_covers_under.quantity,
        d,
    )?;
    Ok(s.da_price * d.mean() - over - under)
}

/// `E[R] - premium`.
pub fn net_expected_revenue(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    pos: &BrsPosition,
    d: &ForecastDistribution,
) -> Result<f64> {
    Ok(expected_revenue(s, pf, pos, d)? - pos.premium())
}

/// `∂E[R]/∂r+ = λ·α+·(1 - F(p̂ + r))`
pub fn marginal_utility_down(s: &VgSchedule, pf: &PenaltyFactors, d: &ForecastDistribution, r: f64) -> Result<f64> {
    marginal_utility(s, pf, d, Direction::DownCoversOver, r)
}

/// `∂E[R]/∂r- = λ·α-·F(p̂ - r)`
pub fn marginal_utility_up(s: &VgSchedule, pf: &PenaltyFactors, d: &ForecastDistribution, r: f64) -> Result<f64> {
    marginal_utility(s, pf, d, Direction::UpCoversUnder, r)
}

pub fn marginal_utility(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    d: &ForecastDistribution,
    direction: Direction,
    r: f64,
) -> Result<f64> {
    s.check_forecast(d)?;
    pf.validate()?;
    let headroom = s.headroom(direction);
    if !(0.0..=headroom).contains(&r) {
        return Err(Error::domain(format!("{direction} BRS quantity {r} outside [0, {headroom}]")));
    }
    let ceiling = s.da_price * pf.for_direction(direction);
    Ok(match direction {
        Direction::DownCoversOver => ceiling * d.survival(s.da_quantity + r),
        Direction::UpCoversUnder => ceiling * d.cdf(s.da_quantity - r),
    })
}

/// Cover that maximizes `E[R] - π·r` on one side at premium `price`.
pub fn optimal_quantity(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    d: &ForecastDistribution,
    direction: Direction,
    price: f64,
) -> Result<f64> {
    s.check_forecast(d)?;
    pf.validate()?;
    if !(price >= 0.0 && price.is_finite()) {
        return Err(Error::domain(format!("{direction} BRS price must be finite and >= 0, got {price}")));
    }
    let alpha = pf.for_direction(direction);
    if alpha == 0.0 {
        return Ok(0.0);
    }
    // critical fractile: marginal utility equals price
    let ratio = (price / (s.da_price * alpha)).min(1.0);
    let headroom = s.headroom(direction);
    let r = match direction {
        Direction::DownCoversOver => d.upper_quantile(ratio)? - s.da_quantity,
        Direction::UpCoversUnder => s.da_quantity - d.quantile(ratio)?,
    };
    Ok(r.clamp(0.0, headroom))
}

pub fn optimal_position(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    d: &ForecastDistribution,
    down_price: f64,
    up_price: f64,
) -> Result<BrsPosition> {
    Ok(BrsPosition::new(
        optimal_quantity(s, pf, d, Direction::DownCoversOver, down_price)?,
        optimal_quantity(s, pf, d, Direction::UpCoversUnder, up_price)?,
        down_price,
        up_price,
    ))
}

/// Marginal value sampled on an even grid over `[0, headroom]`.
pub fn demand_curve(
    s: &VgSchedule,
    pf: &PenaltyFactors,
    d: &ForecastDistribution,
    direction: Direction,
    n_points: usize,
) -> Result<DemandCurve> {
    if n_points < 2 {
        return Err(Error::domain(format!("demand curve needs at least 2 points, got {n_points}")));
    }
    let headroom = s.headroom(direction);
    let last = (n_points - 1) as f64;
    let points = (0..n_points)
        .map(|i| {
            let quantity = if i + 1 == n_points { headroom } else { headroom * i as f64 / last };
            Ok(DemandPoint {
                quantity,
                marginal_value: marginal_utility(s, pf, d, direction, quantity)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DemandCurve { direction, points })
}

pub fn oic_report(s: &VgSchedule, pf: &PenaltyFactors, pos: &BrsPosition, d: &ForecastDistribution) -> Result<OicReport> {
    let gross = expected_revenue(s, pf, pos, d)?;
    let (over, under) = expected_penalties(
        s,
        pf,
        pos.down_covers_over.quantity,
        pos.up_covers_under.quantity,
        d,
    )?;
    let (over0, under0) = expected_penalties(s, pf, 0.0, 0.0, d)?;
    let premium = pos.premium();
    let residual = over + under;
    let total = premium + residual;
    let unhedged = over0 + under0;
    Ok(OicReport {
        premium_paid: premium,
        expected_residual_penalty: residual,
        total_oic: total,
        consumer_surplus: unhedged - total,
        unhedged_penalty: unhedged,
        gross_expected_revenue: gross,
        net_expected_revenue: gross - premium,
    })
}
