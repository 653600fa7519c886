use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::provider::DispatchableUnit;
use crate::vg::{PenaltyFactors, VgSchedule};

use super::contract::BrsContract;
use super::ledger::{LedgerTag, Party, SettlementLedger};
use super::MW_TOLERANCE;

#[derive(Debug, Clone, PartialEq)]
pub struct VgHourInput {
    pub id: String,
    pub schedule: VgSchedule,
    pub penalties: PenaltyFactors,
    /// MW
    pub realized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitHourInput {
    pub id: String,
    pub unit: DispatchableUnit,
    /// Real-time output, MW.
    pub rt_output: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettlementInput {
    pub da_price: f64,
    pub rt_price: f64,
    pub vgs: Vec<VgHourInput>,
    pub units: Vec<UnitHourInput>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub hour: u32,
    pub party: Party,
    /// Day-ahead schedule before BRS execution.
    pub original: f64,
    /// Day-ahead schedule after BRS execution.
    pub modified: f64,
    /// Realized (VG) or real-time (unit) output.
    pub actual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourSettlement {
    pub ledger: SettlementLedger,
    pub schedules: Vec<ScheduleRow>,
}

/// Shifts `amount` MW of executed BRS between the VG and provider schedules.
///
/// Downward execution raises the VG schedule and lowers the provider's;
/// upward execution does the reverse. The combined schedule is unchanged.
pub fn apply_execution(vg_schedule: f64, provider_schedule: f64, direction: Direction, amount: f64) -> (f64, f64) {
    let sign = direction.provider_shift_sign();
    (vg_schedule - sign * amount, provider_schedule + sign * amount)
}

pub(super) fn settle_hour(hour: u32, contracts: &[BrsContract], input: &SettlementInput) -> Result<HourSettlement> {
    let da = input.da_price;
    let rt = input.rt_price;
    if !(da.is_finite() && rt.is_finite()) {
        return Err(Error::domain("settlement prices must be finite"));
    }

    let mut vg_mod: BTreeMap<&str, f64> = BTreeMap::new();
    for v in &input.vgs {
        if v.schedule.da_price != da {
            return Err(Error::domain(format!("VG `{}` scheduled at price {} but hour clears at {da}", v.id, v.schedule.da_price)));
        }
        if vg_mod.insert(&v.id, v.schedule.da_quantity).is_some() {
            return Err(Error::domain(format!("VG `{}` listed twice", v.id)));
        }
    }
    let mut unit_mod: BTreeMap<&str, f64> = BTreeMap::new();
    for u in &input.units {
        if unit_mod.insert(&u.id, u.unit.da_schedule).is_some() {
            return Err(Error::domain(format!("unit `{}` listed twice", u.id)));
        }
    }

    let mut ledger = SettlementLedger::default();
    for c in contracts {
        if !c.status().is_final() {
            return Err(Error::Lifecycle(format!(
                "contract {} is still {} at settlement",
                c.id,
                c.status().label()
            )));
        }
        if c.hour != hour {
            return Err(Error::domain(format!("contract {} belongs to hour {}", c.id, c.hour)));
        }
        let (Some(vg_schedule), Some(unit_schedule)) = (vg_mod.get(c.buyer.as_str()).copied(), unit_mod.get(c.seller.as_str()).copied()) else {
            return Err(Error::domain(format!("contract {} names a party missing from settlement input", c.id)));
        };
        let buyer = Party::Vg(c.buyer.clone());
        let seller = Party::Unit(c.seller.clone());
        if c.premium_due() {
            ledger.transfer(hour, buyer.clone(), seller.clone(), c.premium(), LedgerTag::Premium, Some(c.id))?;
        }
        let q = c.executed();
        if q > 0.0 {
            let (v, u) = apply_execution(vg_schedule, unit_schedule, c.direction, q);
            vg_mod.insert(&c.buyer, v);
            unit_mod.insert(&c.seller, u);
            // the VG gains day-ahead energy the provider gives up, or vice versa
            let (from, to) = match c.direction {
                Direction::DownCoversOver => (seller, buyer),
                Direction::UpCoversUnder => (buyer, seller),
            };
            ledger.transfer(hour, from, to, da * q, LedgerTag::BrsEnergyShift, Some(c.id))?;
        }
    }

    let mut schedules = Vec::new();
    for v in &input.vgs {
        let party = Party::Vg(v.id.clone());
        let modified = vg_mod[v.id.as_str()];
        ledger.transfer(hour, Party::Pool, party.clone(), da * v.schedule.da_quantity, LedgerTag::DaEnergy, None)?;
        let deviation = v.realized - modified;
        ledger.transfer(hour, Party::Pool, party.clone(), da * deviation, LedgerTag::RtImbalance, None)?;
        let alpha = if deviation > 0.0 { v.penalties.over } else { v.penalties.under };
        ledger.transfer(hour, party.clone(), Party::Pool, alpha * da * deviation.abs(), LedgerTag::Penalty, None)?;
        schedules.push(ScheduleRow {
            hour,
            party,
            original: v.schedule.da_quantity,
            modified,
            actual: v.realized,
        });
    }
    for u in &input.units {
        let party = Party::Unit(u.id.clone());
        let modified = unit_mod[u.id.as_str()];
        if modified < u.unit.p_min - MW_TOLERANCE || modified > u.unit.p_max + MW_TOLERANCE {
            return Err(Error::Invariant(format!(
                "unit `{}` schedule {modified} outside [{}, {}] after execution",
                u.id, u.unit.p_min, u.unit.p_max
            )));
        }
        ledger.transfer(hour, Party::Pool, party.clone(), da * u.unit.da_schedule, LedgerTag::DaEnergy, None)?;
        ledger.transfer(hour, Party::Pool, party.clone(), rt * (u.rt_output - modified), LedgerTag::RtImbalance, None)?;
        schedules.push(ScheduleRow {
            hour,
            party,
            original: u.unit.da_schedule,
            modified,
            actual: u.rt_output,
        });
    }
    Ok(HourSettlement { ledger, schedules })
}
