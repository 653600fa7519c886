use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::io::{Cell, Scenario, Table};
use crate::provider::{revenue_unit_with_brs_at, rt_dispatch, JointScenario};
use crate::vg::{revenue_realized, revenue_with_brs, BrsPosition, VgSchedule};

use super::contract::{BrsContract, ContractStatus};
use super::ledger::{Party, SettlementLedger};
use super::settle::{ScheduleRow, SettlementInput, UnitHourInput, VgHourInput};
use super::{BuyerProfile, HourMarket, Offer, SellerState, ZonalRule};

const RELATIVE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayResult {
    pub contracts: Vec<BrsContract>,
    pub ledger: SettlementLedger,
    pub schedules: Vec<ScheduleRow>,
    #[serde(with = "party_entries")]
    pub totals: BTreeMap<Party, f64>,
}

// JSON object keys must be strings, so the map goes out as a list of pairs.
mod party_entries {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::market::Party;

    #[derive(Serialize, Deserialize)]
    struct Entry {
        party: Party,
        net: f64,
    }

    pub fn serialize<S: Serializer>(map: &BTreeMap<Party, f64>, s: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = map.iter().map(|(p, &net)| Entry { party: p.clone(), net }).collect();
        entries.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Party, f64>, D::Error> {
        Ok(Vec::<Entry>::deserialize(d)?.into_iter().map(|e| (e.party, e.net)).collect())
    }
}

fn check_close(what: impl FnOnce() -> String, got: f64, want: f64) -> Result<()> {
    let scale = got.abs().max(want.abs()).max(1.0);
    if (got - want).abs() > RELATIVE_TOLERANCE * scale {
        return Err(Error::Invariant(format!("{}: ledger {got} vs formula {want}", what())));
    }
    Ok(())
}

fn hour_rng(seed: u64, hour: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (u64::from(hour).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// Runs every hour of the scenario through the full BRS lifecycle and
/// settles it. Each hour's ledger is checked for zero sum, schedule
/// conservation and agreement with the closed-form revenues before the
/// next hour starts.
pub fn simulate_day(scenario: &Scenario) -> Result<DayResult> {
    let cfg = &scenario.config;
    let zonal = (!cfg.congested_boundaries.is_empty())
        .then(|| ZonalRule::new(cfg.congested_boundaries.iter().map(|[a, b]| (a.clone(), b.clone()))));

    let mut contracts = Vec::new();
    let mut ledger = SettlementLedger::default();
    let mut schedules = Vec::new();

    for (idx, &hour) in scenario.hours.iter().enumerate() {
        let da = scenario.da_prices[idx];
        let rt = scenario.rt_prices[idx];
        let mut rng = hour_rng(cfg.seed, hour);
        let mut market = HourMarket::new(hour);
        market.open_window()?;

        for o in cfg.offers.iter().filter(|o| o.hour == hour) {
            let unit = scenario.unit(&o.seller).expect("offers validated against units");
            let surcharge = match o.direction {
                Direction::UpCoversUnder => unit.upward_opportunity_cost,
                Direction::DownCoversOver => 0.0,
            };
            market.post_offer(Offer {
                seller: o.seller.clone(),
                hour,
                direction: o.direction,
                price: o.price + surcharge,
                quantity: o.quantity,
                zone: unit.zone.clone(),
            })?;
        }

        let mut vg_inputs = Vec::with_capacity(scenario.vgs.len());
        for vg in &scenario.vgs {
            let schedule = vg.schedule(idx, da)?;
            let buyer = BuyerProfile {
                id: vg.id.clone(),
                zone: vg.zone.clone(),
                schedule,
                penalties: cfg.penalty,
                forecast: vg.forecast(idx)?,
            };
            market.match_demand(&buyer)?;
            let realized = match &vg.realized {
                Some(values) => values[idx],
                None => buyer.forecast.sample_with_uniform(rng.random::<f64>())?,
            };
            vg_inputs.push((buyer, realized));
        }
        market.close_window()?;

        let sellers: BTreeMap<String, SellerState> = scenario
            .units
            .iter()
            .map(|u| {
                (
                    u.id.clone(),
                    SellerState {
                        unit: u.at(idx),
                        zone: u.zone.clone(),
                    },
                )
            })
            .collect();
        market.validate(&sellers, zonal.as_ref())?;

        for (buyer, realized) in &vg_inputs {
            let near_rt = if cfg.claim_noise_sd > 0.0 {
                let z: f64 = rng.sample(StandardNormal);
                (realized + cfg.claim_noise_sd * z).clamp(0.0, buyer.schedule.capacity)
            } else {
                *realized
            };
            market.claim_execution(&buyer.id, buyer.schedule.da_quantity, near_rt)?;
        }
        market.close_rt()?;

        let units: Vec<UnitHourInput> = scenario
            .units
            .iter()
            .map(|u| {
                let unit = u.at(idx);
                let rt_output = match &u.rt_output {
                    Some(values) => values[idx],
                    None => rt_dispatch(&unit, rt),
                };
                UnitHourInput {
                    id: u.id.clone(),
                    unit,
                    rt_output,
                }
            })
            .collect();
        let input = SettlementInput {
            da_price: da,
            rt_price: rt,
            vgs: vg_inputs
                .iter()
                .map(|(b, realized)| VgHourInput {
                    id: b.id.clone(),
                    schedule: b.schedule,
                    penalties: b.penalties,
                    realized: *realized,
                })
                .collect(),
            units,
        };
        let settled = market.settle(&input)?;
        check_hour(hour, market.contracts(), &input, &settled.ledger, &settled.schedules, cfg.claim_noise_sd == 0.0)?;

        contracts.extend(market.into_contracts());
        ledger.extend(settled.ledger);
        schedules.extend(settled.schedules);
    }

    if ledger.grand_total() != 0.0 {
        return Err(Error::Invariant("day ledger does not sum to zero".into()));
    }
    let totals = ledger.nets();
    Ok(DayResult {
        contracts,
        ledger,
        schedules,
        totals,
    })
}

fn check_hour(
    hour: u32,
    contracts: &[BrsContract],
    input: &SettlementInput,
    ledger: &SettlementLedger,
    schedules: &[ScheduleRow],
    perfect_claims: bool,
) -> Result<()> {
    if ledger.grand_total() != 0.0 {
        return Err(Error::Invariant(format!("hour {hour}: ledger does not sum to zero")));
    }
    let before: f64 = schedules.iter().map(|r| r.original).sum();
    let after: f64 = schedules.iter().map(|r| r.modified).sum();
    check_close(|| format!("hour {hour}: total scheduled energy conserved"), after, before)?;

    let premium_of = |pred: &dyn Fn(&BrsContract) -> bool| -> f64 {
        contracts.iter().filter(|c| c.premium_due() && pred(c)).map(BrsContract::premium).sum()
    };

    for v in &input.vgs {
        let party = Party::Vg(v.id.clone());
        let net = ledger.net_for_hour(&party, hour);
        let premium = premium_of(&|c| c.buyer == v.id);
        let row = schedules.iter().find(|r| r.party == party).expect("every VG gets a schedule row");
        let at_modified = VgSchedule {
            da_quantity: row.modified.clamp(0.0, v.schedule.capacity),
            ..v.schedule
        };
        let formula = revenue_realized(&at_modified, &v.penalties, v.realized)? - premium;
        check_close(|| format!("hour {hour}: {party} net vs revenue on modified schedule"), net, formula)?;

        if perfect_claims {
            let cover = |d: Direction| -> f64 {
                contracts
                    .iter()
                    .filter(|c| c.buyer == v.id && c.direction == d && c.status() != ContractStatus::Rejected)
                    .map(|c| c.quantity)
                    .sum()
            };
            let pos = BrsPosition::new(
                cover(Direction::DownCoversOver).min(v.schedule.headroom(Direction::DownCoversOver)),
                cover(Direction::UpCoversUnder).min(v.schedule.headroom(Direction::UpCoversUnder)),
                0.0,
                0.0,
            );
            let formula = revenue_with_brs(&v.schedule, &v.penalties, &pos, v.realized)? - premium;
            check_close(|| format!("hour {hour}: {party} net vs revenue with BRS"), net, formula)?;
        }
    }

    for u in &input.units {
        let party = Party::Unit(u.id.clone());
        let net = ledger.net_for_hour(&party, hour);
        let premium = premium_of(&|c| c.seller == u.id);
        let executed: f64 = contracts
            .iter()
            .filter(|c| c.seller == u.id)
            .map(|c| c.direction.provider_shift_sign() * c.executed())
            .sum();
        let sc = JointScenario {
            da_price: input.da_price,
            rt_price: input.rt_price,
            executed,
        };
        let formula = revenue_unit_with_brs_at(&u.unit, &sc, u.rt_output)? + premium;
        check_close(|| format!("hour {hour}: {party} net vs unit revenue with BRS"), net, formula)?;
    }
    Ok(())
}

impl DayResult {
    pub fn contracts_table(&self) -> Table {
        let mut t = Table::new([
            "id", "hour", "buyer", "seller", "direction", "quantity", "premium_price", "status", "executed",
        ]);
        for c in &self.contracts {
            t.push(vec![
                c.id.to_string().into(),
                Cell::Num(c.hour.into()),
                c.buyer.as_str().into(),
                c.seller.as_str().into(),
                c.direction.label().into(),
                c.quantity.into(),
                c.premium_price.into(),
                c.status().label().into(),
                c.executed().into(),
            ]);
        }
        t
    }

    pub fn ledger_table(&self) -> Table {
        let mut t = Table::new(["hour", "payer", "payee", "tag", "amount", "contract"]);
        for e in &self.ledger.entries {
            t.push(vec![
                Cell::Num(e.hour.into()),
                e.payer.to_string().into(),
                e.payee.to_string().into(),
                e.tag.label().into(),
                e.amount.into(),
                e.contract.map(|c| c.to_string()).unwrap_or_default().into(),
            ]);
        }
        t
    }

    pub fn schedules_table(&self) -> Table {
        let mut t = Table::new(["hour", "party", "original", "modified", "actual"]);
        for r in &self.schedules {
            t.push(vec![
                Cell::Num(r.hour.into()),
                r.party.to_string().into(),
                r.original.into(),
                r.modified.into(),
                r.actual.into(),
            ]);
        }
        t
    }

    pub fn totals_table(&self) -> Table {
        let mut t = Table::new(["party", "net"]);
        for (p, v) in &self.totals {
            t.push(vec![p.to_string().into(), (*v).into()]);
        }
        t
    }
}
