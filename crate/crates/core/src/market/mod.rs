//! BRS market process for one delivery hour.
//!
//! After the day-ahead market clears, a transaction window opens in which
//! units post BRS offers and VG producers buy against them. Signed contracts
//! go to the operator for validation once the window closes. Before the
//! real-time market closes each buyer claims how much of its validated cover
//! to execute; the rest is released. Settlement then combines day-ahead and
//! real-time settlement with the executed contracts.
//!
//! [`HourMarket`] is the single owner of an hour's state and enforces the
//! phase order; distinct hours are independent.

mod book;
mod contract;
mod ledger;
mod matching;
mod settle;
mod sim;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::forecast::ForecastDistribution;
use crate::provider::DispatchableUnit;
use crate::vg::{PenaltyFactors, VgSchedule};

pub use book::{Offer, OfferBook, OfferId, RestingOffer};
pub use contract::{BrsContract, ContractId, ContractStatus};
pub use ledger::{LedgerEntry, LedgerTag, Party, SettlementLedger};
pub use matching::{MatchingRule, PriceProrata};
pub use settle::{apply_execution, HourSettlement, ScheduleRow, SettlementInput, UnitHourInput, VgHourInput};
pub use sim::{simulate_day, DayResult};

/// Schedules may exceed unit limits by this much through floating-point
/// accumulation of contract quantities.
pub const MW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    DaCleared,
    BrsWindowOpen,
    BrsWindowClosed,
    Validated,
    RtClaimed,
    Settled,
}

/// What a VG producer brings to the window.
#[derive(Debug, Clone)]
pub struct BuyerProfile {
    pub id: String,
    pub zone: Option<String>,
    pub schedule: VgSchedule,
    pub penalties: PenaltyFactors,
    pub forecast: ForecastDistribution,
}

/// A unit's state for validation.
#[derive(Debug, Clone)]
pub struct SellerState {
    pub unit: DispatchableUnit,
    pub zone: Option<String>,
}

/// Zone pairs across which BRS transactions are prohibited.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZonalRule {
    congested: BTreeSet<(String, String)>,
}

impl ZonalRule {
    pub fn new<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let congested = pairs
            .into_iter()
            .map(|(a, b)| {
                let (a, b) = (a.into(), b.into());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        Self { congested }
    }

    /// Contracts with an unknown zone on either side are not restricted.
    pub fn blocks(&self, a: Option<&str>, b: Option<&str>) -> bool {
        match (a, b) {
            (Some(a), Some(b)) if a != b => {
                let key = if a <= b { (a.to_owned(), b.to_owned()) } else { (b.to_owned(), a.to_owned()) };
                self.congested.contains(&key)
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExecutionClaim {
    pub executed_down: f64,
    pub executed_up: f64,
    /// `near_rt_output - modified schedule`
    pub residual_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct HourMarket {
    hour: u32,
    phase: Phase,
    book: OfferBook,
    contracts: Vec<BrsContract>,
    claimed: BTreeSet<String>,
    next_seq: u32,
}

impl HourMarket {
    pub fn new(hour: u32) -> Self {
        Self {
            hour,
            phase: Phase::DaCleared,
            book: OfferBook::default(),
            contracts: Vec::new(),
            claimed: BTreeSet::new(),
            next_seq: 0,
        }
    }

    pub fn hour(&self) -> u32 {
        self.hour
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn book(&self) -> &OfferBook {
        &self.book
    }

    pub fn contracts(&self) -> &[BrsContract] {
        &self.contracts
    }

    pub fn into_contracts(self) -> Vec<BrsContract> {
        self.contracts
    }

    fn require(&self, op: &'static str, phase: Phase, expected: &'static str) -> Result<()> {
        if self.phase != phase {
            return Err(Error::Phase {
                op,
                expected,
                found: self.phase,
            });
        }
        Ok(())
    }

    pub fn open_window(&mut self) -> Result<()> {
        self.require("open_window", Phase::DaCleared, "da_cleared")?;
        self.phase = Phase::BrsWindowOpen;
        Ok(())
    }

    pub fn post_offer(&mut self, offer: Offer) -> Result<OfferId> {
        self.require("post_offer", Phase::BrsWindowOpen, "brs_window_open")?;
        offer.validate()?;
        if offer.hour != self.hour {
            return Err(Error::domain(format!("offer for hour {} posted to hour {}", offer.hour, self.hour)));
        }
        Ok(self.book.insert(offer))
    }

    /// Buys the buyer's demand from the book with the default price-priority rule.
    pub fn match_demand(&mut self, buyer: &BuyerProfile) -> Result<Vec<ContractId>> {
        self.match_demand_with(&PriceProrata, buyer)
    }

    pub fn match_demand_with(&mut self, rule: &dyn MatchingRule, buyer: &BuyerProfile) -> Result<Vec<ContractId>> {
        self.require("match_demand", Phase::BrsWindowOpen, "brs_window_open")?;
        let mut signed = Vec::new();
        for direction in Direction::BOTH {
            let mut target = |price: f64| {
                crate::vg::optimal_quantity(&buyer.schedule, &buyer.penalties, &buyer.forecast, direction, price)
            };
            let fills = rule.allocate(self.book.side(direction), &mut target)?;
            for (idx, qty) in fills {
                if !(qty > 0.0) {
                    continue;
                }
                let resting = &mut self.book.side_mut(direction)[idx];
                let qty = qty.min(resting.remaining);
                resting.remaining -= qty;
                let (seller, price, zone) = (resting.offer.seller.clone(), resting.offer.price, resting.offer.zone.clone());
                let id = ContractId {
                    hour: self.hour,
                    seq: self.next_seq,
                };
                self.next_seq += 1;
                self.contracts.push(BrsContract::signed(
                    id,
                    &buyer.id,
                    &seller,
                    direction,
                    qty,
                    price,
                    buyer.zone.clone(),
                    zone,
                ));
                signed.push(id);
            }
        }
        Ok(signed)
    }

    pub fn close_window(&mut self) -> Result<()> {
        self.require("close_window", Phase::BrsWindowOpen, "brs_window_open")?;
        self.phase = Phase::BrsWindowClosed;
        Ok(())
    }

    /// Operator validation of every signed contract.
    ///
    /// Cross-boundary contracts are rejected first when a zonal rule is
    /// given. Then each seller's upward contracts must fit `p_max - p̂` and
    /// its downward contracts `p̂ - p_min`; an over-committed seller loses
    /// its newest contracts first, with the marginal contract split into a
    /// validated part and a rejected remainder.
    pub fn validate(
        &mut self,
        sellers: &BTreeMap<String, SellerState>,
        zonal_rule: Option<&ZonalRule>,
    ) -> Result<Vec<(ContractId, ContractStatus)>> {
        self.require("validate", Phase::BrsWindowClosed, "brs_window_closed")?;
        for c in &self.contracts {
            if !sellers.contains_key(&c.seller) {
                return Err(Error::domain(format!("contract {} names unknown seller `{}`", c.id, c.seller)));
            }
        }

        let mut verdict: Vec<Option<bool>> = vec![None; self.contracts.len()];
        if let Some(rule) = zonal_rule {
            for (i, c) in self.contracts.iter().enumerate() {
                let seller_zone = c.seller_zone.as_deref().or(sellers[&c.seller].zone.as_deref());
                if rule.blocks(c.buyer_zone.as_deref(), seller_zone) {
                    verdict[i] = Some(false);
                }
            }
        }

        let mut splits = Vec::new();
        for (seller, state) in sellers {
            for direction in Direction::BOTH {
                let limit = match direction {
                    Direction::UpCoversUnder => state.unit.upward_headroom(),
                    Direction::DownCoversOver => state.unit.downward_headroom(),
                }
                .max(0.0);
                let members: Vec<usize> = (0..self.contracts.len())
                    .filter(|&i| {
                        let c = &self.contracts[i];
                        &c.seller == seller && c.direction == direction && verdict[i].is_none()
                    })
                    .collect();
                let total: f64 = members.iter().map(|&i| self.contracts[i].quantity).sum();
                let mut excess = total - limit;
                for &i in members.iter().rev() {
                    if excess <= MW_TOLERANCE {
                        break;
                    }
                    let qty = self.contracts[i].quantity;
                    if qty <= excess + MW_TOLERANCE {
                        verdict[i] = Some(false);
                        excess -= qty;
                    } else {
                        splits.push((i, excess));
                        excess = 0.0;
                    }
                }
            }
        }

        for (i, cut) in splits {
            let keep = self.contracts[i].quantity - cut;
            let mut remainder = self.contracts[i].clone();
            remainder.id = ContractId {
                hour: self.hour,
                seq: self.next_seq,
            };
            self.next_seq += 1;
            remainder.quantity = cut;
            self.contracts[i].quantity = keep;
            self.contracts.push(remainder);
            verdict.push(Some(false));
        }

        let mut out = Vec::with_capacity(self.contracts.len());
        for (c, v) in self.contracts.iter_mut().zip(verdict) {
            let next = if v == Some(false) {
                ContractStatus::Rejected
            } else {
                ContractStatus::Validated
            };
            c.transition(next)?;
            out.push((c.id, next));
        }
        self.phase = Phase::Validated;
        Ok(out)
    }

    /// Executes cover against the deviation `near_rt_output - da_quantity`,
    /// pro-rata across the buyer's validated contracts on the needed side.
    pub fn claim_execution(&mut self, buyer: &str, da_quantity: f64, near_rt_output: f64) -> Result<ExecutionClaim> {
        self.require("claim_execution", Phase::Validated, "validated")?;
        if !self.claimed.insert(buyer.to_owned()) {
            return Err(Error::Lifecycle(format!("buyer `{buyer}` already claimed for hour {}", self.hour)));
        }
        let mut executed = [0.0; 2];
        for (k, direction) in Direction::BOTH.into_iter().enumerate() {
            let deviation = match direction {
                Direction::DownCoversOver => near_rt_output - da_quantity,
                Direction::UpCoversUnder => da_quantity - near_rt_output,
            }
            .max(0.0);
            let members: Vec<usize> = (0..self.contracts.len())
                .filter(|&i| {
                    let c = &self.contracts[i];
                    c.buyer == buyer && c.direction == direction && c.status() == ContractStatus::Validated
                })
                .collect();
            let cover: f64 = members.iter().map(|&i| self.contracts[i].quantity).sum();
            let total = deviation.min(cover);
            let mut left = total;
            for (n, &i) in members.iter().enumerate() {
                let c = &mut self.contracts[i];
                let amount = if n + 1 == members.len() {
                    left.clamp(0.0, c.quantity)
                } else {
                    (total * c.quantity / cover).min(c.quantity)
                };
                left -= amount;
                if amount > 0.0 {
                    c.transition(ContractStatus::Executed { amount })?;
                } else {
                    c.transition(ContractStatus::Released)?;
                }
            }
            executed[k] = total;
        }
        Ok(ExecutionClaim {
            executed_down: executed[0],
            executed_up: executed[1],
            residual_deviation: near_rt_output - (da_quantity + executed[0] - executed[1]),
        })
    }

    /// Closes real-time claiming; validated cover nobody claimed is released.
    pub fn close_rt(&mut self) -> Result<()> {
        self.require("close_rt", Phase::Validated, "validated")?;
        for c in &mut self.contracts {
            if c.status() == ContractStatus::Validated {
                c.transition(ContractStatus::Released)?;
            }
        }
        self.phase = Phase::RtClaimed;
        Ok(())
    }

    pub fn settle(&mut self, input: &SettlementInput) -> Result<HourSettlement> {
        self.require("settle", Phase::RtClaimed, "rt_claimed")?;
        let out = settle::settle_hour(self.hour, &self.contracts, input)?;
        self.phase = Phase::Settled;
        Ok(out)
    }
}
