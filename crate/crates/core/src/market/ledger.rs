use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ExactSum;

use super::contract::ContractId;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "role", content = "id", rename_all = "snake_case")]
pub enum Party {
    Vg(String),
    Unit(String),
    /// The DA/RT market operator's settlement account.
    Pool,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Vg(id) => write!(f, "vg:{id}"),
            Party::Unit(id) => write!(f, "unit:{id}"),
            Party::Pool => f.write_str("pool"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerTag {
    Premium,
    DaEnergy,
    BrsEnergyShift,
    RtImbalance,
    Penalty,
}

impl LedgerTag {
    pub fn label(self) -> &'static str {
        match self {
            LedgerTag::Premium => "premium",
            LedgerTag::DaEnergy => "da_energy",
            LedgerTag::BrsEnergyShift => "brs_energy_shift",
            LedgerTag::RtImbalance => "rt_imbalance",
            LedgerTag::Penalty => "penalty",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub hour: u32,
    pub payer: Party,
    pub payee: Party,
    /// $, always positive
    pub amount: f64,
    pub tag: LedgerTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contract: Option<ContractId>,
}

/// Double-entry record of cash flows: each entry debits its payer and
/// credits its payee by the same amount.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SettlementLedger {
    pub entries: Vec<LedgerEntry>,
}

impl SettlementLedger {
    /// Records a flow of `amount` from `payer` to `payee`; a negative amount
    /// is recorded in the opposite direction and zero is skipped.
    pub fn transfer(
        &mut self,
        hour: u32,
        payer: Party,
        payee: Party,
        amount: f64,
        tag: LedgerTag,
        contract: Option<ContractId>,
    ) -> Result<()> {
        if !amount.is_finite() {
            return Err(Error::Invariant(format!("non-finite {} amount between {payer} and {payee}", tag.label())));
        }
        if payer == payee {
            return Err(Error::Invariant(format!("{} entry with identical payer and payee {payer}", tag.label())));
        }
        if amount == 0.0 {
            return Ok(());
        }
        let (payer, payee, amount) = if amount < 0.0 { (payee, payer, -amount) } else { (payer, payee, amount) };
        self.entries.push(LedgerEntry {
            hour,
            payer,
            payee,
            amount,
            tag,
            contract,
        });
        Ok(())
    }

    pub fn extend(&mut self, other: SettlementLedger) {
        self.entries.extend(other.entries);
    }

    /// Cash position of `party`: credits minus debits, exactly rounded.
    pub fn net(&self, party: &Party) -> f64 {
        let mut acc = ExactSum::new();
        for e in &self.entries {
            if &e.payee == party {
                acc.add(e.amount);
            }
            if &e.payer == party {
                acc.add(-e.amount);
            }
        }
        acc.value()
    }

    pub fn net_for_hour(&self, party: &Party, hour: u32) -> f64 {
        let mut acc = ExactSum::new();
        for e in self.entries.iter().filter(|e| e.hour == hour) {
            if &e.payee == party {
                acc.add(e.amount);
            }
            if &e.payer == party {
                acc.add(-e.amount);
            }
        }
        acc.value()
    }

    pub fn parties(&self) -> Vec<Party> {
        let mut set: Vec<Party> = self
            .entries
            .iter()
            .flat_map(|e| [e.payer.clone(), e.payee.clone()])
            .collect();
        set.sort();
        set.dedup();
        set
    }

    pub fn nets(&self) -> BTreeMap<Party, f64> {
        self.parties().into_iter().map(|p| {
            let n = self.net(&p);
            (p, n)
        }).collect()
    }

    /// Exact sum of every signed flow (each entry counted for payer and payee).
    pub fn grand_total(&self) -> f64 {
        let mut acc = ExactSum::new();
        for e in &self.entries {
            acc.add(e.amount);
            acc.add(-e.amount);
        }
        acc.value()
    }
}
