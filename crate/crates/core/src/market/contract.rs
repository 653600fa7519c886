use std::fmt;

use serde::{Deserialize, Serialize};

use crate::direction::Direction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContractId {
    pub hour: u32,
    pub seq: u32,
}

impl fmt::Display for ContractId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h{}-c{}", self.hour, self.seq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum ContractStatus {
    Signed,
    Validated,
    Rejected,
    /// Executed `amount` MW; any remainder of the contract was released.
    Executed { amount: f64 },
    /// Validated but not used.
    Released,
}

impl ContractStatus {
    pub fn label(&self) -> &'static str {
        match self {
            ContractStatus::Signed => "signed",
            ContractStatus::Validated => "validated",
            ContractStatus::Rejected => "rejected",
            ContractStatus::Executed { .. } => "executed",
            ContractStatus::Released => "released",
        }
    }

    /// signed -> validated | rejected; validated -> executed | released.
    pub fn can_become(&self, next: &ContractStatus) -> bool {
        matches!(
            (self, next),
            (ContractStatus::Signed, ContractStatus::Validated)
                | (ContractStatus::Signed, ContractStatus::Rejected)
                | (ContractStatus::Validated, ContractStatus::Executed { .. })
                | (ContractStatus::Validated, ContractStatus::Released)
        )
    }

    pub fn is_final(&self) -> bool {
        matches!(
            self,
            ContractStatus::Rejected | ContractStatus::Executed { .. } | ContractStatus::Released
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrsContract {
    pub id: ContractId,
    pub buyer: String,
    pub seller: String,
    pub hour: u32,
    pub direction: Direction,
    /// MW
    pub quantity: f64,
    /// $/MW
    pub premium_price: f64,
    pub buyer_zone: Option<String>,
    pub seller_zone: Option<String>,
    status: ContractStatus,
}

impl BrsContract {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn signed(
        id: ContractId,
        buyer: &str,
        seller: &str,
        direction: Direction,
        quantity: f64,
        premium_price: f64,
        buyer_zone: Option<String>,
        seller_zone: Option<String>,
    ) -> Self {
        debug_assert!(quantity > 0.0);
        Self {
            id,
            buyer: buyer.to_owned(),
            seller: seller.to_owned(),
            hour: id.hour,
            direction,
            quantity,
            premium_price,
            buyer_zone,
            seller_zone,
            status: ContractStatus::Signed,
        }
    }

    pub fn status(&self) -> ContractStatus {
        self.status
    }

    pub(crate) fn transition(&mut self, next: ContractStatus) -> Result<()> {
        if !self.status.can_become(&next) {
            return Err(Error::Lifecycle(format!(
                "contract {} cannot move from {} to {}",
                self.id,
                self.status.label(),
                next.label()
            )));
        }
        if let ContractStatus::Executed { amount } = next {
            if !(amount > 0.0 && amount <= self.quantity) {
                return Err(Error::Lifecycle(format!(
                    "contract {} executed amount {amount} outside (0, {}]",
                    self.id, self.quantity
                )));
            }
        }
        self.status = next;
        Ok(())
    }

    /// Executed MW (zero unless executed).
    pub fn executed(&self) -> f64 {
        match self.status {
            ContractStatus::Executed { amount } => amount,
            _ => 0.0,
        }
    }

    /// Whether the premium is owed: validated capacity is paid for even when released.
    pub fn premium_due(&self) -> bool {
        matches!(
            self.status,
            ContractStatus::Validated | ContractStatus::Executed { .. } | ContractStatus::Released
        )
    }

    pub fn premium(&self) -> f64 {
        self.premium_price * self.quantity
    }
}
