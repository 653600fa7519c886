use std::fmt;

use serde::{Deserialize, Serialize};

/// Side of a BRS contract.
///
/// Downward BRS (`r+`) covers VG over-generation: on execution the VG's
/// day-ahead schedule rises and the provider's falls by the same amount.
/// Upward BRS (`r-`) covers under-generation with the signs reversed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "down")]
    DownCoversOver,
    #[serde(rename = "up")]
    UpCoversUnder,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::DownCoversOver, Direction::UpCoversUnder];

    pub fn label(self) -> &'static str {
        match self {
            Direction::DownCoversOver => "down",
            Direction::UpCoversUnder => "up",
        }
    }

    /// Change of the provider's schedule per MW executed.
    pub fn provider_shift_sign(self) -> f64 {
        match self {
            Direction::DownCoversOver => -1.0,
            Direction::UpCoversUnder => 1.0,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "down" => Ok(Direction::DownCoversOver),
            "up" => Ok(Direction::UpCoversUnder),
            other => Err(format!("unknown direction `{other}` (expected `down` or `up`)")),
        }
    }
}
