//! Bilateral reserve service (BRS) market engine.
//!
//! Variable-generation (VG) producers buy re-dispatch capacity from
//! dispatchable units ahead of real time so that part of their day-ahead
//! deviation is absorbed by a schedule swap instead of an imbalance penalty.
//!
//! - [`forecast`]: Beta model of VG output on `[0, capacity]`.
//! - [`vg`]: producer revenue, marginal value of BRS, optimal purchase, imbalance cost split.
//! - [`provider`]: dispatchable-unit revenue with and without executed BRS, cash-flow risk.
//! - [`market`]: offer book, matching, validation, execution claims and double-entry settlement.
//! - [`io`]: hourly series, scenario files and result tables.
//! - [`experiments`]: the table builders behind the command-line tool and the browser demo.

// `!(x > 0.0)` is how inputs reject NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direction;
pub mod error;
pub mod experiments;
pub mod forecast;
pub mod io;
pub mod market;
pub mod numeric;
pub mod provider;
pub mod vg;

pub use error::{Error, Result};
pub use forecast::{ForecastDistribution, VarianceScale};
pub use direction::Direction;
pub use vg::{BrsPosition, PenaltyFactors, VgSchedule};
