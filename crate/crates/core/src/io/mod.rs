//! Hourly series, scenario files and result tables.

mod scenario;
mod series;
mod table;

pub use scenario::{
    load_scenario, save_scenario, BrsPriceModel, HourlyValue, OfferConfig, ResolvedUnit, ResolvedVg, Scenario,
    ScenarioConfig, SeriesSource, UnitConfig, VgConfig,
};
pub use series::{load_series, write_series, HourlySeries, UnitTag};
pub use table::{format_number, read_table, write_table, Cell, Table, TableFormat};
