mod common;

use std::path::{Path, PathBuf};

use brs_core::io::{
    format_number, load_scenario, load_series, read_table, save_scenario, write_series, write_table, Cell, HourlySeries,
    Scenario, SeriesSource, TableFormat, UnitTag,
};
use brs_core::market::simulate_day;
use brs_core::Error;
use common::{random_scenario, rng};
use proptest::prelude::*;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scenario_files_round_trip(seed in any::<u64>(), horizon in 1usize..24) {
        let cfg = random_scenario(&mut rng(seed), horizon, 0.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        save_scenario(&cfg, &path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        prop_assert_eq!(&loaded.config, &cfg);
        prop_assert_eq!(loaded, Scenario::from_config(cfg, dir.path()).unwrap());
    }
}

#[test]
fn file_series_resolve_like_inline_ones() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = random_scenario(&mut rng(3), 5, 0.0);
    let prices: Vec<f64> = (0..5).map(|h| 20.0 + 2.5 * f64::from(h)).collect();
    cfg.da_prices = SeriesSource::Inline(prices.clone());
    let inline = Scenario::from_config(cfg.clone(), dir.path()).unwrap();

    let series = HourlySeries {
        unit: UnitTag::DollarsPerMwh,
        hours: (1..=5).collect(),
        values: prices,
    };
    write_series(&series, &dir.path().join("da.csv")).unwrap();
    assert_eq!(load_series(&dir.path().join("da.csv"), UnitTag::DollarsPerMwh).unwrap(), series);
    cfg.da_prices = SeriesSource::File { file: "da.csv".into() };
    let path = dir.path().join("s.json");
    save_scenario(&cfg, &path).unwrap();
    let from_file = load_scenario(&path).unwrap();
    assert_eq!(from_file.da_prices, inline.da_prices);
    assert_eq!(from_file.vgs, inline.vgs);
}

#[test]
fn short_series_file_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("da.csv"), "hour,value\n1,30\n2,31\n").unwrap();
    let mut cfg = random_scenario(&mut rng(4), 3, 0.0);
    cfg.da_prices = SeriesSource::File { file: "da.csv".into() };
    let path = dir.path().join("s.json");
    save_scenario(&cfg, &path).unwrap();
    assert!(matches!(load_scenario(&path), Err(Error::Schema { .. })));
}

#[test]
fn shipped_scenarios_load() {
    for name in ["worked_example.json", "texas_day.json"] {
        let s = load_scenario(&scenarios_dir().join(name)).unwrap();
        assert_eq!(s.hours.len(), s.config.horizon);
    }
}

#[test]
fn day_tables_survive_a_file_round_trip() {
    let s = load_scenario(&scenarios_dir().join("texas_day.json")).unwrap();
    let day = simulate_day(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for table in [day.contracts_table(), day.ledger_table(), day.schedules_table(), day.totals_table()] {
        let json = dir.path().join("t.json");
        write_table(&table, &json, TableFormat::Json).unwrap();
        assert_eq!(read_table(&json, TableFormat::Json).unwrap(), table);

        let csv = dir.path().join("t.csv");
        write_table(&table, &csv, TableFormat::Csv).unwrap();
        let back = read_table(&csv, TableFormat::Csv).unwrap();
        assert_eq!(back.columns, table.columns);
        assert_eq!(back.rows.len(), table.rows.len());
        for (got, want) in back.rows.iter().flatten().zip(table.rows.iter().flatten()) {
            match (got, want) {
                (Cell::Num(g), Cell::Num(w)) => assert_eq!(format_number(*g), format_number(*w)),
                (Cell::Text(g), Cell::Text(w)) => assert_eq!(g, w),
                other => panic!("cell kind changed: {other:?}"),
            }
        }
    }
}
