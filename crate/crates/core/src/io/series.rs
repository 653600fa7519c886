use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::table::format_number;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitTag {
    #[serde(rename = "$/MWh")]
    DollarsPerMwh,
    #[serde(rename = "MW")]
    Mw,
}

impl fmt::Display for UnitTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitTag::DollarsPerMwh => "$/MWh",
            UnitTag::Mw => "MW",
        })
    }
}

/// One value per hour over a contiguous, strictly increasing range of hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlySeries {
    pub unit: UnitTag,
    pub hours: Vec<u32>,
    pub values: Vec<f64>,
}

impl HourlySeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn expect_unit(&self, unit: UnitTag) -> Result<&Self> {
        if self.unit != unit {
            return Err(Error::domain(format!("series carries {} but {unit} is required", self.unit)));
        }
        Ok(self)
    }

    pub fn get(&self, hour: u32) -> Option<f64> {
        let first = *self.hours.first()?;
        let idx = hour.checked_sub(first)? as usize;
        self.values.get(idx).copied()
    }
}

/// Reads a `hour,value` CSV.
pub fn load_series(path: &Path, unit: UnitTag) -> Result<HourlySeries> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        file: path.to_path_buf(),
        line,
        reason,
    };
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["hour", "value"] {
        return Err(parse_err(1, format!("expected header `hour,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }

    let mut hours = Vec::new();
    let mut values = Vec::new();
    let mut seen = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let hour_text = record.get(0).unwrap_or("").trim();
        let value_text = record.get(1).unwrap_or("").trim();
        let hour: u32 = hour_text
            .parse()
            .map_err(|_| parse_err(line, format!("hour `{hour_text}` is not a nonnegative integer")))?;
        let value = parse_decimal(value_text).ok_or_else(|| parse_err(line, format!("value `{value_text}` is not a finite decimal number")))?;
        if !seen.insert(hour) {
            return Err(parse_err(line, format!("duplicate hour {hour}")));
        }
        if let Some(&prev) = hours.last() {
            if hour != prev + 1 {
                return Err(parse_err(
                    line,
                    if hour < prev {
                        format!("hour {hour} out of order after {prev}")
                    } else {
                        format!("missing hour(s) between {prev} and {hour}")
                    },
                ));
            }
        }
        hours.push(hour);
        values.push(value);
    }
    if hours.is_empty() {
        return Err(parse_err(1, "series has no data rows".into()));
    }
    Ok(HourlySeries { unit, hours, values })
}

/// Plain decimal or scientific notation; `nan`, `inf` and friends are refused.
fn parse_decimal(text: &str) -> Option<f64> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E')) {
        return None;
    }
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn write_series(series: &HourlySeries, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = String::from("hour,value\n");
    for (h, v) in series.hours.iter().zip(&series.values) {
        out.push_str(&format!("{h},{}\n", format_number(*v)));
    }
    File::create(path).and_then(|mut f| f.write_all(out.as_bytes())).map_err(io_err)
}
