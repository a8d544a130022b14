use std::collections::HashMap;
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime};

use super::{ActivityKey, EventLog, Trace};
use crate::error::{Error, Result};

/// Column mapping for CSV event logs.
///
/// Without a timestamp column, events of a case keep their file row order.
#[derive(Debug, Clone)]
pub struct CsvConfig {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvConfig {
    fn default() -> Self {
        CsvConfig {
            case_column: "case".into(),
            activity_column: "activity".into(),
            timestamp_column: None,
            delimiter: b',',
        }
    }
}

/// Reads a CSV log with a header row, grouping rows into cases.
pub fn parse_csv<R: Read>(input: R, config: &CsvConfig, key: &mut ActivityKey) -> Result<EventLog> {
    let mut reader = ::csv::ReaderBuilder::new()
        .delimiter(config.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(input);

    let headers = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config(format!("column {name:?} not found in CSV header")))
    };
    let case_idx = column(&config.case_column)?;
    let activity_idx = column(&config.activity_column)?;
    let time_idx = config.timestamp_column.as_deref().map(column).transpose()?;

    // case id -> (first row seen, events as (timestamp, row, activity))
    let mut cases: HashMap<String, Vec<(f64, u64, String)>> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let case = record.get(case_idx).unwrap_or("").to_owned();
        let activity = record.get(activity_idx).unwrap_or("").trim();
        if activity.is_empty() {
            return Err(Error::Row {
                row,
                message: "empty activity".into(),
            });
        }
        let stamp = match time_idx {
            Some(i) => parse_timestamp(record.get(i).unwrap_or("")).ok_or_else(|| Error::Row {
                row,
                message: format!("unparseable timestamp {:?}", record.get(i).unwrap_or("")),
            })?,
            None => 0.0,
        };
        cases
            .entry(case)
            .or_default()
            .push((stamp, row, activity.to_owned()));
    }

    let mut traces = Vec::with_capacity(cases.len());
    for (_, mut events) in cases {
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        traces.push(Trace(
            events.iter().map(|(_, _, a)| key.intern(a)).collect(),
        ));
    }
    Ok(EventLog::from_traces(traces, key))
}

fn csv_error(e: &::csv::Error) -> Error {
    match e.position() {
        Some(p) => Error::Row {
            row: p.line(),
            message: e.to_string(),
        },
        None => Error::Config(e.to_string()),
    }
}

/// Accepts RFC 3339, `YYYY-MM-DD[ T]HH:MM:SS[.f]`, plain dates, or a number.
/// Returns seconds since the epoch (or the number itself).
fn parse_timestamp(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(v) = s.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(epoch_seconds(dt.naive_utc()));
    }
    for fmt in [
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y/%m/%d %H:%M:%S%.f",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(epoch_seconds(dt));
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(epoch_seconds)
}

fn epoch_seconds(dt: NaiveDateTime) -> f64 {
    let utc = dt.and_utc();
    utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(ts: bool) -> CsvConfig {
        CsvConfig {
            timestamp_column: ts.then(|| "time".to_owned()),
            ..CsvConfig::default()
        }
    }

    #[test]
    fn groups_rows_in_file_order() {
        let mut key = ActivityKey::new();
        let data = "case,activity\nc1,a\nc1,b\nc2,a\n";
        let log = parse_csv(data.as_bytes(), &config(false), &mut key).unwrap();
        assert_eq!(log.frequency(&key.trace(&["a", "b"])), Some(1));
        assert_eq!(log.frequency(&key.trace(&["a"])), Some(1));
        assert_eq!(log.total_traces(), 2);
    }

    #[test]
    fn sorts_by_timestamp() {
        let mut key = ActivityKey::new();
        let data = "case,activity,time\nc1,b,2\nc1,a,1\n";
        let log = parse_csv(data.as_bytes(), &config(true), &mut key).unwrap();
        assert_eq!(log.variants(), &[(key.trace(&["a", "b"]), 1)]);
    }

    #[test]
    fn sorts_by_datetime_and_keeps_row_order_on_ties() {
        let mut key = ActivityKey::new();
        let data = "case;activity;time\n\
                    1;c;2021-01-02T10:00:00Z\n\
                    1;a;2021-01-01 09:00:00\n\
                    1;b;2021-01-01 09:00:00\n";
        let cfg = CsvConfig {
            delimiter: b';',
            ..config(true)
        };
        let log = parse_csv(data.as_bytes(), &cfg, &mut key).unwrap();
        assert_eq!(log.variants(), &[(key.trace(&["a", "b", "c"]), 1)]);
    }

    #[test]
    fn quoted_fields() {
        let mut key = ActivityKey::new();
        let data = "case,activity\n\"c,1\",\"Register \"\"X\"\"\"\n";
        let log = parse_csv(data.as_bytes(), &config(false), &mut key).unwrap();
        assert_eq!(log.variants(), &[(key.trace(&["Register \"X\""]), 1)]);
    }

    #[test]
    fn missing_column_is_config_error() {
        let mut key = ActivityKey::new();
        let data = "case,event\nc1,a\n";
        let err = parse_csv(data.as_bytes(), &config(false), &mut key).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err:?}");
    }

    #[test]
    fn bad_timestamp_names_row() {
        let mut key = ActivityKey::new();
        let data = "case,activity,time\nc1,a,1\nc1,b,yesterday\n";
        match parse_csv(data.as_bytes(), &config(true), &mut key) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
