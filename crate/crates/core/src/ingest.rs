//! Wait-time and weather ingestion.
//!
//! Wait times arrive as five-minute samples for PB and LQ and as a single
//! hourly value for RB. Everything is averaged per calendar hour and only
//! hours 7 through 21 (inclusive) are kept.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Duration, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M";
pub const WAIT_TIMES_HEADER: [&str; 5] = [
    "timestamp",
    "bridge",
    "direction",
    "vehicle_type",
    "wait_minutes",
];
pub const WEATHER_HEADER: [&str; 5] = [
    "timestamp",
    "temperature_f",
    "visibility",
    "precipitation_in",
    "condition",
];

/// First and last hour of the observation window.
pub const FIRST_HOUR: u32 = 7;
pub const LAST_HOUR: u32 = 21;

/// Weather older than this is not joined onto an hour.
pub const MAX_WEATHER_STALENESS_HOURS: i64 = 3;

macro_rules! text_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                let s = s.trim();
                $(
                    if s.eq_ignore_ascii_case($text) {
                        return Ok($name::$variant);
                    }
                )+
                Err(format!("unknown {} `{}`", stringify!($name).to_lowercase(), s))
            }
        }
    };
}

text_enum!(
    /// The three crossings, in the order used by delay patterns.
    Bridge { Pb => "PB", Rb => "RB", Lq => "LQ" }
);

text_enum!(
    Direction { ToUs => "to_us", ToCan => "to_can" }
);

text_enum!(
    Vehicle { Passenger => "passenger", Commercial => "commercial" }
);

text_enum!(
    WeatherCondition { Snow => "Snow", Rain => "Rain", Clear => "Clear" }
);

impl Vehicle {
    /// Bridges open to this vehicle type. Trucks cannot use RB.
    pub fn bridges(self) -> &'static [Bridge] {
        match self {
            Vehicle::Passenger => &[Bridge::Pb, Bridge::Rb, Bridge::Lq],
            Vehicle::Commercial => &[Bridge::Pb, Bridge::Lq],
        }
    }
}

impl Bridge {
    pub fn carries(self, vehicle: Vehicle) -> bool {
        !(self == Bridge::Rb && vehicle == Vehicle::Commercial)
    }
}

/// Every (direction, vehicle) group, in report order.
pub fn groups() -> [(Direction, Vehicle); 4] {
    [
        (Direction::ToUs, Vehicle::Passenger),
        (Direction::ToCan, Vehicle::Passenger),
        (Direction::ToUs, Vehicle::Commercial),
        (Direction::ToCan, Vehicle::Commercial),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawWaitTimeRecord {
    pub timestamp: NaiveDateTime,
    pub bridge: Bridge,
    pub direction: Direction,
    pub vehicle: Vehicle,
    pub wait_minutes: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: NaiveDateTime,
    pub temperature_f: f64,
    pub visibility: u8,
    pub precipitation_in: f64,
    pub condition: WeatherCondition,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HourlyWait {
    pub hour_start: NaiveDateTime,
    pub bridge: Bridge,
    pub direction: Direction,
    pub vehicle: Vehicle,
    pub mean_wait_minutes: f64,
    pub sample_count: usize,
}

pub fn parse_timestamp(s: &str) -> std::result::Result<NaiveDateTime, String> {
    NaiveDateTime::parse_from_str(s.trim(), TIMESTAMP_FORMAT)
        .map_err(|e| format!("malformed timestamp `{}`: {e}", s.trim()))
}

pub fn format_timestamp(ts: NaiveDateTime) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}

pub fn hour_floor(ts: NaiveDateTime) -> NaiveDateTime {
    ts.date().and_hms_opt(ts.hour(), 0, 0).expect("valid hour")
}

pub(crate) fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

pub(crate) fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| Error::data_at(1, format!("unreadable header: {e}")))?;
    let found: Vec<&str> = header.iter().collect();
    if found != expected {
        return Err(Error::data_at(
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

pub(crate) fn records<'r, 'a: 'r>(
    reader: &'r mut csv::Reader<&'a [u8]>,
) -> impl Iterator<Item = Result<(u64, csv::StringRecord)>> + use<'r, 'a> {
    reader.records().map(|rec| {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::data_at(line, format!("malformed row: {e}"))
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        Ok((line, rec))
    })
}

pub(crate) fn parse_field<T: FromStr>(value: &str, line: u64, what: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::data_at(line, format!("invalid {what} `{value}`: {e}")))
}

pub(crate) fn parse_finite(value: &str, line: u64, what: &str) -> Result<f64> {
    let v: f64 = parse_field(value, line, what)?;
    if !v.is_finite() {
        return Err(Error::data_at(
            line,
            format!("{what} must be finite, got `{value}`"),
        ));
    }
    Ok(v)
}

/// Parses `wait_times.csv` content. Rows are returned in file order.
pub fn parse_wait_times(text: &str) -> Result<Vec<RawWaitTimeRecord>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &WAIT_TIMES_HEADER)?;
    let mut out = Vec::new();
    for rec in records(&mut reader) {
        let (line, rec) = rec?;
        let timestamp = parse_timestamp(&rec[0]).map_err(|e| Error::data_at(line, e))?;
        let bridge: Bridge = parse_field(&rec[1], line, "bridge")?;
        let direction: Direction = parse_field(&rec[2], line, "direction")?;
        let vehicle: Vehicle = parse_field(&rec[3], line, "vehicle_type")?;
        let wait_minutes = parse_finite(&rec[4], line, "wait_minutes")?;
        if wait_minutes < 0.0 {
            return Err(Error::data_at(
                line,
                format!("negative wait time {wait_minutes}"),
            ));
        }
        if !bridge.carries(vehicle) {
            return Err(Error::data_at(
                line,
                "commercial vehicles are not permitted on RB",
            ));
        }
        out.push(RawWaitTimeRecord {
            timestamp,
            bridge,
            direction,
            vehicle,
            wait_minutes,
        });
    }
    Ok(out)
}

/// Parses `weather.csv` content. Negative temperatures are accepted.
pub fn parse_weather(text: &str) -> Result<Vec<WeatherRecord>> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &WEATHER_HEADER)?;
    let mut out = Vec::new();
    for rec in records(&mut reader) {
        let (line, rec) = rec?;
        let timestamp = parse_timestamp(&rec[0]).map_err(|e| Error::data_at(line, e))?;
        let temperature_f = parse_finite(&rec[1], line, "temperature_f")?;
        let visibility: u8 = parse_field(&rec[2], line, "visibility")?;
        if !(1..=10).contains(&visibility) {
            return Err(Error::data_at(
                line,
                format!("visibility {visibility} outside 1..=10"),
            ));
        }
        let precipitation_in = parse_finite(&rec[3], line, "precipitation_in")?;
        if precipitation_in < 0.0 {
            return Err(Error::data_at(
                line,
                format!("negative precipitation {precipitation_in}"),
            ));
        }
        let condition: WeatherCondition = parse_field(&rec[4], line, "condition")?;
        out.push(WeatherRecord {
            timestamp,
            temperature_f,
            visibility,
            precipitation_in,
            condition,
        });
    }
    Ok(out)
}

pub fn in_window(hour: u32) -> bool {
    (FIRST_HOUR..=LAST_HOUR).contains(&hour)
}

/// Averages samples per (calendar hour, bridge, direction, vehicle).
///
/// Output is sorted by that key and contains only hours 7..=21. Each group
/// is summed in sorted order, so the result does not depend on the order
/// of `records`.
pub fn aggregate_hourly(records: &[RawWaitTimeRecord]) -> Vec<HourlyWait> {
    type Key = (NaiveDateTime, Bridge, Direction, Vehicle);
    let mut groups: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| in_window(r.timestamp.hour())) {
        groups
            .entry((hour_floor(r.timestamp), r.bridge, r.direction, r.vehicle))
            .or_default()
            .push(r.wait_minutes);
    }
    groups
        .into_iter()
        .map(|((hour_start, bridge, direction, vehicle), mut waits)| {
            waits.sort_by(f64::total_cmp);
            let sum: f64 = waits.iter().sum();
            let (lo, hi) = (waits[0], waits[waits.len() - 1]);
            // rounding can push the quotient a hair past the extremes
            let mean = (sum / waits.len() as f64).clamp(lo, hi);
            HourlyWait {
                hour_start,
                bridge,
                direction,
                vehicle,
                mean_wait_minutes: mean,
                sample_count: waits.len(),
            }
        })
        .collect()
}

/// Pairs each hour with its weather: the record inside the same hour if
/// there is one, else the most recent earlier record no more than three
/// hours old.
pub fn join_weather(
    hours: &[HourlyWait],
    weather: &[WeatherRecord],
) -> Result<Vec<(HourlyWait, WeatherRecord)>> {
    let mut sorted: Vec<&WeatherRecord> = weather.iter().collect();
    sorted.sort_by_key(|w| w.timestamp);
    let max_gap = Duration::hours(MAX_WEATHER_STALENESS_HOURS);

    hours
        .iter()
        .map(|h| {
            let start = hour_floor(h.hour_start);
            let idx = sorted.partition_point(|w| w.timestamp < start);
            let exact = sorted
                .get(idx)
                .filter(|w| w.timestamp < start + Duration::hours(1));
            let chosen = exact.or_else(|| {
                idx.checked_sub(1)
                    .map(|i| &sorted[i])
                    .filter(|w| start - w.timestamp <= max_gap)
            });
            match chosen {
                Some(w) => Ok((h.clone(), (*w).clone())),
                None => Err(Error::data(format!(
                    "no weather record within {MAX_WEATHER_STALENESS_HOURS} hours before {}",
                    format_timestamp(start)
                ))),
            }
        })
        .collect()
}
