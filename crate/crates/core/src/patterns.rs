//! Delay categories and multi-bridge delay patterns.
//!
//! Each hourly mean wait is discretized as
//!
//! | category      | wait (minutes) |
//! |---------------|----------------|
//! | no delay      | 0              |
//! | slight delay  | (0, 15]        |
//! | delay         | (15, 30]       |
//! | heavy delay   | > 30           |
//!
//! For the classification target "no delay" is folded into "slight delay"
//! and the per-bridge categories are joined in bridge order (PB, RB, LQ;
//! trucks skip RB), e.g. `delay-slight delay-slight delay`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDateTime, Timelike};

use crate::cart::{grow_tree, Dataset, DecisionTree, TrainConfig};
use crate::error::{Error, Result};
use crate::features::{
    hour_interval_of, season_of, Calendars, FeatureSchema, FeatureVector, HourInterval, Season,
};
use crate::ingest::{
    self, Bridge, Direction, HourlyWait, Vehicle, WeatherCondition, WeatherRecord,
};

pub const SLIGHT_DELAY_MAX_MINUTES: f64 = 15.0;
pub const DELAY_MAX_MINUTES: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DelayCategory4 {
    NoDelay,
    SlightDelay,
    Delay,
    HeavyDelay,
}

impl DelayCategory4 {
    pub const ALL: [DelayCategory4; 4] = [
        DelayCategory4::NoDelay,
        DelayCategory4::SlightDelay,
        DelayCategory4::Delay,
        DelayCategory4::HeavyDelay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DelayCategory4::NoDelay => "no delay",
            DelayCategory4::SlightDelay => "slight delay",
            DelayCategory4::Delay => "delay",
            DelayCategory4::HeavyDelay => "heavy delay",
        }
    }

    /// Folds "no delay" into "slight delay".
    pub fn merged(self) -> DelayCategory3 {
        match self {
            DelayCategory4::NoDelay | DelayCategory4::SlightDelay => DelayCategory3::SlightDelay,
            DelayCategory4::Delay => DelayCategory3::Delay,
            DelayCategory4::HeavyDelay => DelayCategory3::HeavyDelay,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DelayCategory3 {
    SlightDelay,
    Delay,
    HeavyDelay,
}

impl DelayCategory3 {
    pub const ALL: [DelayCategory3; 3] = [
        DelayCategory3::SlightDelay,
        DelayCategory3::Delay,
        DelayCategory3::HeavyDelay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DelayCategory3::SlightDelay => "slight delay",
            DelayCategory3::Delay => "delay",
            DelayCategory3::HeavyDelay => "heavy delay",
        }
    }
}

impl From<DelayCategory4> for DelayCategory3 {
    fn from(c: DelayCategory4) -> Self {
        c.merged()
    }
}

impl fmt::Display for DelayCategory4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for DelayCategory3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn categorize(wait_minutes: f64) -> Result<DelayCategory4> {
    if wait_minutes.is_nan() || wait_minutes < 0.0 {
        return Err(Error::data(format!("invalid wait time {wait_minutes}")));
    }
    Ok(if wait_minutes == 0.0 {
        DelayCategory4::NoDelay
    } else if wait_minutes <= SLIGHT_DELAY_MAX_MINUTES {
        DelayCategory4::SlightDelay
    } else if wait_minutes <= DELAY_MAX_MINUTES {
        DelayCategory4::Delay
    } else {
        DelayCategory4::HeavyDelay
    })
}

/// Per-bridge merged categories, in bridge order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DelayPattern(Vec<DelayCategory3>);

impl DelayPattern {
    pub fn new(levels: Vec<DelayCategory3>) -> Self {
        DelayPattern(levels)
    }

    pub fn levels(&self) -> &[DelayCategory3] {
        &self.0
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Every pattern over `bridges` bridges: 3^bridges values.
    pub fn all(bridges: usize) -> Vec<DelayPattern> {
        let mut out = vec![Vec::new()];
        for _ in 0..bridges {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    DelayCategory3::ALL.into_iter().map(move |c| {
                        let mut next = prefix.clone();
                        next.push(c);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(DelayPattern).collect()
    }

    /// All patterns for a vehicle type (27 for passenger cars, 9 for trucks).
    pub fn space(vehicle: Vehicle) -> Vec<DelayPattern> {
        DelayPattern::all(vehicle.bridges().len())
    }
}

impl fmt::Display for DelayPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            f.write_str(c.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for DelayPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let levels = s
            .split('-')
            .map(|part| {
                DelayCategory3::ALL
                    .into_iter()
                    .find(|c| c.as_str() == part.trim())
                    .ok_or_else(|| Error::data(format!("unknown delay level `{part}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DelayPattern(levels))
    }
}

/// One kept hour for one (direction, vehicle) group.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub hour_start: NaiveDateTime,
    pub direction: Direction,
    pub vehicle: Vehicle,
    /// Mean waits aligned with `vehicle.bridges()`.
    pub waits: Vec<f64>,
    pub pattern: DelayPattern,
    pub features: FeatureVector,
}

impl Observation {
    pub fn wait(&self, bridge: Bridge) -> Option<f64> {
        self.vehicle
            .bridges()
            .iter()
            .position(|b| *b == bridge)
            .map(|i| self.waits[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternDataset {
    pub direction: Direction,
    pub vehicle: Vehicle,
    pub schema: FeatureSchema,
    pub rows: Vec<Observation>,
}

impl PatternDataset {
    pub fn new(direction: Direction, vehicle: Vehicle) -> Self {
        PatternDataset {
            direction,
            vehicle,
            schema: FeatureSchema::border_delay(),
            rows: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Learner input: encoded features plus pattern labels.
    pub fn training_set(&self) -> Result<Dataset> {
        Dataset::from_labeled(
            self.schema.clone(),
            self.rows.iter().map(|r| r.features.values()).collect(),
            self.rows.iter().map(|r| r.pattern.label()).collect(),
        )
    }

    pub fn train(&self, cfg: &TrainConfig) -> Result<DecisionTree> {
        grow_tree(&self.training_set()?, cfg)
    }

    /// Rows of `observations` belonging to this group, in input order.
    pub fn from_observations(
        observations: &[Observation],
        direction: Direction,
        vehicle: Vehicle,
    ) -> Self {
        let mut ds = PatternDataset::new(direction, vehicle);
        ds.rows = observations
            .iter()
            .filter(|o| o.direction == direction && o.vehicle == vehicle)
            .cloned()
            .collect();
        ds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembled {
    pub dataset: PatternDataset,
    /// Hours missing at least one bridge's value.
    pub skipped_incomplete: usize,
    /// Hours where every bridge had a zero mean wait.
    pub dropped_all_zero: usize,
}

/// Builds the labelled rows for one (direction, vehicle) group.
///
/// Hours without a value for every bridge are skipped and tallied, as are
/// hours where all bridges waited exactly zero minutes.
pub fn assemble_rows(
    joined: &[(HourlyWait, WeatherRecord)],
    direction: Direction,
    vehicle: Vehicle,
    calendars: &Calendars,
) -> Result<Assembled> {
    let bridges = vehicle.bridges();
    let mut by_hour: BTreeMap<NaiveDateTime, (Vec<Option<f64>>, &WeatherRecord)> = BTreeMap::new();
    for (h, w) in joined {
        if h.direction != direction || h.vehicle != vehicle {
            continue;
        }
        let Some(slot) = bridges.iter().position(|b| *b == h.bridge) else {
            continue;
        };
        let entry = by_hour
            .entry(h.hour_start)
            .or_insert_with(|| (vec![None; bridges.len()], w));
        entry.0[slot] = Some(h.mean_wait_minutes);
    }

    let mut out = Assembled {
        dataset: PatternDataset::new(direction, vehicle),
        skipped_incomplete: 0,
        dropped_all_zero: 0,
    };
    for (hour_start, (waits, weather)) in by_hour {
        let Some(waits) = waits.into_iter().collect::<Option<Vec<f64>>>() else {
            out.skipped_incomplete += 1;
            continue;
        };
        if waits.iter().all(|w| *w == 0.0) {
            out.dropped_all_zero += 1;
            continue;
        }
        let pattern = DelayPattern(
            waits
                .iter()
                .map(|w| categorize(*w).map(DelayCategory4::merged))
                .collect::<Result<_>>()?,
        );
        let features = FeatureVector::derive(hour_start, weather, calendars)?;
        out.dataset.rows.push(Observation {
            hour_start,
            direction,
            vehicle,
            waits,
            pattern,
            features,
        });
    }
    log::info!(
        "{direction}/{vehicle}: {} rows, {} incomplete hours skipped, {} all-zero hours dropped",
        out.dataset.len(),
        out.skipped_incomplete,
        out.dropped_all_zero
    );
    Ok(out)
}

/// Predicted delay pattern for one feature vector.
pub fn predict_pattern(tree: &DecisionTree, x: &FeatureVector) -> Result<DelayPattern> {
    tree.predict(&x.values())?.parse()
}

/// Pattern histogram, most frequent first (ties by label).
pub fn pattern_frequencies(ds: &PatternDataset) -> Vec<(DelayPattern, usize)> {
    let mut counts: BTreeMap<String, (DelayPattern, usize)> = BTreeMap::new();
    for row in &ds.rows {
        counts
            .entry(row.pattern.label())
            .or_insert_with(|| (row.pattern.clone(), 0))
            .1 += 1;
    }
    let mut out: Vec<_> = counts.into_values().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.label().cmp(&b.0.label())));
    out
}

pub const OBSERVATIONS_HEADER: [&str; 17] = [
    "hour_start",
    "direction",
    "vehicle",
    "wait_pb",
    "wait_rb",
    "wait_lq",
    "pattern",
    "month",
    "season",
    "hour_interval",
    "weekend",
    "us_holiday",
    "canada_holiday",
    "temperature_f",
    "visibility",
    "precipitation_in",
    "condition",
];

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Renders `observations.csv`. `wait_rb` is left empty for trucks.
pub fn write_observations(rows: &[Observation]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(OBSERVATIONS_HEADER)
        .expect("in-memory write");
    for o in rows {
        let wait = |b: Bridge| o.wait(b).map(|v| v.to_string()).unwrap_or_default();
        let f = &o.features;
        w.write_record([
            ingest::format_timestamp(o.hour_start),
            o.direction.to_string(),
            o.vehicle.to_string(),
            wait(Bridge::Pb),
            wait(Bridge::Rb),
            wait(Bridge::Lq),
            o.pattern.label(),
            f.month.to_string(),
            f.season.to_string(),
            f.hour_interval.to_string(),
            flag(f.weekend).into(),
            flag(f.us_holiday).into(),
            flag(f.canada_holiday).into(),
            f.temperature_f.to_string(),
            f.visibility.to_string(),
            f.precipitation_in.to_string(),
            f.condition.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn parse_flag(s: &str, line: u64, what: &str) -> Result<bool> {
    match s.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::data_at(
            line,
            format!("{what} must be 0 or 1, got `{other}`"),
        )),
    }
}

/// Parses `observations.csv`, checking that derived columns agree with
/// the timestamp and that each pattern fits its vehicle's bridge set.
pub fn read_observations(text: &str) -> Result<Vec<Observation>> {
    let mut reader = ingest::csv_reader(text);
    ingest::check_header(&mut reader, &OBSERVATIONS_HEADER)?;
    let mut out = Vec::new();
    for rec in ingest::records(&mut reader) {
        let (line, rec) = rec?;
        let hour_start = ingest::parse_timestamp(&rec[0]).map_err(|e| Error::data_at(line, e))?;
        let direction: Direction = ingest::parse_field(&rec[1], line, "direction")?;
        let vehicle: Vehicle = ingest::parse_field(&rec[2], line, "vehicle")?;
        let mut waits = Vec::new();
        for (bridge, col) in [(Bridge::Pb, 3), (Bridge::Rb, 4), (Bridge::Lq, 5)] {
            let cell = rec[col].trim();
            if bridge.carries(vehicle) {
                let w = ingest::parse_finite(cell, line, "wait")?;
                if w < 0.0 {
                    return Err(Error::data_at(line, format!("negative wait {w}")));
                }
                waits.push(w);
            } else if !cell.is_empty() {
                return Err(Error::data_at(
                    line,
                    "wait_rb must be empty for commercial rows",
                ));
            }
        }
        let pattern: DelayPattern = rec[6].parse().map_err(|e: Error| match e {
            Error::Data { reason, .. } => Error::data_at(line, reason),
            other => other,
        })?;
        if pattern.levels().len() != vehicle.bridges().len() {
            return Err(Error::data_at(
                line,
                format!("pattern `{pattern}` does not match {vehicle} bridges"),
            ));
        }
        let month: u32 = ingest::parse_field(&rec[7], line, "month")?;
        let season: Season = ingest::parse_field(&rec[8], line, "season")?;
        let hour_interval: HourInterval = ingest::parse_field(&rec[9], line, "hour_interval")?;
        let expected_season = season_of(month).map_err(|e| Error::data_at(line, e.to_string()))?;
        let expected_interval =
            hour_interval_of(hour_start.hour()).map_err(|e| Error::data_at(line, e.to_string()))?;
        if season != expected_season || hour_interval != expected_interval {
            return Err(Error::data_at(
                line,
                "season/hour_interval disagree with timestamp",
            ));
        }
        let visibility: u8 = ingest::parse_field(&rec[14], line, "visibility")?;
        if !(1..=10).contains(&visibility) {
            return Err(Error::data_at(
                line,
                format!("visibility {visibility} outside 1..=10"),
            ));
        }
        let precipitation_in = ingest::parse_finite(&rec[15], line, "precipitation_in")?;
        if precipitation_in < 0.0 {
            return Err(Error::data_at(line, "negative precipitation"));
        }
        let condition: WeatherCondition = ingest::parse_field(&rec[16], line, "condition")?;
        out.push(Observation {
            hour_start,
            direction,
            vehicle,
            waits,
            pattern,
            features: FeatureVector {
                month,
                season,
                hour_interval,
                weekend: parse_flag(&rec[10], line, "weekend")?,
                us_holiday: parse_flag(&rec[11], line, "us_holiday")?,
                canada_holiday: parse_flag(&rec[12], line, "canada_holiday")?,
                temperature_f: ingest::parse_finite(&rec[13], line, "temperature_f")?,
                visibility,
                precipitation_in,
                condition,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_timestamp;

    /// Independent table-driven categorizer used to confirm hand-worked
    /// patterns: the first upper bound not below the wait wins.
    fn oracle_level(wait: f64) -> &'static str {
        const TABLE: [(f64, &str); 3] = [
            (15.0, "slight delay"),
            (30.0, "delay"),
            (f64::INFINITY, "heavy delay"),
        ];
        TABLE.iter().find(|(hi, _)| wait <= *hi).unwrap().1
    }

    fn oracle_pattern(waits: &[f64]) -> String {
        waits
            .iter()
            .map(|w| oracle_level(*w))
            .collect::<Vec<_>>()
            .join("-")
    }

    fn hour(ts: &str, bridge: Bridge, vehicle: Vehicle, wait: f64) -> (HourlyWait, WeatherRecord) {
        let t = parse_timestamp(ts).unwrap();
        (
            HourlyWait {
                hour_start: t,
                bridge,
                direction: Direction::ToUs,
                vehicle,
                mean_wait_minutes: wait,
                sample_count: 1,
            },
            WeatherRecord {
                timestamp: t,
                temperature_f: 65.0,
                visibility: 10,
                precipitation_in: 0.0,
                condition: WeatherCondition::Clear,
            },
        )
    }

    #[test]
    fn category_boundaries_are_closed_on_the_right() {
        assert_eq!(categorize(0.0).unwrap(), DelayCategory4::NoDelay);
        assert_eq!(categorize(1e-9).unwrap(), DelayCategory4::SlightDelay);
        assert_eq!(categorize(15.0).unwrap(), DelayCategory4::SlightDelay);
        assert_eq!(categorize(15.000001).unwrap(), DelayCategory4::Delay);
        assert_eq!(categorize(30.0).unwrap(), DelayCategory4::Delay);
        assert_eq!(categorize(30.5).unwrap(), DelayCategory4::HeavyDelay);
        assert!(categorize(-0.5).is_err());
        assert!(categorize(f64::NAN).is_err());
    }

    #[test]
    fn pattern_spaces_have_27_and_9_values() {
        assert_eq!(DelayPattern::space(Vehicle::Passenger).len(), 27);
        assert_eq!(DelayPattern::space(Vehicle::Commercial).len(), 9);
        let labels: std::collections::HashSet<_> = DelayPattern::all(3)
            .iter()
            .map(DelayPattern::label)
            .collect();
        assert_eq!(labels.len(), 27);
    }

    #[test]
    fn labels_round_trip() {
        for n in [2, 3] {
            for p in DelayPattern::all(n) {
                assert_eq!(p.label().parse::<DelayPattern>().unwrap(), p);
            }
        }
        assert!("delay-moderate delay".parse::<DelayPattern>().is_err());
    }

    #[test]
    fn all_zero_hours_are_dropped() {
        let joined = vec![
            hour("2016-08-22T08:00", Bridge::Pb, Vehicle::Passenger, 0.0),
            hour("2016-08-22T08:00", Bridge::Rb, Vehicle::Passenger, 0.0),
            hour("2016-08-22T08:00", Bridge::Lq, Vehicle::Passenger, 0.0),
        ];
        let out = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Passenger,
            &Calendars::default(),
        )
        .unwrap();
        assert!(out.dataset.is_empty());
        assert_eq!(out.dropped_all_zero, 1);
    }

    #[test]
    fn passenger_pattern_matches_hand_oracle() {
        let joined = vec![
            hour("2016-08-22T08:00", Bridge::Pb, Vehicle::Passenger, 20.0),
            hour("2016-08-22T08:00", Bridge::Rb, Vehicle::Passenger, 5.0),
            hour("2016-08-22T08:00", Bridge::Lq, Vehicle::Passenger, 0.0),
        ];
        let out = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Passenger,
            &Calendars::default(),
        )
        .unwrap();
        let label = out.dataset.rows[0].pattern.label();
        assert_eq!(label, "delay-slight delay-slight delay");
        assert_eq!(label, oracle_pattern(&[20.0, 5.0, 0.0]));
    }

    #[test]
    fn truck_pattern_skips_rb() {
        let joined = vec![
            hour("2016-08-22T08:00", Bridge::Pb, Vehicle::Commercial, 35.0),
            hour("2016-08-22T08:00", Bridge::Lq, Vehicle::Commercial, 10.0),
        ];
        let out = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Commercial,
            &Calendars::default(),
        )
        .unwrap();
        let label = out.dataset.rows[0].pattern.label();
        assert_eq!(label, "heavy delay-slight delay");
        assert_eq!(label, oracle_pattern(&[35.0, 10.0]));
    }

    #[test]
    fn incomplete_hours_are_skipped_and_counted() {
        let joined = vec![
            hour("2016-08-22T08:00", Bridge::Pb, Vehicle::Passenger, 20.0),
            hour("2016-08-22T08:00", Bridge::Lq, Vehicle::Passenger, 3.0),
            hour("2016-08-22T09:00", Bridge::Pb, Vehicle::Passenger, 20.0),
            hour("2016-08-22T09:00", Bridge::Rb, Vehicle::Passenger, 20.0),
            hour("2016-08-22T09:00", Bridge::Lq, Vehicle::Passenger, 20.0),
        ];
        let out = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Passenger,
            &Calendars::default(),
        )
        .unwrap();
        assert_eq!(out.skipped_incomplete, 1);
        assert_eq!(out.dataset.len(), 1);
        assert_eq!(out.dataset.rows[0].hour_start.hour(), 9);
    }

    #[test]
    fn frequencies_sort_by_count_then_label() {
        let mut ds = PatternDataset::new(Direction::ToUs, Vehicle::Commercial);
        assert!(pattern_frequencies(&ds).is_empty());
        let joined: Vec<_> = ["08", "09", "10"]
            .iter()
            .flat_map(|h| {
                [
                    hour(
                        &format!("2016-08-22T{h}:00"),
                        Bridge::Pb,
                        Vehicle::Commercial,
                        20.0,
                    ),
                    hour(
                        &format!("2016-08-22T{h}:00"),
                        Bridge::Lq,
                        Vehicle::Commercial,
                        5.0,
                    ),
                ]
            })
            .collect();
        ds = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Commercial,
            &Calendars::default(),
        )
        .unwrap()
        .dataset;
        let hist = pattern_frequencies(&ds);
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[0].1, 3);
    }

    #[test]
    fn observations_csv_round_trips() {
        let joined = vec![
            hour("2016-08-22T08:00", Bridge::Pb, Vehicle::Commercial, 35.25),
            hour("2016-08-22T08:00", Bridge::Lq, Vehicle::Commercial, 10.0),
        ];
        let rows = assemble_rows(
            &joined,
            Direction::ToUs,
            Vehicle::Commercial,
            &Calendars::default(),
        )
        .unwrap()
        .dataset
        .rows;
        let text = write_observations(&rows);
        assert!(text.starts_with("hour_start,direction,vehicle,wait_pb,wait_rb,wait_lq,pattern,"));
        assert!(
            text.contains("35.25,,10,heavy delay-slight delay"),
            "{text}"
        );
        assert_eq!(read_observations(&text).unwrap(), rows);
    }

    #[test]
    fn observations_reject_inconsistent_rows() {
        let head = OBSERVATIONS_HEADER.join(",");
        let bad_season = format!("{head}\n2016-08-22T08:00,to_us,commercial,35,,10,heavy delay-slight delay,8,Winter,Early_morning,0,0,0,70,10,0,Clear\n");
        assert!(read_observations(&bad_season).is_err());
        let bad_len = format!("{head}\n2016-08-22T08:00,to_us,commercial,35,,10,heavy delay,8,Summer,Early_morning,0,0,0,70,10,0,Clear\n");
        assert!(read_observations(&bad_len).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn categorize_is_monotone(a in 0.0f64..200.0, b in 0.0f64..200.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(categorize(lo).unwrap() <= categorize(hi).unwrap());
            }

            #[test]
            fn merged_low_range_is_slight(w in 0.0f64..=15.0) {
                prop_assert_eq!(categorize(w).unwrap().merged(), DelayCategory3::SlightDelay);
            }

            #[test]
            fn kept_rows_never_come_from_all_zero_tuples(
                waits in proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..60.0], 3),
            ) {
                let joined: Vec<_> = Bridge::ALL
                    .iter()
                    .zip(&waits)
                    .map(|(b, w)| hour("2016-08-22T08:00", *b, Vehicle::Passenger, *w))
                    .collect();
                let out = assemble_rows(&joined, Direction::ToUs, Vehicle::Passenger, &Calendars::default()).unwrap();
                for row in &out.dataset.rows {
                    prop_assert!(row.waits.iter().any(|w| *w != 0.0));
                    prop_assert_eq!(row.pattern.label(), oracle_pattern(&row.waits));
                }
            }
        }
    }
}
