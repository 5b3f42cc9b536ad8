//! Descriptive features attached to every hourly observation.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{self, WeatherCondition, WeatherRecord};

pub const HOLIDAYS_HEADER: [&str; 2] = ["date", "country"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Season {
    Spring,
    Summer,
    Fall,
    Winter,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Fall, Season::Winter];

    pub fn as_str(self) -> &'static str {
        match self {
            Season::Spring => "Spring",
            Season::Summer => "Summer",
            Season::Fall => "Fall",
            Season::Winter => "Winter",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HourInterval {
    EarlyMorning,
    Morning,
    Afternoon,
    Evening,
    Night,
}

impl HourInterval {
    pub const ALL: [HourInterval; 5] = [
        HourInterval::EarlyMorning,
        HourInterval::Morning,
        HourInterval::Afternoon,
        HourInterval::Evening,
        HourInterval::Night,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HourInterval::EarlyMorning => "Early_morning",
            HourInterval::Morning => "Morning",
            HourInterval::Afternoon => "Afternoon",
            HourInterval::Evening => "Evening",
            HourInterval::Night => "Night",
        }
    }
}

macro_rules! display_as_str {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> std::result::Result<Self, String> {
                Self::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str().eq_ignore_ascii_case(s.trim()))
                    .ok_or_else(|| format!("unknown {} `{}`", stringify!($t), s.trim()))
            }
        }
    )*};
}

display_as_str!(Season, HourInterval);

pub fn season_of(month: u32) -> Result<Season> {
    match month {
        3..=5 => Ok(Season::Spring),
        6..=8 => Ok(Season::Summer),
        9..=11 => Ok(Season::Fall),
        12 | 1 | 2 => Ok(Season::Winter),
        _ => Err(Error::data(format!("month {month} outside 1..=12"))),
    }
}

pub fn hour_interval_of(hour: u32) -> Result<HourInterval> {
    match hour {
        7..=9 => Ok(HourInterval::EarlyMorning),
        10..=12 => Ok(HourInterval::Morning),
        13..=15 => Ok(HourInterval::Afternoon),
        16..=18 => Ok(HourInterval::Evening),
        19..=21 => Ok(HourInterval::Night),
        _ => Err(Error::data(format!("hour {hour} outside 7..=21"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Country {
    Us,
    Ca,
}

impl std::str::FromStr for Country {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "US" => Ok(Country::Us),
            "CA" => Ok(Country::Ca),
            other => Err(format!("unknown country `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HolidayCalendar {
    pub country: Country,
    pub dates: BTreeSet<NaiveDate>,
}

impl HolidayCalendar {
    pub fn new(country: Country) -> Self {
        HolidayCalendar {
            country,
            dates: BTreeSet::new(),
        }
    }

    pub fn with_dates(country: Country, dates: impl IntoIterator<Item = NaiveDate>) -> Self {
        HolidayCalendar {
            country,
            dates: dates.into_iter().collect(),
        }
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.dates.contains(&date)
    }
}

/// The US and Canadian calendars read from one `holidays.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calendars {
    pub us: HolidayCalendar,
    pub ca: HolidayCalendar,
}

impl Default for Calendars {
    fn default() -> Self {
        Calendars {
            us: HolidayCalendar::new(Country::Us),
            ca: HolidayCalendar::new(Country::Ca),
        }
    }
}

impl Calendars {
    pub fn flags(&self, date: NaiveDate) -> CalendarFlags {
        calendar_flags(date, &self.us, &self.ca)
    }
}

/// Parses `holidays.csv` (`date,country`). Repeated dates collapse into one.
pub fn parse_holidays(text: &str) -> Result<Calendars> {
    let mut reader = ingest::csv_reader(text);
    ingest::check_header(&mut reader, &HOLIDAYS_HEADER)?;
    let mut cals = Calendars::default();
    for rec in ingest::records(&mut reader) {
        let (line, rec) = rec?;
        let date = NaiveDate::parse_from_str(rec[0].trim(), "%Y-%m-%d")
            .map_err(|e| Error::data_at(line, format!("malformed date `{}`: {e}", &rec[0])))?;
        let country: Country = ingest::parse_field(&rec[1], line, "country")?;
        match country {
            Country::Us => cals.us.dates.insert(date),
            Country::Ca => cals.ca.dates.insert(date),
        };
    }
    Ok(cals)
}

/// Renders both calendars as `holidays.csv`, US dates first.
pub fn write_holidays(cals: &Calendars) -> String {
    let mut out = String::from("date,country\n");
    for (cal, code) in [(&cals.us, "US"), (&cals.ca, "CA")] {
        for d in &cal.dates {
            out.push_str(&format!("{},{code}\n", d.format("%Y-%m-%d")));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalendarFlags {
    pub weekend: bool,
    pub us_holiday: bool,
    pub canada_holiday: bool,
}

pub fn calendar_flags(
    date: NaiveDate,
    us: &HolidayCalendar,
    ca: &HolidayCalendar,
) -> CalendarFlags {
    CalendarFlags {
        weekend: matches!(date.weekday(), Weekday::Sat | Weekday::Sun),
        us_holiday: us.contains(date),
        canada_holiday: ca.contains(date),
    }
}

/// One model-ready row of descriptive features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub month: u32,
    pub season: Season,
    pub hour_interval: HourInterval,
    pub weekend: bool,
    pub us_holiday: bool,
    pub canada_holiday: bool,
    pub temperature_f: f64,
    pub visibility: u8,
    pub precipitation_in: f64,
    pub condition: WeatherCondition,
}

impl FeatureVector {
    /// Derives the features for the hour starting at `hour_start`.
    pub fn derive(
        hour_start: NaiveDateTime,
        weather: &WeatherRecord,
        calendars: &Calendars,
    ) -> Result<Self> {
        let month = hour_start.month();
        let flags = calendars.flags(hour_start.date());
        Ok(FeatureVector {
            month,
            season: season_of(month)?,
            hour_interval: hour_interval_of(hour_start.hour())?,
            weekend: flags.weekend,
            us_holiday: flags.us_holiday,
            canada_holiday: flags.canada_holiday,
            temperature_f: weather.temperature_f,
            visibility: weather.visibility,
            precipitation_in: weather.precipitation_in,
            condition: weather.condition,
        })
    }

    /// Encodes the vector against [`FeatureSchema::border_delay`].
    pub fn values(&self) -> Vec<FeatureValue> {
        use FeatureValue::{Level, Num};
        let season = Season::ALL.iter().position(|s| *s == self.season).unwrap();
        let interval = HourInterval::ALL
            .iter()
            .position(|h| *h == self.hour_interval)
            .unwrap();
        let condition = WeatherCondition::ALL
            .iter()
            .position(|c| *c == self.condition)
            .unwrap();
        vec![
            Level(self.month as usize - 1),
            Level(season),
            Level(interval),
            Level(self.weekend as usize),
            Level(self.us_holiday as usize),
            Level(self.canada_holiday as usize),
            Num(self.temperature_f),
            Level(self.visibility as usize - 1),
            Num(self.precipitation_in),
            Level(condition),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical { levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

impl FeatureSpec {
    pub fn continuous(name: impl Into<String>) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Continuous,
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = S>,
    ) -> Self {
        FeatureSpec {
            name: name.into(),
            kind: FeatureKind::Categorical {
                levels: levels.into_iter().map(Into::into).collect(),
            },
        }
    }

    pub fn levels(&self) -> Option<&[String]> {
        match &self.kind {
            FeatureKind::Categorical { levels } => Some(levels),
            FeatureKind::Continuous => None,
        }
    }
}

/// A feature value: a real number, or the index of a categorical level
/// in the schema's level list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue {
    Num(f64),
    Level(usize),
}

/// Ordered feature list. The order is also the split tie-break order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FeatureSchema {
    features: Vec<FeatureSpec>,
}

impl<'de> Deserialize<'de> for FeatureSchema {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let features = Vec::<FeatureSpec>::deserialize(d)?;
        FeatureSchema::new(features).map_err(serde::de::Error::custom)
    }
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>) -> Result<Self> {
        let mut seen = HashSet::new();
        for f in &features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::usage(format!("duplicate feature name `{}`", f.name)));
            }
            if let Some(levels) = f.levels() {
                let distinct: HashSet<_> = levels.iter().collect();
                if levels.is_empty() || distinct.len() != levels.len() {
                    return Err(Error::usage(format!(
                        "feature `{}` needs a non-empty list of distinct levels",
                        f.name
                    )));
                }
            }
        }
        Ok(FeatureSchema { features })
    }

    /// The ten descriptive features, in table order.
    pub fn border_delay() -> Self {
        let numbered = |n: u32| (1..=n).map(|i| i.to_string()).collect::<Vec<_>>();
        FeatureSchema::new(vec![
            FeatureSpec::categorical("month", numbered(12)),
            FeatureSpec::categorical("season", Season::ALL.map(Season::as_str)),
            FeatureSpec::categorical("hour_interval", HourInterval::ALL.map(HourInterval::as_str)),
            FeatureSpec::categorical("weekend", ["0", "1"]),
            FeatureSpec::categorical("us_holiday", ["0", "1"]),
            FeatureSpec::categorical("canada_holiday", ["0", "1"]),
            FeatureSpec::continuous("temperature_f"),
            FeatureSpec::categorical("visibility", numbered(10)),
            FeatureSpec::continuous("precipitation_in"),
            FeatureSpec::categorical(
                "condition",
                WeatherCondition::ALL.iter().map(|c| c.as_str()),
            ),
        ])
        .expect("static schema is valid")
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureSpec] {
        &self.features
    }

    pub fn get(&self, index: usize) -> Option<&FeatureSpec> {
        self.features.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    /// Checks that `row` has one value per feature and that each value
    /// matches its feature's kind.
    pub fn check_row(&self, row: &[FeatureValue]) -> Result<()> {
        if row.len() != self.features.len() {
            return Err(Error::domain(format!(
                "row has {} values, schema has {} features",
                row.len(),
                self.features.len()
            )));
        }
        for (spec, value) in self.features.iter().zip(row) {
            match (&spec.kind, value) {
                (FeatureKind::Continuous, FeatureValue::Num(x)) if !x.is_nan() => {}
                (FeatureKind::Categorical { levels }, FeatureValue::Level(i))
                    if *i < levels.len() => {}
                _ => {
                    return Err(Error::domain(format!(
                        "value {value:?} does not fit feature `{}`",
                        spec.name
                    )))
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn seasons_follow_month_table() {
        assert_eq!(season_of(6).unwrap(), Season::Summer);
        assert_eq!(season_of(12).unwrap(), Season::Winter);
        assert_eq!(season_of(3).unwrap(), Season::Spring);
        assert_eq!(season_of(10).unwrap(), Season::Fall);
        assert!(season_of(0).is_err());
        assert!(season_of(13).is_err());
    }

    #[test]
    fn hour_intervals_follow_table() {
        assert_eq!(hour_interval_of(7).unwrap(), HourInterval::EarlyMorning);
        assert_eq!(hour_interval_of(13).unwrap(), HourInterval::Afternoon);
        assert_eq!(hour_interval_of(21).unwrap(), HourInterval::Night);
        assert!(hour_interval_of(6).is_err());
        assert!(hour_interval_of(22).is_err());
    }

    #[test]
    fn season_and_interval_partition_their_domains() {
        for season in Season::ALL {
            let months = (1..=12)
                .filter(|m| season_of(*m).unwrap() == season)
                .count();
            assert_eq!(months, 3);
        }
        for interval in HourInterval::ALL {
            let hours = (7..=21)
                .filter(|h| hour_interval_of(*h).unwrap() == interval)
                .count();
            assert_eq!(hours, 3);
        }
    }

    #[test]
    fn weekend_and_holiday_flags() {
        let us = HolidayCalendar::new(Country::Us);
        let ca = HolidayCalendar::with_dates(Country::Ca, [date("2017-07-01")]);
        assert!(calendar_flags(date("2016-08-27"), &us, &ca).weekend);
        assert!(!calendar_flags(date("2016-08-24"), &us, &ca).weekend);
        let canada_day = calendar_flags(date("2017-07-01"), &us, &ca);
        assert!(canada_day.canada_holiday);
        assert!(!canada_day.us_holiday);
    }

    #[test]
    fn holidays_round_trip() {
        let cals =
            parse_holidays("date,country\n2016-12-26,CA\n2016-11-24,US\n2016-12-26,US\n").unwrap();
        assert_eq!(parse_holidays(&write_holidays(&cals)).unwrap(), cals);
    }

    #[test]
    fn holidays_csv_splits_by_country() {
        let cals =
            parse_holidays("date,country\n2016-09-05,US\n2016-09-05,ca\n2016-10-10,CA\n").unwrap();
        assert_eq!(cals.us.dates.len(), 1);
        assert_eq!(cals.ca.dates.len(), 2);
        assert!(parse_holidays("date,country\n2016-09-05,MX\n").is_err());
        assert!(parse_holidays("day,country\n").is_err());
    }

    #[test]
    fn derived_vector_encodes_against_schema() {
        let weather = WeatherRecord {
            timestamp: ingest::parse_timestamp("2016-12-24T19:00").unwrap(),
            temperature_f: 28.0,
            visibility: 4,
            precipitation_in: 0.2,
            condition: WeatherCondition::Snow,
        };
        let cals = Calendars::default();
        let fv = FeatureVector::derive(weather.timestamp, &weather, &cals).unwrap();
        assert_eq!(fv.season, Season::Winter);
        assert_eq!(fv.hour_interval, HourInterval::Night);
        assert!(fv.weekend);
        let schema = FeatureSchema::border_delay();
        let values = fv.values();
        schema.check_row(&values).unwrap();
        assert_eq!(values[0], FeatureValue::Level(11));
        assert_eq!(values[7], FeatureValue::Level(3));
    }

    #[test]
    fn schema_rejects_duplicates() {
        let dup = FeatureSchema::new(vec![
            FeatureSpec::continuous("a"),
            FeatureSpec::continuous("a"),
        ]);
        assert!(dup.is_err());
        assert!(FeatureSchema::new(vec![FeatureSpec::categorical("b", ["x", "x"])]).is_err());
    }

    #[test]
    fn schema_json_round_trips() {
        let schema = FeatureSchema::border_delay();
        let json = serde_json::to_string(&schema).unwrap();
        let back: FeatureSchema = serde_json::from_str(&json).unwrap();
        assert_eq!(schema, back);
    }
}
