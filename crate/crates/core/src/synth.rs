//! Seeded synthetic inputs with planted feature-to-pattern rules, and the
//! brute-force split oracle used to check the learner.
//!
//! # Generation
//!
//! The random stream is ChaCha8 seeded with `seed_from_u64`, so output is
//! identical across platforms. For every day in the range and every hour
//! 7..=21 the generator:
//!
//! 1. draws the hour's weather (temperature around a seasonal curve,
//!    condition, precipitation, visibility) and emits it at `HH:00`;
//! 2. derives the hour's [`FeatureVector`];
//! 3. for each (direction, vehicle) group takes the target of the first
//!    matching rule for that group, or the group's base pattern;
//! 4. with probability `flip_prob` replaces that pattern with a uniformly
//!    drawn different one (a label flip);
//! 5. sets each bridge's centre wait to `base + rule effect`, or for a
//!    flipped hour to the middle of the flipped category;
//! 6. emits samples `max(0, centre + N(0, jitter_sd))`: twelve five-minute
//!    samples for PB and LQ, one hourly sample for RB.
//!
//! Every hour draws the same number of random values whatever the outcome,
//! so changing a rule does not shift the stream for later hours.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cart::{ClassDistribution, Dataset, SplitCandidate, SplitRule};
use crate::error::{Error, Result};
use crate::features::{
    parse_holidays, Calendars, FeatureKind, FeatureValue, FeatureVector, HourInterval, Season,
};
use crate::ingest::{
    self, groups, Bridge, Direction, Vehicle, WeatherCondition, WeatherRecord, FIRST_HOUR,
    LAST_HOUR,
};
use crate::patterns::{categorize, DelayCategory3, DelayPattern};

/// US and Canadian holidays for 2016-2017, bundled as sample data.
pub const SAMPLE_HOLIDAYS_CSV: &str = include_str!("../data/sample_holidays_2016_2017.csv");

pub fn sample_calendars() -> Calendars {
    parse_holidays(SAMPLE_HOLIDAYS_CSV).expect("bundled holidays parse")
}

/// Inspection lanes per bridge, direction and vehicle type. RB has no
/// commercial lanes.
pub fn inspection_lanes(bridge: Bridge, direction: Direction, vehicle: Vehicle) -> Option<u32> {
    use Bridge::*;
    use Direction::*;
    use Vehicle::*;
    match (bridge, direction, vehicle) {
        (Pb, ToUs, Passenger) => Some(15),
        (Pb, ToUs, Commercial) => Some(5),
        (Pb, ToCan, Passenger) => Some(11),
        (Pb, ToCan, Commercial) => Some(7),
        (Rb, ToUs, Passenger) => Some(16),
        (Rb, ToCan, Passenger) => Some(15),
        (Rb, _, Commercial) => None,
        (Lq, ToUs, Passenger) => Some(6),
        (Lq, ToUs, Commercial) => Some(4),
        (Lq, ToCan, Passenger) => Some(10),
        (Lq, ToCan, Commercial) => Some(5),
    }
}

/// A predicate over the descriptive features of an hour.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleCondition {
    Weekend(bool),
    HourIntervalIn(Vec<HourInterval>),
    SeasonIn(Vec<Season>),
    TemperatureAbove(f64),
    UsHoliday,
    CanadaHoliday,
    All(Vec<RuleCondition>),
}

impl RuleCondition {
    pub fn matches(&self, x: &FeatureVector) -> bool {
        match self {
            RuleCondition::Weekend(w) => x.weekend == *w,
            RuleCondition::HourIntervalIn(set) => set.contains(&x.hour_interval),
            RuleCondition::SeasonIn(set) => set.contains(&x.season),
            RuleCondition::TemperatureAbove(t) => x.temperature_f > *t,
            RuleCondition::UsHoliday => x.us_holiday,
            RuleCondition::CanadaHoliday => x.canada_holiday,
            RuleCondition::All(all) => all.iter().all(|c| c.matches(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRule {
    pub direction: Direction,
    pub vehicle: Vehicle,
    pub condition: RuleCondition,
    pub target: DelayPattern,
    /// Minutes added to each bridge's base wait, aligned with
    /// `vehicle.bridges()`.
    pub effect: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub start: NaiveDate,
    /// Last day, inclusive.
    pub end: NaiveDate,
    pub seed: u64,
    pub base_waits: BTreeMap<(Bridge, Direction, Vehicle), f64>,
    /// Checked in order; the first match for a group wins.
    pub rules: Vec<PlantedRule>,
    pub flip_prob: f64,
    pub jitter_sd: f64,
    pub calendars: Calendars,
}

pub const DEFAULT_BASE_WAIT: f64 = 10.0;

impl SynthConfig {
    /// `days` days from `start`, base waits of 10 minutes everywhere, no
    /// rules, no noise and no holidays.
    pub fn new(start: NaiveDate, days: u32, seed: u64) -> Self {
        let mut base_waits = BTreeMap::new();
        for (direction, vehicle) in groups() {
            for bridge in vehicle.bridges() {
                base_waits.insert((*bridge, direction, vehicle), DEFAULT_BASE_WAIT);
            }
        }
        SynthConfig {
            start,
            end: start + Duration::days(days as i64 - 1),
            seed,
            base_waits,
            rules: Vec::new(),
            flip_prob: 0.0,
            jitter_sd: 0.0,
            calendars: Calendars::default(),
        }
    }

    fn base(&self, bridge: Bridge, direction: Direction, vehicle: Vehicle) -> f64 {
        self.base_waits
            .get(&(bridge, direction, vehicle))
            .copied()
            .unwrap_or(DEFAULT_BASE_WAIT)
    }

    fn base_centres(&self, direction: Direction, vehicle: Vehicle) -> Vec<f64> {
        vehicle
            .bridges()
            .iter()
            .map(|b| self.base(*b, direction, vehicle))
            .collect()
    }

    /// Pattern produced by the base waits alone.
    pub fn base_pattern(&self, direction: Direction, vehicle: Vehicle) -> Result<DelayPattern> {
        pattern_of(&self.base_centres(direction, vehicle))
    }

    /// Adds a rule whose target is whatever `base + effect` categorizes to.
    pub fn plant(
        &mut self,
        direction: Direction,
        vehicle: Vehicle,
        condition: RuleCondition,
        effect: Vec<f64>,
    ) -> Result<&PlantedRule> {
        let centres = self.shifted(direction, vehicle, &effect)?;
        self.rules.push(PlantedRule {
            direction,
            vehicle,
            condition,
            target: pattern_of(&centres)?,
            effect,
        });
        Ok(self.rules.last().unwrap())
    }

    fn shifted(&self, direction: Direction, vehicle: Vehicle, effect: &[f64]) -> Result<Vec<f64>> {
        if effect.len() != vehicle.bridges().len() {
            return Err(Error::usage(format!(
                "{vehicle} rules need {} effects, got {}",
                vehicle.bridges().len(),
                effect.len()
            )));
        }
        Ok(self
            .base_centres(direction, vehicle)
            .iter()
            .zip(effect)
            .map(|(b, e)| b + e)
            .collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.end < self.start {
            return Err(Error::usage("empty date range"));
        }
        if !(0.0..1.0).contains(&self.flip_prob) {
            return Err(Error::usage("flip probability must lie in [0, 1)"));
        }
        if !self.jitter_sd.is_finite() || self.jitter_sd < 0.0 {
            return Err(Error::usage("jitter must be a finite non-negative number"));
        }
        if let Some((k, v)) = self
            .base_waits
            .iter()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::usage(format!("base wait {v} for {k:?} is invalid")));
        }
        for rule in &self.rules {
            let centres = self.shifted(rule.direction, rule.vehicle, &rule.effect)?;
            if centres.iter().any(|c| *c < 0.0) {
                return Err(Error::usage("rule effect drives a base wait below zero"));
            }
            let produced = pattern_of(&centres)?;
            if produced != rule.target {
                return Err(Error::usage(format!(
                    "rule target `{}` but base + effect gives `{produced}`",
                    rule.target
                )));
            }
        }
        Ok(())
    }
}

fn pattern_of(waits: &[f64]) -> Result<DelayPattern> {
    Ok(DelayPattern::new(
        waits
            .iter()
            .map(|w| categorize(*w).map(|c| c.merged()))
            .collect::<Result<_>>()?,
    ))
}

/// Centre wait used for a flipped hour.
fn representative_wait(c: DelayCategory3) -> f64 {
    match c {
        DelayCategory3::SlightDelay => 7.5,
        DelayCategory3::Delay => 22.5,
        DelayCategory3::HeavyDelay => 45.0,
    }
}

/// What the generator aimed for in one hour and group.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub hour_start: NaiveDateTime,
    pub direction: Direction,
    pub vehicle: Vehicle,
    /// The pattern the waits were generated for (after any flip).
    pub intended: DelayPattern,
    pub flipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub wait_times_csv: String,
    pub weather_csv: String,
    pub emissions: Vec<Emission>,
}

impl SynthOutput {
    pub fn emission_log_csv(&self) -> String {
        let mut out = String::from("hour_start,direction,vehicle,intended_pattern,flipped\n");
        for e in &self.emissions {
            writeln!(
                out,
                "{},{},{},{},{}",
                ingest::format_timestamp(e.hour_start),
                e.direction,
                e.vehicle,
                e.intended,
                e.flipped as u8
            )
            .unwrap();
        }
        out
    }
}

fn draw_weather(rng: &mut ChaCha8Rng, hour_start: NaiveDateTime) -> WeatherRecord {
    use std::f64::consts::PI;
    let day = hour_start.ordinal() as f64;
    let seasonal = 48.0 - 24.0 * (2.0 * PI * (day - 15.0) / 365.25).cos();
    let diurnal = 6.0 * (PI * (hour_start.hour() as f64 - 9.0) / 12.0).sin();
    let noise: f64 = rng.sample(StandardNormal);
    let temperature_f: f64 = format!("{:.1}", seasonal + diurnal + 4.0 * noise)
        .parse()
        .unwrap();

    let u: f64 = rng.random();
    let condition = if temperature_f <= 32.0 && u < 0.25 {
        WeatherCondition::Snow
    } else if temperature_f > 32.0 && u < 0.15 {
        WeatherCondition::Rain
    } else {
        WeatherCondition::Clear
    };
    let precip_draw: f64 = rng.random_range(0.01..0.5);
    let vis_draw: u8 = rng.random_range(0..6);
    let (precipitation_in, visibility) = match condition {
        WeatherCondition::Clear => (0.0, 10 - vis_draw % 3),
        _ => ((precip_draw * 100.0).round() / 100.0, 2 + vis_draw),
    };
    WeatherRecord {
        timestamp: hour_start,
        temperature_f,
        visibility,
        precipitation_in,
        condition,
    }
}

/// Generates `wait_times.csv`, `weather.csv` and the emission log.
pub fn generate(cfg: &SynthConfig) -> Result<SynthOutput> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spaces: BTreeMap<Vehicle, Vec<DelayPattern>> = [Vehicle::Passenger, Vehicle::Commercial]
        .into_iter()
        .map(|v| (v, DelayPattern::space(v)))
        .collect();
    let base_patterns: Vec<DelayPattern> = groups()
        .iter()
        .map(|(d, v)| cfg.base_pattern(*d, *v))
        .collect::<Result<_>>()?;

    let mut waits = String::from("timestamp,bridge,direction,vehicle_type,wait_minutes\n");
    let mut weather =
        String::from("timestamp,temperature_f,visibility,precipitation_in,condition\n");
    let mut emissions = Vec::new();

    let mut day = cfg.start;
    while day <= cfg.end {
        for hour in FIRST_HOUR..=LAST_HOUR {
            let hour_start = day.and_hms_opt(hour, 0, 0).expect("valid hour");
            let w = draw_weather(&mut rng, hour_start);
            writeln!(
                weather,
                "{},{:.1},{},{},{}",
                ingest::format_timestamp(hour_start),
                w.temperature_f,
                w.visibility,
                w.precipitation_in,
                w.condition
            )
            .unwrap();
            let features = FeatureVector::derive(hour_start, &w, &cfg.calendars)?;

            // (bridge, direction, vehicle, centre) for this hour
            let mut centres = Vec::new();
            for (g, (direction, vehicle)) in groups().into_iter().enumerate() {
                let rule = cfg.rules.iter().find(|r| {
                    r.direction == direction
                        && r.vehicle == vehicle
                        && r.condition.matches(&features)
                });
                let intended = rule.map_or(&base_patterns[g], |r| &r.target);
                let flip_draw: f64 = rng.random();
                let space = &spaces[&vehicle];
                let pick = rng.random_range(0..space.len() - 1);
                let flipped = flip_draw < cfg.flip_prob;
                let (pattern, group_centres) = if flipped {
                    let others: Vec<&DelayPattern> =
                        space.iter().filter(|p| *p != intended).collect();
                    let p = others[pick].clone();
                    let c = p.levels().iter().map(|l| representative_wait(*l)).collect();
                    (p, c)
                } else {
                    let c = match rule {
                        Some(r) => cfg.shifted(direction, vehicle, &r.effect)?,
                        None => cfg.base_centres(direction, vehicle),
                    };
                    (intended.clone(), c)
                };
                for (bridge, c) in vehicle.bridges().iter().zip(group_centres) {
                    centres.push((*bridge, direction, vehicle, c));
                }
                emissions.push(Emission {
                    hour_start,
                    direction,
                    vehicle,
                    intended: pattern,
                    flipped,
                });
            }

            for slot in 0..12 {
                let ts = hour_start + Duration::minutes(5 * slot);
                for (bridge, direction, vehicle, centre) in &centres {
                    if *bridge == Bridge::Rb && slot > 0 {
                        continue;
                    }
                    let z: f64 = rng.sample(StandardNormal);
                    let value = (centre + cfg.jitter_sd * z).max(0.0);
                    writeln!(
                        waits,
                        "{},{bridge},{direction},{vehicle},{value:.1}",
                        ingest::format_timestamp(ts)
                    )
                    .unwrap();
                }
            }
        }
        day = day.succ_opt().expect("date in range");
    }
    Ok(SynthOutput {
        wait_times_csv: waits,
        weather_csv: weather,
        emissions,
    })
}

/// Named rule sets used by the CLI and the examples.
pub const PRESETS: [&str; 3] = ["none", "weekend", "weekend-hour"];

/// Builds a config from a named preset: base waits of 10 minutes, 5% label
/// flips and 2 minutes of jitter.
///
/// `weekend` raises every group's waits on weekends. `weekend-hour` adds a
/// second, weekday rule for the evening and night intervals.
pub fn preset(name: &str, start: NaiveDate, days: u32, seed: u64) -> Result<SynthConfig> {
    if days == 0 {
        return Err(Error::usage("empty date range"));
    }
    let mut cfg = SynthConfig::new(start, days, seed);
    cfg.flip_prob = 0.05;
    cfg.jitter_sd = 2.0;
    cfg.calendars = sample_calendars();
    let weekend = |cfg: &mut SynthConfig| -> Result<()> {
        for (direction, vehicle) in groups() {
            let effect = match vehicle {
                Vehicle::Passenger => vec![12.0, 0.0, 12.0],
                Vehicle::Commercial => vec![30.0, 0.0],
            };
            cfg.plant(direction, vehicle, RuleCondition::Weekend(true), effect)?;
        }
        Ok(())
    };
    match name {
        "none" => {}
        "weekend" => weekend(&mut cfg)?,
        "weekend-hour" => {
            weekend(&mut cfg)?;
            for (direction, vehicle) in groups() {
                let effect = match vehicle {
                    Vehicle::Passenger => vec![0.0, 12.0, 30.0],
                    Vehicle::Commercial => vec![0.0, 12.0],
                };
                let when =
                    RuleCondition::HourIntervalIn(vec![HourInterval::Evening, HourInterval::Night]);
                cfg.plant(direction, vehicle, when, effect)?;
            }
        }
        other => {
            return Err(Error::usage(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    }
    Ok(cfg)
}

/// Largest input accepted by [`brute_force_best_split`].
pub const BRUTE_FORCE_MAX_ROWS: usize = 10_000;

/// Gains closer than this are treated as tied by the oracle. Distinct
/// gains over a few hundred rows differ by far more.
pub const ORACLE_TIE_TOLERANCE: f64 = 1e-12;

fn direct_gini(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    1.0 - counts
        .iter()
        .map(|c| {
            let p = *c as f64 / n as f64;
            p * p
        })
        .sum::<f64>()
}

fn oracle_rule_order(a: &SplitRule, b: &SplitRule) -> Ordering {
    let key = |r: &SplitRule| match r {
        SplitRule::Threshold { feature, value } => (*feature, Some(*value), Vec::new()),
        SplitRule::Subset { feature, left, .. } => (*feature, None, left.clone()),
    };
    let (fa, ta, la) = key(a);
    let (fb, tb, lb) = key(b);
    fa.cmp(&fb).then_with(|| match (ta, tb) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
        _ => la.cmp(&lb),
    })
}

/// Reference split search: builds every candidate rule from scratch,
/// partitions the rows by evaluating the rule on each of them, and scores
/// the partition with the textbook Gini formulas.
pub fn brute_force_best_split(data: &Dataset, rows: &[usize]) -> Result<Option<SplitCandidate>> {
    if rows.len() > BRUTE_FORCE_MAX_ROWS {
        return Err(Error::usage(format!(
            "brute-force search is limited to {BRUTE_FORCE_MAX_ROWS} rows, got {}",
            rows.len()
        )));
    }
    let n_classes = data.classes().len();
    let count = |pred: &dyn Fn(usize) -> bool| {
        let mut left = vec![0u64; n_classes];
        let mut right = vec![0u64; n_classes];
        for &r in rows {
            if pred(r) {
                left[data.label(r)] += 1;
            } else {
                right[data.label(r)] += 1;
            }
        }
        (left, right)
    };
    let mut parent = vec![0u64; n_classes];
    for &r in rows {
        parent[data.label(r)] += 1;
    }
    if rows.is_empty() {
        return Ok(None);
    }
    let n = rows.len() as f64;
    let parent_gini = direct_gini(&parent);

    let mut rules = Vec::new();
    for (f, spec) in data.schema().features().iter().enumerate() {
        match &spec.kind {
            FeatureKind::Continuous => {
                let mut values: Vec<f64> = rows
                    .iter()
                    .map(|&r| match data.value(r, f) {
                        FeatureValue::Num(x) => x,
                        FeatureValue::Level(_) => unreachable!(),
                    })
                    .collect();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                values.dedup();
                for pair in values.windows(2) {
                    let mid = pair[0] + (pair[1] - pair[0]) / 2.0;
                    let value = if mid < pair[1] { mid } else { pair[0] };
                    rules.push(SplitRule::Threshold { feature: f, value });
                }
            }
            FeatureKind::Categorical { levels } => {
                let present: Vec<usize> = (0..levels.len())
                    .filter(|l| {
                        rows.iter()
                            .any(|&r| data.value(r, f) == FeatureValue::Level(*l))
                    })
                    .collect();
                if present.len() < 2 {
                    continue;
                }
                let k = present.len();
                for mask in 1u32..(1 << (k - 1)) {
                    let left: Vec<usize> = (0..k - 1)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| present[b])
                        .collect();
                    let right: Vec<usize> = present
                        .iter()
                        .copied()
                        .filter(|l| !left.contains(l))
                        .collect();
                    rules.push(SplitRule::Subset {
                        feature: f,
                        left,
                        right,
                    });
                }
            }
        }
    }

    let mut best: Option<SplitCandidate> = None;
    for rule in rules {
        let goes_left = |r: usize| match (&rule, data.value(r, rule.feature())) {
            (SplitRule::Threshold { value, .. }, FeatureValue::Num(x)) => x <= *value,
            (SplitRule::Subset { left, .. }, FeatureValue::Level(l)) => left.contains(&l),
            _ => unreachable!(),
        };
        let (left, right) = count(&goes_left);
        let (nl, nr) = (left.iter().sum::<u64>(), right.iter().sum::<u64>());
        if nl == 0 || nr == 0 {
            continue;
        }
        let gain =
            parent_gini - nl as f64 / n * direct_gini(&left) - nr as f64 / n * direct_gini(&right);
        if gain <= ORACLE_TIE_TOLERANCE {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) if gain > b.gain + ORACLE_TIE_TOLERANCE => true,
            Some(b) if (gain - b.gain).abs() <= ORACLE_TIE_TOLERANCE => {
                oracle_rule_order(&rule, &b.rule) == Ordering::Less
            }
            Some(_) => false,
        };
        if better {
            best = Some(SplitCandidate {
                rule,
                gain,
                left: ClassDistribution::from_counts(left),
                right: ClassDistribution::from_counts(right),
            });
        }
    }
    Ok(best)
}
