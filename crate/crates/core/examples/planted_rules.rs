//! Plant a known rule in synthetic data and check that the learner finds
//! it again.
//!
//! ```text
//! cargo run --example planted_rules -- [days] [seed]
//! ```

use chrono::NaiveDate;
use delaytree::cart::TrainConfig;
use delaytree::features::HourInterval;
use delaytree::ingest::{
    aggregate_hourly, join_weather, parse_wait_times, parse_weather, Direction, Vehicle,
};
use delaytree::patterns::assemble_rows;
use delaytree::synth::{self, RuleCondition, SynthConfig};

fn main() -> delaytree::Result<()> {
    let mut args = std::env::args().skip(1);
    let days: u32 = args.next().map_or(120, |s| s.parse().expect("days"));
    let seed: u64 = args.next().map_or(42, |s| s.parse().expect("seed"));

    let mut cfg = SynthConfig::new(NaiveDate::from_ymd_opt(2016, 8, 22).unwrap(), days, seed);
    cfg.flip_prob = 0.05;
    cfg.jitter_sd = 2.0;
    cfg.calendars = synth::sample_calendars();
    let weekend = cfg
        .plant(
            Direction::ToUs,
            Vehicle::Passenger,
            RuleCondition::Weekend(true),
            vec![12.0, 0.0, 12.0],
        )?
        .target
        .clone();
    let evening = cfg
        .plant(
            Direction::ToUs,
            Vehicle::Passenger,
            RuleCondition::HourIntervalIn(vec![HourInterval::Evening, HourInterval::Night]),
            vec![0.0, 12.0, 30.0],
        )?
        .target
        .clone();
    println!("weekend hours         -> `{weekend}`");
    println!("weekday evening/night -> `{evening}`");
    println!(
        "otherwise             -> `{}`",
        cfg.base_pattern(Direction::ToUs, Vehicle::Passenger)?
    );

    let out = synth::generate(&cfg)?;
    let flipped = out.emissions.iter().filter(|e| e.flipped).count();
    println!(
        "\n{} group-hours emitted, {flipped} with a flipped label",
        out.emissions.len()
    );

    let hours = aggregate_hourly(&parse_wait_times(&out.wait_times_csv)?);
    let joined = join_weather(&hours, &parse_weather(&out.weather_csv)?)?;
    let ds = assemble_rows(&joined, Direction::ToUs, Vehicle::Passenger, &cfg.calendars)?.dataset;
    let tree = ds.train(&TrainConfig::default())?;

    let correct = ds
        .rows
        .iter()
        .filter(|r| tree.predict(&r.features.values()).ok() == Some(r.pattern.label().as_str()))
        .count();
    println!("recovered split features: {:?}", tree.internal_features());
    println!("training accuracy: {:.3}", correct as f64 / ds.len() as f64);
    Ok(())
}
