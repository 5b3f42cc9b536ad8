//! Pattern frequencies, hourly category shares and the influential-factor
//! table for one synthetic month.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use delaytree::cart::TrainConfig;
use delaytree::ingest::{
    aggregate_hourly, groups, join_weather, parse_wait_times, parse_weather, Bridge, Direction,
    Vehicle,
};
use delaytree::patterns::{assemble_rows, pattern_frequencies};
use delaytree::report::{
    factor_summary, factor_summary_csv, hourly_distribution, hourly_distribution_csv,
    pattern_frequencies_csv,
};
use delaytree::synth;

fn main() -> delaytree::Result<()> {
    let cfg = synth::preset(
        "weekend",
        NaiveDate::from_ymd_opt(2017, 3, 1).unwrap(),
        31,
        7,
    )?;
    let out = synth::generate(&cfg)?;
    let hours = aggregate_hourly(&parse_wait_times(&out.wait_times_csv)?);
    let joined = join_weather(&hours, &parse_weather(&out.weather_csv)?)?;

    let mut trees = BTreeMap::new();
    for (direction, vehicle) in groups() {
        let ds = assemble_rows(&joined, direction, vehicle, &cfg.calendars)?.dataset;
        if (direction, vehicle) == (Direction::ToUs, Vehicle::Passenger) {
            println!("pattern frequencies, cars to the US:");
            print!("{}", pattern_frequencies_csv(&pattern_frequencies(&ds)));
        }
        trees.insert((vehicle, direction), ds.train(&TrainConfig::default())?);
    }

    println!("\nhourly shares at the Peace Bridge, cars to the US:");
    let dist = hourly_distribution(&hours, Bridge::Pb, Direction::ToUs, Vehicle::Passenger)?;
    print!("{}", hourly_distribution_csv(&dist));

    println!("\ninfluential factors:");
    print!("{}", factor_summary_csv(&factor_summary(&trees)));
    Ok(())
}
