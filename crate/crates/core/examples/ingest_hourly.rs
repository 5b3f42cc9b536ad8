//! Parse raw wait times and weather, average to hourly means, attach
//! weather and calendar features, and print the resulting observations.
//!
//! ```text
//! cargo run --example ingest_hourly
//! ```

use delaytree::ingest::{
    aggregate_hourly, join_weather, parse_wait_times, parse_weather, Direction, Vehicle,
};
use delaytree::patterns::{assemble_rows, write_observations};
use delaytree::synth::sample_calendars;

const WAITS: &str = "\
timestamp,bridge,direction,vehicle_type,wait_minutes
2016-12-26T06:55,PB,to_us,passenger,40
2016-12-26T07:00,PB,to_us,passenger,12
2016-12-26T07:05,PB,to_us,passenger,18
2016-12-26T07:00,RB,to_us,passenger,9
2016-12-26T07:10,LQ,to_us,passenger,31
2016-12-26T08:00,PB,to_us,passenger,0
2016-12-26T08:00,RB,to_us,passenger,0
2016-12-26T08:00,LQ,to_us,passenger,0
2016-12-26T09:00,PB,to_us,passenger,5
2016-12-26T09:00,RB,to_us,passenger,0
2016-12-26T09:30,LQ,to_us,passenger,2.5
";

const WEATHER: &str = "\
timestamp,temperature_f,visibility,precipitation_in,condition
2016-12-26T06:00,18.0,4,0.1,snow
2016-12-26T09:00,21.5,9,0,clear
";

fn main() -> delaytree::Result<()> {
    let raw = parse_wait_times(WAITS)?;
    let hours = aggregate_hourly(&raw);
    for h in &hours {
        println!(
            "{} {} mean {:.2} over {} samples",
            h.hour_start, h.bridge, h.mean_wait_minutes, h.sample_count
        );
    }

    let joined = join_weather(&hours, &parse_weather(WEATHER)?)?;
    let assembled = assemble_rows(
        &joined,
        Direction::ToUs,
        Vehicle::Passenger,
        &sample_calendars(),
    )?;
    println!(
        "\nkept {} hours, dropped {} all-zero, skipped {} incomplete\n",
        assembled.dataset.len(),
        assembled.dropped_all_zero,
        assembled.skipped_incomplete
    );
    print!("{}", write_observations(&assembled.dataset.rows));
    Ok(())
}
