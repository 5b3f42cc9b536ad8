//! Export a tree as JSON, Graphviz DOT and an indented outline, then load
//! the JSON back.
//!
//! ```text
//! cargo run --example export_formats
//! cargo run --example export_formats -- dot | dot -Tpng > tree.png
//! ```

use chrono::NaiveDate;
use delaytree::cart::TrainConfig;
use delaytree::ingest::{Direction, Vehicle};
use delaytree::report::{export_tree, export_tree_for, import_tree_json, ExportFormat, Target};
use delaytree::synth;

fn main() -> delaytree::Result<()> {
    let only: Option<ExportFormat> = std::env::args().nth(1).map(|f| f.parse()).transpose()?;

    let start = NaiveDate::from_ymd_opt(2017, 1, 2).unwrap();
    let cfg = synth::preset("weekend-hour", start, 60, 1)?;
    let data = cfg_dataset(&cfg)?;
    let tree = data.train(&TrainConfig::default())?;
    let target = Target {
        direction: Direction::ToCan,
        vehicle: Vehicle::Commercial,
    };

    match only {
        Some(fmt) => print!("{}", export_tree_for(&tree, Some(target), fmt)),
        None => {
            let json = export_tree_for(&tree, Some(target), ExportFormat::Json);
            println!("--- json ---\n{json}");
            println!("--- dot ---\n{}", export_tree(&tree, ExportFormat::Dot));
            println!("--- text ---\n{}", export_tree(&tree, ExportFormat::Text));
            let (back, t) = import_tree_json(&json)?;
            assert_eq!(back, tree);
            println!("re-imported tree for {:?} is identical", t.unwrap());
        }
    }
    Ok(())
}

fn cfg_dataset(cfg: &synth::SynthConfig) -> delaytree::Result<delaytree::patterns::PatternDataset> {
    use delaytree::ingest::{aggregate_hourly, join_weather, parse_wait_times, parse_weather};
    let out = synth::generate(cfg)?;
    let hours = aggregate_hourly(&parse_wait_times(&out.wait_times_csv)?);
    let joined = join_weather(&hours, &parse_weather(&out.weather_csv)?)?;
    Ok(delaytree::patterns::assemble_rows(
        &joined,
        Direction::ToCan,
        Vehicle::Commercial,
        &cfg.calendars,
    )?
    .dataset)
}
