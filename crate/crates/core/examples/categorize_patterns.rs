//! Turn per-bridge hourly waits into delay categories and patterns.
//!
//! ```text
//! cargo run --example categorize_patterns
//! ```

use delaytree::ingest::Vehicle;
use delaytree::patterns::{categorize, DelayPattern};

fn main() -> delaytree::Result<()> {
    for wait in [0.0, 4.5, 15.0, 15.1, 30.0, 42.0] {
        let c = categorize(wait)?;
        println!("{wait:>5} min -> {c} (merged: {})", c.merged());
    }

    // PB, RB, LQ for cars
    let waits = [22.0, 3.0, 31.5];
    let levels = waits
        .iter()
        .map(|w| categorize(*w).map(|c| c.merged()))
        .collect::<delaytree::Result<Vec<_>>>()?;
    let pattern = DelayPattern::new(levels);
    println!("\nwaits {waits:?} -> pattern `{pattern}`");

    for vehicle in [Vehicle::Passenger, Vehicle::Commercial] {
        let space = DelayPattern::space(vehicle);
        println!(
            "{vehicle}: {} possible patterns, first `{}`",
            space.len(),
            space[0]
        );
    }
    Ok(())
}
