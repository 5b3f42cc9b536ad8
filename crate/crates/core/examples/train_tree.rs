//! Grow a CART tree on a small hand-made dataset and classify new rows.
//!
//! ```text
//! cargo run --example train_tree
//! ```

use delaytree::cart::{grow_tree, Dataset, TrainConfig};
use delaytree::features::{FeatureSchema, FeatureSpec, FeatureValue};
use delaytree::report::{export_tree, ExportFormat};

fn main() -> delaytree::Result<()> {
    let schema = FeatureSchema::new(vec![
        FeatureSpec::continuous("temperature_f"),
        FeatureSpec::categorical("weekend", ["0", "1"]),
    ])?;

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..60 {
        let temp = 20.0 + i as f64;
        let weekend = i % 3 == 0;
        rows.push(vec![
            FeatureValue::Num(temp),
            FeatureValue::Level(weekend as usize),
        ]);
        let label = match (weekend, temp > 60.0) {
            (true, _) => "busy",
            (false, true) => "moderate",
            (false, false) => "quiet",
        };
        labels.push(label.to_string());
    }
    let data = Dataset::from_labeled(schema, rows, labels)?;

    // the defaults need 100 rows before splitting; this toy set is smaller
    let cfg = TrainConfig {
        min_samples: 10,
        ..TrainConfig::default()
    };
    let tree = grow_tree(&data, &cfg)?;
    print!("{}", export_tree(&tree, ExportFormat::Text));
    println!("split features: {:?}", tree.internal_features());

    for (temp, weekend) in [(35.0, 0), (75.0, 0), (50.0, 1)] {
        let x = [FeatureValue::Num(temp), FeatureValue::Level(weekend)];
        println!("{temp}F weekend={weekend} -> {}", tree.predict(&x)?);
    }
    Ok(())
}
