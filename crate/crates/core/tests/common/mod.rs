#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::NaiveDate;
use delaytree::cart::{grow_tree, Dataset, DecisionTree, Route, TrainConfig, TreeNode};
use delaytree::features::HourInterval;
use delaytree::features::{FeatureKind, FeatureSchema, FeatureSpec, FeatureValue};
use delaytree::ingest::{
    aggregate_hourly, join_weather, parse_wait_times, parse_weather, Direction, Vehicle,
};
use delaytree::patterns::{assemble_rows, PatternDataset};
use delaytree::synth::{self, RuleCondition, SynthConfig};
use rand::Rng;

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

/// 1..=200 rows, 1..=4 features of mixed type, 2..=4 classes. Continuous
/// values come from a coarse grid so that ties and repeated values are
/// common.
pub fn random_dataset(rng: &mut impl Rng) -> Dataset {
    let n_rows = rng.random_range(1..=200);
    let n_features = rng.random_range(1..=4);
    let n_classes = rng.random_range(2..=4);
    let mut specs = Vec::new();
    for f in 0..n_features {
        if rng.random_bool(0.5) {
            specs.push(FeatureSpec::continuous(format!("x{f}")));
        } else {
            let k = rng.random_range(2..=5);
            specs.push(FeatureSpec::categorical(
                format!("c{f}"),
                (0..k).map(|l| format!("l{l}")),
            ));
        }
    }
    let grid: Vec<usize> = specs.iter().map(|_| rng.random_range(2..=25)).collect();
    let schema = FeatureSchema::new(specs).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..n_rows {
        let row: Vec<FeatureValue> = schema
            .features()
            .iter()
            .zip(&grid)
            .map(|(spec, g)| match &spec.kind {
                FeatureKind::Continuous => {
                    FeatureValue::Num(rng.random_range(0..*g) as f64 * 0.5 - 3.0)
                }
                FeatureKind::Categorical { levels } => {
                    FeatureValue::Level(rng.random_range(0..levels.len()))
                }
            })
            .collect();
        // labels lean on the first feature so trees get some depth
        let lean = match row[0] {
            FeatureValue::Num(x) => (x > 0.0) as usize,
            FeatureValue::Level(l) => l % 2,
        };
        let label = if rng.random_bool(0.6) {
            lean
        } else {
            rng.random_range(0..n_classes)
        };
        rows.push(row);
        labels.push(format!("k{label}"));
    }
    Dataset::from_labeled(schema, rows, labels).unwrap()
}

/// Walks `tree`, re-deriving each node's rows, and checks every split
/// against the brute-force oracle. Returns the number of splits checked.
pub fn check_against_oracle(
    data: &Dataset,
    tree: &DecisionTree,
    cfg: &TrainConfig,
) -> Result<usize, String> {
    fn walk(
        data: &Dataset,
        node: &TreeNode,
        rows: Vec<usize>,
        cfg: &TrainConfig,
    ) -> Result<usize, String> {
        let oracle = synth::brute_force_best_split(data, &rows).map_err(|e| e.to_string())?;
        match node {
            TreeNode::Split {
                rule,
                gain,
                left,
                right,
                ..
            } => {
                let o = oracle
                    .ok_or_else(|| format!("split on {rule:?} where the oracle finds none"))?;
                if &o.rule != rule {
                    return Err(format!("rule {rule:?} but oracle picks {:?}", o.rule));
                }
                if (o.gain - gain).abs() > 1e-12 {
                    return Err(format!("gain {gain} but oracle {}", o.gain));
                }
                let (mut l, mut r) = (Vec::new(), Vec::new());
                for row in rows {
                    match rule.route(data.row(row)).unwrap() {
                        Route::Left => l.push(row),
                        Route::Right => r.push(row),
                        Route::Unseen => {
                            return Err("row with unseen level inside training data".into())
                        }
                    }
                }
                Ok(1 + walk(data, left, l, cfg)? + walk(data, right, r, cfg)?)
            }
            TreeNode::Leaf { distribution, .. } => {
                let may_split = rows.len() >= cfg.min_samples && !distribution.is_pure();
                match oracle {
                    Some(o) if may_split && o.gain >= cfg.min_gain => Err(format!(
                        "leaf of {} rows where the oracle splits with gain {}",
                        rows.len(),
                        o.gain
                    )),
                    _ => Ok(0),
                }
            }
        }
    }
    walk(data, tree.root(), (0..data.len()).collect(), cfg)
}

/// Two classes and one binary feature whose levels hold the given
/// (A, B) counts.
pub fn two_group_data(level0: (usize, usize), level1: (usize, usize)) -> Dataset {
    let schema = FeatureSchema::new(vec![FeatureSpec::categorical("weekend", ["0", "1"])]).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (level, (a, b)) in [(0, level0), (1, level1)] {
        for (label, count) in [("A", a), ("B", b)] {
            for _ in 0..count {
                rows.push(vec![FeatureValue::Level(level)]);
                labels.push(label.to_string());
            }
        }
    }
    Dataset::from_labeled(schema, rows, labels).unwrap()
}

/// Passenger traffic to the US over `days` days from 2016-08-22 with the
/// given rules, 5% label flips and 2 minutes of jitter.
pub fn planted_config(days: u32, seed: u64, with_hour_rule: bool) -> SynthConfig {
    let mut cfg = SynthConfig::new(date("2016-08-22"), days, seed);
    cfg.flip_prob = 0.05;
    cfg.jitter_sd = 2.0;
    cfg.calendars = synth::sample_calendars();
    cfg.plant(
        Direction::ToUs,
        Vehicle::Passenger,
        RuleCondition::Weekend(true),
        vec![12.0, 0.0, 12.0],
    )
    .unwrap();
    if with_hour_rule {
        cfg.plant(
            Direction::ToUs,
            Vehicle::Passenger,
            RuleCondition::HourIntervalIn(vec![HourInterval::Evening, HourInterval::Night]),
            vec![0.0, 12.0, 30.0],
        )
        .unwrap();
    }
    cfg
}

/// Runs the generator and ingest stages for one group.
pub fn synth_dataset(cfg: &SynthConfig, direction: Direction, vehicle: Vehicle) -> PatternDataset {
    let out = synth::generate(cfg).unwrap();
    let hours = aggregate_hourly(&parse_wait_times(&out.wait_times_csv).unwrap());
    let joined = join_weather(&hours, &parse_weather(&out.weather_csv).unwrap()).unwrap();
    assemble_rows(&joined, direction, vehicle, &cfg.calendars)
        .unwrap()
        .dataset
}

pub fn accuracy(tree: &DecisionTree, ds: &PatternDataset) -> f64 {
    let hits = ds
        .rows
        .iter()
        .filter(|r| tree.predict(&r.features.values()).unwrap() == r.pattern.label())
        .count();
    hits as f64 / ds.len() as f64
}

pub fn feature_set(tree: &DecisionTree) -> BTreeSet<String> {
    tree.internal_features().into_iter().collect()
}

pub fn train_default(ds: &PatternDataset) -> DecisionTree {
    grow_tree(&ds.training_set().unwrap(), &TrainConfig::default()).unwrap()
}
