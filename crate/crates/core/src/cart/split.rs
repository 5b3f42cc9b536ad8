//! Candidate generation and best-split selection.
//!
//! Candidates are ranked by gain, compared exactly, and ties are broken by
//! schema feature order, then by rule order: lower threshold first for
//! continuous features and the lexicographically smaller left level set
//! for categorical ones. The order is total, so the winner does not depend
//! on evaluation order.

use std::cmp::Ordering;
use std::fmt;

use super::impurity::{information_gain, ClassDistribution, SplitScore};
use super::Dataset;
use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureSchema, FeatureValue};

/// Binary test applied at a split node. Rows for which the test holds go
/// left.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitRule {
    /// `x <= value`.
    Threshold { feature: usize, value: f64 },
    /// `x in left`. `right` lists the other levels that were present when
    /// the split was chosen; levels in neither set were never seen here.
    Subset {
        feature: usize,
        left: Vec<usize>,
        right: Vec<usize>,
    },
}

/// Where a row goes at a split node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Left,
    Right,
    /// A categorical level the node never saw during training.
    Unseen,
}

impl SplitRule {
    pub fn feature(&self) -> usize {
        match self {
            SplitRule::Threshold { feature, .. } | SplitRule::Subset { feature, .. } => *feature,
        }
    }

    pub fn route(&self, row: &[FeatureValue]) -> Result<Route> {
        let value = row
            .get(self.feature())
            .ok_or_else(|| Error::domain(format!("row lacks feature {}", self.feature())))?;
        match (self, value) {
            (SplitRule::Threshold { value: t, .. }, FeatureValue::Num(x)) if !x.is_nan() => {
                Ok(if x <= t { Route::Left } else { Route::Right })
            }
            (SplitRule::Subset { left, right, .. }, FeatureValue::Level(l)) => {
                Ok(if left.contains(l) {
                    Route::Left
                } else if right.contains(l) {
                    Route::Right
                } else {
                    Route::Unseen
                })
            }
            _ => Err(Error::domain(format!(
                "value {value:?} does not fit split on feature {}",
                self.feature()
            ))),
        }
    }

    /// Tie-break order between rules.
    pub fn canonical_cmp(&self, other: &SplitRule) -> Ordering {
        self.feature()
            .cmp(&other.feature())
            .then_with(|| match (self, other) {
                (SplitRule::Threshold { value: a, .. }, SplitRule::Threshold { value: b, .. }) => {
                    a.total_cmp(b)
                }
                (SplitRule::Subset { left: a, .. }, SplitRule::Subset { left: b, .. }) => a.cmp(b),
                (SplitRule::Threshold { .. }, SplitRule::Subset { .. }) => Ordering::Less,
                (SplitRule::Subset { .. }, SplitRule::Threshold { .. }) => Ordering::Greater,
            })
    }

    pub fn display<'a>(&'a self, schema: &'a FeatureSchema) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, schema }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a SplitRule,
    schema: &'a FeatureSchema,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spec = self.schema.get(self.rule.feature());
        let name = spec.map_or("?", |s| s.name.as_str());
        match self.rule {
            SplitRule::Threshold { value, .. } => write!(f, "{name} <= {value}"),
            SplitRule::Subset { left, .. } => {
                let levels = spec.and_then(|s| s.levels()).unwrap_or(&[]);
                let names: Vec<&str> = left
                    .iter()
                    .map(|i| levels.get(*i).map_or("?", String::as_str))
                    .collect();
                write!(f, "{name} in {{{}}}", names.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub rule: SplitRule,
    pub gain: f64,
    pub left: ClassDistribution,
    pub right: ClassDistribution,
}

impl SplitCandidate {
    fn new(rule: SplitRule, parent: &ClassDistribution, left: ClassDistribution) -> Self {
        let right = parent
            .minus(&left)
            .expect("left side is a subset of the parent");
        let gain = information_gain(parent, &left, &right).expect("consistent partition");
        SplitCandidate {
            rule,
            gain,
            left,
            right,
        }
    }

    /// `Greater` if `self` should win over `other`.
    pub(crate) fn rank(&self, other: &SplitCandidate) -> Ordering {
        SplitScore::new(&self.left, &self.right)
            .cmp(&SplitScore::new(&other.left, &other.right))
            .then_with(|| other.rule.canonical_cmp(&self.rule))
    }
}

/// Largest level count a categorical feature may have; subsets are
/// enumerated exhaustively.
pub const MAX_CATEGORICAL_LEVELS: usize = 20;

/// All binary partitions of `rows` on `feature` with two non-empty sides.
///
/// Continuous features give one threshold per midpoint between adjacent
/// distinct values. Categorical features with `k` levels present give the
/// `2^(k-1) - 1` subsets that exclude the last present level.
pub fn enumerate_splits(data: &Dataset, rows: &[usize], feature: usize) -> Vec<SplitCandidate> {
    let parent = data.distribution(rows);
    match &data.schema().features()[feature].kind {
        FeatureKind::Continuous => continuous_splits(data, rows, feature, &parent),
        FeatureKind::Categorical { levels } => {
            categorical_splits(data, rows, feature, levels.len(), &parent)
        }
    }
}

fn num(v: FeatureValue) -> f64 {
    match v {
        FeatureValue::Num(x) => x,
        FeatureValue::Level(_) => unreachable!("dataset rows are checked against the schema"),
    }
}

fn level(v: FeatureValue) -> usize {
    match v {
        FeatureValue::Level(l) => l,
        FeatureValue::Num(_) => unreachable!("dataset rows are checked against the schema"),
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let mid = a + (b - a) / 2.0;
    if mid < b {
        mid
    } else {
        a
    }
}

fn continuous_splits(
    data: &Dataset,
    rows: &[usize],
    feature: usize,
    parent: &ClassDistribution,
) -> Vec<SplitCandidate> {
    let mut sorted: Vec<(f64, usize)> = rows
        .iter()
        .map(|&r| (num(data.value(r, feature)), data.label(r)))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut out = Vec::new();
    let mut left = ClassDistribution::zeros(data.classes().len());
    for i in 0..sorted.len().saturating_sub(1) {
        left.add(sorted[i].1);
        let (a, b) = (sorted[i].0, sorted[i + 1].0);
        if a < b {
            let rule = SplitRule::Threshold {
                feature,
                value: midpoint(a, b),
            };
            out.push(SplitCandidate::new(rule, parent, left.clone()));
        }
    }
    out
}

fn categorical_splits(
    data: &Dataset,
    rows: &[usize],
    feature: usize,
    n_levels: usize,
    parent: &ClassDistribution,
) -> Vec<SplitCandidate> {
    let mut per_level = vec![ClassDistribution::zeros(data.classes().len()); n_levels];
    for &r in rows {
        per_level[level(data.value(r, feature))].add(data.label(r));
    }
    let present: Vec<usize> = (0..n_levels)
        .filter(|l| per_level[*l].total() > 0)
        .collect();
    let k = present.len();
    if k < 2 {
        return Vec::new();
    }
    let free = &present[..k - 1];
    (1u32..(1 << (k - 1)))
        .map(|mask| {
            let mut left = ClassDistribution::zeros(data.classes().len());
            let (mut in_left, mut in_right) = (Vec::new(), vec![present[k - 1]]);
            for (bit, lvl) in free.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    left.add_all(&per_level[*lvl]);
                    in_left.push(*lvl);
                } else {
                    in_right.push(*lvl);
                }
            }
            in_right.sort_unstable();
            let rule = SplitRule::Subset {
                feature,
                left: in_left,
                right: in_right,
            };
            SplitCandidate::new(rule, parent, left)
        })
        .collect()
}

/// Highest-gain candidate over every feature, or `None` when no candidate
/// lowers impurity.
pub fn best_split(data: &Dataset, rows: &[usize]) -> Option<SplitCandidate> {
    if rows.is_empty() {
        return None;
    }
    let parent = data.distribution(rows);
    let mut best: Option<SplitCandidate> = None;
    for feature in 0..data.schema().len() {
        for cand in enumerate_splits(data, rows, feature) {
            if !SplitScore::new(&cand.left, &cand.right).improves(&parent) {
                continue;
            }
            match &best {
                Some(b) if cand.rank(b) != Ordering::Greater => {}
                _ => best = Some(cand),
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureSpec;

    fn dataset(specs: Vec<FeatureSpec>, rows: Vec<Vec<FeatureValue>>, labels: &[&str]) -> Dataset {
        Dataset::from_labeled(
            FeatureSchema::new(specs).unwrap(),
            rows,
            labels.iter().map(|s| s.to_string()).collect(),
        )
        .unwrap()
    }

    fn all(data: &Dataset) -> Vec<usize> {
        (0..data.len()).collect()
    }

    #[test]
    fn thresholds_at_midpoints() {
        let data = dataset(
            vec![FeatureSpec::continuous("t")],
            [60.0, 64.0, 64.0, 70.0]
                .map(|x| vec![FeatureValue::Num(x)])
                .to_vec(),
            &["a", "b", "b", "a"],
        );
        let cands = enumerate_splits(&data, &all(&data), 0);
        let values: Vec<f64> = cands
            .iter()
            .map(|c| match c.rule {
                SplitRule::Threshold { value, .. } => value,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(values, vec![62.0, 67.0]);
    }

    #[test]
    fn three_levels_give_three_subsets() {
        let data = dataset(
            vec![FeatureSpec::categorical("c", ["a", "b", "c"])],
            (0..6).map(|i| vec![FeatureValue::Level(i % 3)]).collect(),
            &["x", "y", "x", "y", "x", "y"],
        );
        let lefts: Vec<Vec<usize>> = enumerate_splits(&data, &all(&data), 0)
            .into_iter()
            .map(|c| match c.rule {
                SplitRule::Subset { left, .. } => left,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(lefts, vec![vec![0], vec![1], vec![0, 1]]);
    }

    #[test]
    fn constant_feature_has_no_candidates() {
        let data = dataset(
            vec![
                FeatureSpec::continuous("t"),
                FeatureSpec::categorical("c", ["a", "b"]),
            ],
            (0..4)
                .map(|_| vec![FeatureValue::Num(1.0), FeatureValue::Level(1)])
                .collect(),
            &["x", "y", "x", "y"],
        );
        assert!(enumerate_splits(&data, &all(&data), 0).is_empty());
        assert!(enumerate_splits(&data, &all(&data), 1).is_empty());
        assert!(best_split(&data, &all(&data)).is_none());
    }

    #[test]
    fn only_informative_feature_wins_with_full_gain() {
        let rows = (0..8)
            .map(|i| vec![FeatureValue::Num(3.0), FeatureValue::Level(i % 2)])
            .collect();
        let labels: Vec<&str> = (0..8)
            .map(|i| if i % 2 == 1 { "P1" } else { "P0" })
            .collect();
        let data = dataset(
            vec![
                FeatureSpec::continuous("temp"),
                FeatureSpec::categorical("weekend", ["0", "1"]),
            ],
            rows,
            &labels,
        );
        let best = best_split(&data, &all(&data)).unwrap();
        assert_eq!(best.rule.feature(), 1);
        assert_eq!(best.gain, 0.5);
    }

    #[test]
    fn pure_rows_do_not_split() {
        let data = dataset(
            vec![FeatureSpec::continuous("t")],
            (0..5).map(|i| vec![FeatureValue::Num(i as f64)]).collect(),
            &["a"; 5],
        );
        assert!(best_split(&data, &all(&data)).is_none());
    }

    #[test]
    fn equal_gains_prefer_earlier_feature_then_lower_threshold() {
        // two identical copies of the informative column
        let rows = [1.0, 2.0, 3.0, 4.0]
            .map(|x| vec![FeatureValue::Num(x), FeatureValue::Num(x)])
            .to_vec();
        let data = dataset(
            vec![FeatureSpec::continuous("a"), FeatureSpec::continuous("b")],
            rows,
            &["x", "y", "y", "x"],
        );
        let best = best_split(&data, &all(&data)).unwrap();
        // thresholds 1.5 and 3.5 tie on gain; the lower one on feature 0 wins
        assert_eq!(
            best.rule,
            SplitRule::Threshold {
                feature: 0,
                value: 1.5
            }
        );
    }

    #[test]
    fn unseen_level_routes_as_unseen() {
        let rule = SplitRule::Subset {
            feature: 0,
            left: vec![0],
            right: vec![2],
        };
        assert_eq!(rule.route(&[FeatureValue::Level(0)]).unwrap(), Route::Left);
        assert_eq!(rule.route(&[FeatureValue::Level(2)]).unwrap(), Route::Right);
        assert_eq!(
            rule.route(&[FeatureValue::Level(1)]).unwrap(),
            Route::Unseen
        );
        assert!(rule.route(&[FeatureValue::Num(1.0)]).is_err());
    }
}
