//! Tree rendering and summary tables.
//!
//! Node ids are breadth-first positions (root = 0, left child before
//! right), so every export is a deterministic function of the tree.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::Timelike;
use serde::{Deserialize, Serialize};

use crate::cart::{ClassDistribution, DecisionTree, SplitRule, TreeNode};
use crate::error::{Error, Result};
use crate::features::FeatureSchema;
use crate::ingest::{Bridge, Direction, HourlyWait, Vehicle, FIRST_HOUR, LAST_HOUR};
use crate::patterns::{categorize, DelayCategory4, DelayPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Dot,
    Text,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::Dot => "dot",
            ExportFormat::Text => "txt",
        }
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "dot" => Ok(ExportFormat::Dot),
            "text" | "txt" => Ok(ExportFormat::Text),
            other => Err(Error::usage(format!(
                "unknown tree format `{other}` (expected json, dot or text)"
            ))),
        }
    }
}

/// The (direction, vehicle) group a tree was trained for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Target {
    pub direction: Direction,
    pub vehicle: Vehicle,
}

pub fn export_tree(tree: &DecisionTree, format: ExportFormat) -> String {
    export_tree_for(tree, None, format)
}

/// Like [`export_tree`], recording `target` in the JSON document.
pub fn export_tree_for(
    tree: &DecisionTree,
    target: Option<Target>,
    format: ExportFormat,
) -> String {
    match format {
        ExportFormat::Json => to_json(tree, target),
        ExportFormat::Dot => to_dot(tree),
        ExportFormat::Text => to_text(tree),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonTree {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<Target>,
    schema: FeatureSchema,
    classes: Vec<String>,
    nodes: Vec<JsonNode>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonNode {
    id: usize,
    kind: JsonKind,
    rule: Option<JsonRule>,
    gain: Option<f64>,
    n: u64,
    counts: BTreeMap<String, u64>,
    label: Option<String>,
    children: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum JsonKind {
    Split,
    Leaf,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op")]
enum JsonRule {
    #[serde(rename = "<=")]
    Threshold { feature: String, threshold: f64 },
    #[serde(rename = "in")]
    Subset {
        feature: String,
        left: Vec<String>,
        right: Vec<String>,
    },
}

fn node_ids(nodes: &[&TreeNode]) -> HashMap<*const TreeNode, usize> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (*n as *const TreeNode, i))
        .collect()
}

fn level_names(schema: &FeatureSchema, feature: usize, levels: &[usize]) -> Vec<String> {
    let names = schema.features()[feature].levels().unwrap_or(&[]);
    levels.iter().map(|l| names[*l].clone()).collect()
}

fn to_json(tree: &DecisionTree, target: Option<Target>) -> String {
    let nodes = tree.nodes();
    let ids = node_ids(&nodes);
    let schema = tree.schema();
    let json_nodes = nodes
        .iter()
        .enumerate()
        .map(|(id, node)| {
            let counts = node
                .distribution()
                .counts()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(i, c)| (tree.class_name(i).to_string(), *c))
                .collect();
            let (kind, rule, gain, label, children) = match node {
                TreeNode::Split {
                    rule,
                    gain,
                    left,
                    right,
                    ..
                } => {
                    let feature = schema.features()[rule.feature()].name.clone();
                    let rule = match rule {
                        SplitRule::Threshold { value, .. } => JsonRule::Threshold {
                            feature,
                            threshold: *value,
                        },
                        SplitRule::Subset {
                            feature: f,
                            left,
                            right,
                        } => JsonRule::Subset {
                            feature,
                            left: level_names(schema, *f, left),
                            right: level_names(schema, *f, right),
                        },
                    };
                    let children = vec![
                        ids[&(left.as_ref() as *const TreeNode)],
                        ids[&(right.as_ref() as *const TreeNode)],
                    ];
                    (JsonKind::Split, Some(rule), Some(*gain), None, children)
                }
                TreeNode::Leaf { label, .. } => (
                    JsonKind::Leaf,
                    None,
                    None,
                    Some(tree.class_name(*label).to_string()),
                    Vec::new(),
                ),
            };
            JsonNode {
                id,
                kind,
                rule,
                gain,
                n: node.n_samples(),
                counts,
                label,
                children,
            }
        })
        .collect();
    let doc = JsonTree {
        target,
        schema: schema.clone(),
        classes: tree.classes().to_vec(),
        nodes: json_nodes,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("tree serializes");
    out.push('\n');
    out
}

/// Reads a tree written by the JSON exporter.
pub fn import_tree_json(text: &str) -> Result<(DecisionTree, Option<Target>)> {
    let doc: JsonTree =
        serde_json::from_str(text).map_err(|e| Error::data(format!("invalid tree json: {e}")))?;
    for (i, node) in doc.nodes.iter().enumerate() {
        if node.id != i {
            return Err(Error::data(format!(
                "node at position {i} has id {}",
                node.id
            )));
        }
    }
    if doc.nodes.is_empty() {
        return Err(Error::data("tree json has no nodes"));
    }
    let mut used = vec![false; doc.nodes.len()];
    let root = build_node(&doc, 0, &mut used)?;
    if used.iter().any(|u| !u) {
        return Err(Error::data("tree json has unreachable nodes"));
    }
    let tree = DecisionTree::from_parts(doc.schema, doc.classes, root)
        .map_err(|e| Error::data(format!("invalid tree: {e}")))?;
    Ok((tree, doc.target))
}

fn build_node(doc: &JsonTree, id: usize, used: &mut [bool]) -> Result<TreeNode> {
    let node = doc
        .nodes
        .get(id)
        .ok_or_else(|| Error::data(format!("missing node {id}")))?;
    if std::mem::replace(&mut used[id], true) {
        return Err(Error::data(format!("node {id} is referenced twice")));
    }
    let mut counts = vec![0; doc.classes.len()];
    for (label, c) in &node.counts {
        let class = doc
            .classes
            .iter()
            .position(|k| k == label)
            .ok_or_else(|| Error::data(format!("node {id}: unknown class `{label}`")))?;
        counts[class] = *c;
    }
    let distribution = ClassDistribution::from_counts(counts);
    if distribution.total() != node.n {
        return Err(Error::data(format!("node {id}: counts do not sum to n")));
    }
    match (node.kind, &node.rule, &node.children[..]) {
        (JsonKind::Leaf, None, []) => {
            let label = node
                .label
                .as_ref()
                .and_then(|l| doc.classes.iter().position(|k| k == l))
                .ok_or_else(|| Error::data(format!("node {id}: leaf without a known label")))?;
            Ok(TreeNode::Leaf {
                label,
                distribution,
            })
        }
        (JsonKind::Split, Some(rule), &[l, r]) => {
            if l <= id || r <= id {
                return Err(Error::data(format!("node {id}: children must come later")));
            }
            let rule = rule_from_json(&doc.schema, rule)
                .map_err(|e| Error::data(format!("node {id}: {e}")))?;
            let gain = node
                .gain
                .ok_or_else(|| Error::data(format!("node {id}: split without gain")))?;
            Ok(TreeNode::Split {
                rule,
                gain,
                distribution,
                left: Box::new(build_node(doc, l, used)?),
                right: Box::new(build_node(doc, r, used)?),
            })
        }
        _ => Err(Error::data(format!("node {id}: malformed node"))),
    }
}

fn rule_from_json(schema: &FeatureSchema, rule: &JsonRule) -> Result<SplitRule> {
    let feature_index = |name: &str| {
        schema
            .index_of(name)
            .ok_or_else(|| Error::data(format!("unknown feature `{name}`")))
    };
    match rule {
        JsonRule::Threshold { feature, threshold } => Ok(SplitRule::Threshold {
            feature: feature_index(feature)?,
            value: *threshold,
        }),
        JsonRule::Subset {
            feature,
            left,
            right,
        } => {
            let f = feature_index(feature)?;
            let levels = schema.features()[f]
                .levels()
                .ok_or_else(|| Error::data(format!("`{feature}` is not categorical")))?;
            let lookup = |names: &[String]| {
                names
                    .iter()
                    .map(|n| {
                        levels.iter().position(|l| l == n).ok_or_else(|| {
                            Error::data(format!("unknown level `{n}` of `{feature}`"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            };
            Ok(SplitRule::Subset {
                feature: f,
                left: lookup(left)?,
                right: lookup(right)?,
            })
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(tree: &DecisionTree) -> String {
    let nodes = tree.nodes();
    let ids = node_ids(&nodes);
    let mut out = String::from("digraph tree {\n    node [shape=box, fontname=\"Helvetica\"];\n");
    for (id, node) in nodes.iter().enumerate() {
        let text = match node {
            TreeNode::Split { rule, gain, .. } => format!(
                "{}\\nn = {}\\ngain = {:.4}",
                dot_escape(&rule.display(tree.schema()).to_string()),
                node.n_samples(),
                gain
            ),
            TreeNode::Leaf { label, .. } => format!(
                "{}\\nn = {}",
                dot_escape(tree.class_name(*label)),
                node.n_samples()
            ),
        };
        let style = if node.is_leaf() {
            ", style=rounded"
        } else {
            ""
        };
        writeln!(out, "    n{id} [label=\"{text}\"{style}];").unwrap();
    }
    for (id, node) in nodes.iter().enumerate() {
        if let Some((l, r)) = node.children() {
            let (l, r) = (ids[&(l as *const TreeNode)], ids[&(r as *const TreeNode)]);
            writeln!(out, "    n{id} -> n{l} [label=\"yes\"];").unwrap();
            writeln!(out, "    n{id} -> n{r} [label=\"no\"];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn to_text(tree: &DecisionTree) -> String {
    let nodes = tree.nodes();
    let ids = node_ids(&nodes);
    let mut out = String::new();
    text_node(tree, tree.root(), &ids, 0, "", &mut out);
    out
}

fn text_node(
    tree: &DecisionTree,
    node: &TreeNode,
    ids: &HashMap<*const TreeNode, usize>,
    depth: usize,
    edge: &str,
    out: &mut String,
) {
    let id = ids[&(node as *const TreeNode)];
    let counts: Vec<String> = node
        .distribution()
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(i, c)| format!("{}: {c}", tree.class_name(i)))
        .collect();
    let indent = "  ".repeat(depth);
    match node {
        TreeNode::Split {
            rule,
            gain,
            left,
            right,
            ..
        } => {
            writeln!(
                out,
                "{indent}{edge}[{id}] {} (n={}, gain={gain:.6})",
                rule.display(tree.schema()),
                node.n_samples()
            )
            .unwrap();
            text_node(tree, left, ids, depth + 1, "yes: ", out);
            text_node(tree, right, ids, depth + 1, "no: ", out);
        }
        TreeNode::Leaf { label, .. } => {
            writeln!(
                out,
                "{indent}{edge}[{id}] leaf \"{}\" (n={}; {})",
                tree.class_name(*label),
                node.n_samples(),
                counts.join(", ")
            )
            .unwrap();
        }
    }
}

/// Counts of each four-level delay category at one hour of day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HourCounts {
    pub hour: u32,
    /// Indexed like [`DelayCategory4::ALL`].
    pub counts: [u64; 4],
}

impl HourCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Category shares, or `None` for an hour without data.
    pub fn proportions(&self) -> Option<[f64; 4]> {
        let n = self.total();
        (n > 0).then(|| self.counts.map(|c| c as f64 / n as f64))
    }
}

/// Delay-category shares per hour of day (7 through 21) for one bridge.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlyDistribution {
    pub bridge: Bridge,
    pub direction: Direction,
    pub vehicle: Vehicle,
    pub hours: Vec<HourCounts>,
}

/// Tallies four-level categories by hour of day. Works on the full hourly
/// data, before all-zero hours are dropped or categories are merged.
pub fn hourly_distribution(
    hours: &[HourlyWait],
    bridge: Bridge,
    direction: Direction,
    vehicle: Vehicle,
) -> Result<HourlyDistribution> {
    let mut out: Vec<HourCounts> = (FIRST_HOUR..=LAST_HOUR)
        .map(|hour| HourCounts {
            hour,
            counts: [0; 4],
        })
        .collect();
    for h in hours
        .iter()
        .filter(|h| h.bridge == bridge && h.direction == direction && h.vehicle == vehicle)
    {
        let Some(slot) = out.iter_mut().find(|c| c.hour == h.hour_start.hour()) else {
            continue;
        };
        let cat = categorize(h.mean_wait_minutes)?;
        slot.counts[DelayCategory4::ALL.iter().position(|c| *c == cat).unwrap()] += 1;
    }
    Ok(HourlyDistribution {
        bridge,
        direction,
        vehicle,
        hours: out,
    })
}

pub fn hourly_distribution_csv(dist: &HourlyDistribution) -> String {
    let mut out = String::from("hour,n,no_delay,slight_delay,delay,heavy_delay\n");
    for h in &dist.hours {
        match h.proportions() {
            Some(p) => writeln!(
                out,
                "{},{},{},{},{},{}",
                h.hour,
                h.total(),
                p[0],
                p[1],
                p[2],
                p[3]
            ),
            None => writeln!(out, "{},0,,,,", h.hour),
        }
        .unwrap();
    }
    out
}

pub fn pattern_frequencies_csv(hist: &[(DelayPattern, usize)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["pattern", "count"]).unwrap();
    for (p, c) in hist {
        w.write_record([p.label(), c.to_string()]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// One row per tree: its leaf patterns and split features.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSummary {
    pub vehicle: Vehicle,
    pub direction: Direction,
    /// Every leaf as (label, training rows), largest first.
    pub leaves: Vec<(String, u64)>,
    pub factors: Vec<String>,
}

pub fn factor_summary(trees: &BTreeMap<(Vehicle, Direction), DecisionTree>) -> Vec<FactorSummary> {
    trees
        .iter()
        .map(|((vehicle, direction), tree)| {
            let mut leaves: Vec<(String, u64)> = tree
                .leaves()
                .into_iter()
                .map(|leaf| match leaf {
                    TreeNode::Leaf { label, .. } => {
                        (tree.class_name(*label).to_string(), leaf.n_samples())
                    }
                    TreeNode::Split { .. } => unreachable!(),
                })
                .collect();
            // stable: equal counts keep breadth-first order
            leaves.sort_by_key(|leaf| std::cmp::Reverse(leaf.1));
            FactorSummary {
                vehicle: *vehicle,
                direction: *direction,
                leaves,
                factors: tree.internal_features(),
            }
        })
        .collect()
}

pub fn factor_summary_csv(rows: &[FactorSummary]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "vehicle",
        "direction",
        "pattern",
        "leaf_samples",
        "influential_factors",
    ])
    .unwrap();
    for s in rows {
        let factors = s.factors.join("; ");
        for (label, n) in &s.leaves {
            w.write_record([
                s.vehicle.as_str(),
                s.direction.as_str(),
                label,
                &n.to_string(),
                &factors,
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
