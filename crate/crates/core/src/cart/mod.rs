//! Greedy top-down induction of binary classification trees.
//!
//! At each node the split with the largest Gini information gain is taken.
//! A node becomes a leaf when it holds fewer than `min_samples` rows, when
//! the best gain is below `min_gain`, when it is pure, or when `max_depth`
//! is reached. There is no pruning.

mod impurity;
mod split;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::features::{FeatureKind, FeatureSchema, FeatureValue};

pub use impurity::{gini, information_gain, ClassDistribution};
pub use split::{
    best_split, enumerate_splits, Route, RuleDisplay, SplitCandidate, SplitRule,
    MAX_CATEGORICAL_LEVELS,
};

/// Rows of encoded feature values with a class label each.
///
/// Class names are kept sorted, so the lowest class index is also the
/// lexicographically smallest label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: FeatureSchema,
    rows: Vec<Vec<FeatureValue>>,
    labels: Vec<usize>,
    classes: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from string labels.
    pub fn from_labeled(
        schema: FeatureSchema,
        rows: Vec<Vec<FeatureValue>>,
        labels: Vec<String>,
    ) -> Result<Self> {
        let mut classes = labels.clone();
        classes.sort();
        classes.dedup();
        let labels = labels
            .iter()
            .map(|l| classes.binary_search(l).expect("label is in class list"))
            .collect();
        Dataset::with_classes(schema, rows, labels, classes)
    }

    /// Builds a dataset from class indices into `classes`, which must be
    /// strictly increasing.
    pub fn with_classes(
        schema: FeatureSchema,
        rows: Vec<Vec<FeatureValue>>,
        labels: Vec<usize>,
        classes: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::domain(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("class names must be sorted and distinct"));
        }
        if let Some(l) = labels.iter().find(|l| **l >= classes.len()) {
            return Err(Error::domain(format!("label {l} has no class name")));
        }
        for spec in schema.features() {
            if let FeatureKind::Categorical { levels } = &spec.kind {
                if levels.len() > MAX_CATEGORICAL_LEVELS {
                    return Err(Error::usage(format!(
                        "feature `{}` has {} levels; at most {MAX_CATEGORICAL_LEVELS} are supported",
                        spec.name,
                        levels.len()
                    )));
                }
            }
        }
        for row in &rows {
            schema.check_row(row)?;
        }
        Ok(Dataset {
            schema,
            rows,
            labels,
            classes,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, index: usize) -> &[FeatureValue] {
        &self.rows[index]
    }

    pub fn value(&self, row: usize, feature: usize) -> FeatureValue {
        self.rows[row][feature]
    }

    pub fn label(&self, row: usize) -> usize {
        self.labels[row]
    }

    pub fn distribution(&self, rows: &[usize]) -> ClassDistribution {
        let mut d = ClassDistribution::zeros(self.classes.len());
        for &r in rows {
            d.add(self.labels[r]);
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Nodes with fewer rows are not split.
    pub min_samples: usize,
    /// Splits with a smaller information gain are not taken.
    pub min_gain: f64,
    pub max_depth: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            min_samples: 100,
            min_gain: 0.005,
            max_depth: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples < 1 {
            return Err(Error::usage("min_samples must be at least 1"));
        }
        if !self.min_gain.is_finite() || self.min_gain < 0.0 {
            return Err(Error::usage(
                "min_gain must be a finite non-negative number",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        rule: SplitRule,
        gain: f64,
        distribution: ClassDistribution,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Index into the tree's class list.
        label: usize,
        distribution: ClassDistribution,
    },
}

impl TreeNode {
    pub fn distribution(&self) -> &ClassDistribution {
        match self {
            TreeNode::Split { distribution, .. } | TreeNode::Leaf { distribution, .. } => {
                distribution
            }
        }
    }

    pub fn n_samples(&self) -> u64 {
        self.distribution().total()
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn children(&self) -> Option<(&TreeNode, &TreeNode)> {
        match self {
            TreeNode::Split { left, right, .. } => Some((left, right)),
            TreeNode::Leaf { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    schema: FeatureSchema,
    classes: Vec<String>,
    root: TreeNode,
}

impl DecisionTree {
    /// Assembles a tree from parts, checking that it is well formed: class
    /// counts add up at every split, leaves carry their majority label and
    /// rules refer to features of the right kind.
    pub fn from_parts(schema: FeatureSchema, classes: Vec<String>, root: TreeNode) -> Result<Self> {
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("class names must be sorted and distinct"));
        }
        let tree = DecisionTree {
            schema,
            classes,
            root,
        };
        for node in tree.nodes() {
            if node.distribution().counts().len() != tree.classes.len() {
                return Err(Error::domain(
                    "distribution length differs from class count",
                ));
            }
            match node {
                TreeNode::Leaf {
                    label,
                    distribution,
                } => {
                    if distribution.total() == 0 || distribution.majority() != Some(*label) {
                        return Err(Error::domain("leaf label is not its majority class"));
                    }
                }
                TreeNode::Split {
                    rule,
                    distribution,
                    left,
                    right,
                    ..
                } => {
                    let mut sum = left.distribution().clone();
                    sum.add_all(right.distribution());
                    if &sum != distribution {
                        return Err(Error::domain("child distributions do not sum to parent"));
                    }
                    let kind = tree
                        .schema
                        .get(rule.feature())
                        .map(|f| &f.kind)
                        .ok_or_else(|| Error::domain("split on unknown feature"))?;
                    let fits = match (rule, kind) {
                        (SplitRule::Threshold { value, .. }, FeatureKind::Continuous) => {
                            value.is_finite()
                        }
                        (
                            SplitRule::Subset { left, right, .. },
                            FeatureKind::Categorical { levels },
                        ) => {
                            !left.is_empty()
                                && !right.is_empty()
                                && left.iter().chain(right).all(|l| *l < levels.len())
                                && left.iter().all(|l| !right.contains(l))
                        }
                        _ => false,
                    };
                    if !fits {
                        return Err(Error::domain("split rule does not fit its feature"));
                    }
                }
            }
        }
        Ok(tree)
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Nodes in breadth-first order, left child before right. A node's
    /// position in this list is its stable id.
    pub fn nodes(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut queue = VecDeque::from([&self.root]);
        while let Some(node) = queue.pop_front() {
            out.push(node);
            if let Some((l, r)) = node.children() {
                queue.push_back(l);
                queue.push_back(r);
            }
        }
        out
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        self.nodes().into_iter().filter(|n| n.is_leaf()).collect()
    }

    pub fn class_name(&self, class: usize) -> &str {
        &self.classes[class]
    }

    /// The leaf reached by `x`.
    ///
    /// A categorical level that a split node never saw goes to the child
    /// that held more training rows (left on a tie).
    pub fn leaf_for(&self, x: &[FeatureValue]) -> Result<&TreeNode> {
        self.schema.check_row(x)?;
        let mut node = &self.root;
        while let TreeNode::Split {
            rule, left, right, ..
        } = node
        {
            node = match rule.route(x)? {
                Route::Left => left,
                Route::Right => right,
                Route::Unseen if left.n_samples() >= right.n_samples() => left,
                Route::Unseen => right,
            };
        }
        Ok(node)
    }

    pub fn predict(&self, x: &[FeatureValue]) -> Result<&str> {
        match self.leaf_for(x)? {
            TreeNode::Leaf { label, .. } => Ok(&self.classes[*label]),
            TreeNode::Split { .. } => unreachable!("descent stops at a leaf"),
        }
    }

    /// Distinct split features, in breadth-first order of first use.
    pub fn internal_features(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for node in self.nodes() {
            if let TreeNode::Split { rule, .. } = node {
                let name = &self.schema.features()[rule.feature()].name;
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
        out
    }
}

/// Grows a tree on every row of `data`.
pub fn grow_tree(data: &Dataset, cfg: &TrainConfig) -> Result<DecisionTree> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::domain("cannot grow a tree on an empty dataset"));
    }
    let rows: Vec<usize> = (0..data.len()).collect();
    let root = grow_node(data, rows, 0, cfg)?;
    Ok(DecisionTree {
        schema: data.schema().clone(),
        classes: data.classes().to_vec(),
        root,
    })
}

fn grow_node(
    data: &Dataset,
    rows: Vec<usize>,
    depth: usize,
    cfg: &TrainConfig,
) -> Result<TreeNode> {
    let distribution = data.distribution(&rows);
    let leaf = |distribution: ClassDistribution| TreeNode::Leaf {
        label: distribution
            .majority()
            .expect("node holds at least one row"),
        distribution,
    };
    if rows.len() < cfg.min_samples
        || distribution.is_pure()
        || cfg.max_depth.is_some_and(|d| depth >= d)
    {
        return Ok(leaf(distribution));
    }
    let Some(best) = best_split(data, &rows) else {
        return Ok(leaf(distribution));
    };
    if best.gain < cfg.min_gain {
        return Ok(leaf(distribution));
    }
    let (mut left_rows, mut right_rows) = (Vec::new(), Vec::new());
    for r in rows {
        match best.rule.route(data.row(r))? {
            Route::Left => left_rows.push(r),
            Route::Right => right_rows.push(r),
            Route::Unseen => unreachable!("every level at the node is in one of the sets"),
        }
    }
    log::debug!(
        "depth {depth}: split {} rows (gain {:.6}) into {} / {}",
        left_rows.len() + right_rows.len(),
        best.gain,
        left_rows.len(),
        right_rows.len()
    );
    Ok(TreeNode::Split {
        rule: best.rule,
        gain: best.gain,
        distribution,
        left: Box::new(grow_node(data, left_rows, depth + 1, cfg)?),
        right: Box::new(grow_node(data, right_rows, depth + 1, cfg)?),
    })
}
