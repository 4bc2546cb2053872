//! Greedy top-down decision tree induction with information gain.

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<F: Scalar = f64> {
    /// Majority class at the node and that class's fraction of the node's
    /// training rows.
    Leaf { class: usize, probability: F },
    /// Rows with feature <= threshold go left, the rest right.
    Split {
        feature: usize,
        threshold: F,
        left: Box<TreeNode<F>>,
        right: Box<TreeNode<F>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTreeModel<F: Scalar = f64> {
    pub root: TreeNode<F>,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub n_features: usize,
}

impl<F: Scalar> DecisionTreeModel<F> {
    /// Majority class and its fraction at the reached leaf.
    pub fn predict(&self, x: &[F]) -> Result<(usize, F)> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { class, probability } => return Ok((*class, *probability)),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    /// Fraction of class-1 rows at the reached leaf; assumes binary labels
    /// {0, 1}, which is all the pipeline trains.
    pub fn attack_probability(&self, x: &[F]) -> Result<F> {
        let (class, probability) = self.predict(x)?;
        Ok(if class == 1 {
            probability
        } else {
            F::one() - probability
        })
    }

    pub fn node_count(&self) -> usize {
        fn count<F: Scalar>(n: &TreeNode<F>) -> usize {
            match n {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => 1 + count(left) + count(right),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth<F: Scalar>(n: &TreeNode<F>) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }

    /// Pre-order text dump: a header line followed by one line per node
    /// with explicit pre-order ids.
    pub fn to_lines(&self) -> Vec<String> {
        let mut lines = vec![format!(
            "tree {} {} {} {}",
            self.n_features,
            self.max_depth,
            self.min_samples_leaf,
            self.node_count()
        )];
        fn dump<F: Scalar>(node: &TreeNode<F>, next_id: &mut usize, lines: &mut Vec<String>) -> usize {
            let id = *next_id;
            *next_id += 1;
            match node {
                TreeNode::Leaf { class, probability } => {
                    lines.push(format!("node {id} leaf {class} {probability}"));
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    let slot = lines.len();
                    lines.push(String::new());
                    let left_id = dump(left, next_id, lines);
                    let right_id = dump(right, next_id, lines);
                    lines[slot] =
                        format!("node {id} split {feature} {threshold} {left_id} {right_id}");
                }
            }
            id
        }
        let mut next_id = 0;
        dump(&self.root, &mut next_id, &mut lines);
        lines
    }

    /// Parses the output of [`Self::to_lines`]. Consumes exactly the header
    /// plus the node count it announces.
    pub fn from_lines(lines: &[&str]) -> Result<(Self, usize)> {
        let header = lines.first().ok_or_else(|| Error::parse(1, 1, "missing tree header"))?;
        let head: Vec<&str> = header.split(' ').collect();
        if head.len() != 5 || head[0] != "tree" {
            return Err(Error::parse(1, 1, "bad tree header"));
        }
        let n_features: usize = head[1]
            .parse()
            .map_err(|_| Error::parse(1, 2, "bad feature count"))?;
        let max_depth: usize = head[2]
            .parse()
            .map_err(|_| Error::parse(1, 3, "bad max depth"))?;
        let min_samples_leaf: usize = head[3]
            .parse()
            .map_err(|_| Error::parse(1, 4, "bad min samples"))?;
        let n_nodes: usize = head[4]
            .parse()
            .map_err(|_| Error::parse(1, 5, "bad node count"))?;
        if lines.len() < 1 + n_nodes {
            return Err(Error::parse(1, 1, "tree dump truncated"));
        }

        #[derive(Clone)]
        enum Raw<F: Scalar> {
            Leaf(usize, F),
            Split(usize, F, usize, usize),
        }
        let mut raw: Vec<Raw<F>> = Vec::with_capacity(n_nodes);
        for (i, line) in lines[1..1 + n_nodes].iter().enumerate() {
            let line_no = i + 2;
            let parts: Vec<&str> = line.split(' ').collect();
            if parts.len() < 4 || parts[0] != "node" {
                return Err(Error::parse(line_no, 1, "bad node line"));
            }
            let id: usize = parts[1]
                .parse()
                .map_err(|_| Error::parse(line_no, 2, "bad node id"))?;
            if id != i {
                return Err(Error::parse(line_no, 2, "node ids must be pre-order"));
            }
            match parts[2] {
                "leaf" if parts.len() == 5 => {
                    let class: usize = parts[3]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 4, "bad class"))?;
                    let probability: F = parts[4]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 5, "bad probability"))?;
                    raw.push(Raw::Leaf(class, probability));
                }
                "split" if parts.len() == 7 => {
                    let feature: usize = parts[3]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 4, "bad feature"))?;
                    let threshold: F = parts[4]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 5, "bad threshold"))?;
                    let left: usize = parts[5]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 6, "bad left id"))?;
                    let right: usize = parts[6]
                        .parse()
                        .map_err(|_| Error::parse(line_no, 7, "bad right id"))?;
                    raw.push(Raw::Split(feature, threshold, left, right));
                }
                _ => return Err(Error::parse(line_no, 3, "bad node kind")),
            }
        }

        fn build<F: Scalar>(raw: &[Raw<F>], id: usize) -> Result<TreeNode<F>>
        where
            Raw<F>: Clone,
        {
            match raw.get(id) {
                Some(Raw::Leaf(class, probability)) => Ok(TreeNode::Leaf {
                    class: *class,
                    probability: *probability,
                }),
                Some(Raw::Split(feature, threshold, left, right)) => Ok(TreeNode::Split {
                    feature: *feature,
                    threshold: *threshold,
                    left: Box::new(build(raw, *left)?),
                    right: Box::new(build(raw, *right)?),
                }),
                None => Err(Error::parse(1, 1, format!("dangling node id {id}"))),
            }
        }
        let root = build(&raw, 0)?;
        Ok((
            DecisionTreeModel {
                root,
                max_depth,
                min_samples_leaf,
                n_features,
            },
            1 + n_nodes,
        ))
    }
}

/// Entropy in bits of a class-count histogram.
fn entropy<F: Scalar>(counts: &[usize], total: usize) -> F {
    if total == 0 {
        return F::zero();
    }
    let total_f = scalar::from_usize::<F>(total);
    let mut h = F::zero();
    for &c in counts {
        if c > 0 {
            let p = scalar::from_usize::<F>(c) / total_f;
            h = h - p * p.log2();
        }
    }
    h
}

struct BestSplit<F: Scalar> {
    feature: usize,
    threshold: F,
    gain: F,
}

/// Trains a tree by greedy induction: split criterion is information gain,
/// candidate thresholds are midpoints between consecutive distinct sorted
/// values, and growth stops on a pure node, the depth limit, the leaf-size
/// floor or zero best gain. Gain ties resolve to the lower feature index,
/// then the lower threshold.
pub fn train_decision_tree<F: Scalar>(
    data: &[Vec<F>],
    labels: &[usize],
    max_depth: usize,
    min_samples_leaf: usize,
) -> Result<DecisionTreeModel<F>> {
    let k = validate_training(data, labels)?;
    if min_samples_leaf == 0 {
        return Err(Error::invalid("min_samples_leaf", "must be at least 1"));
    }
    let n_classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let rows: Vec<usize> = (0..data.len()).collect();
    let root = grow(data, labels, &rows, k, n_classes, 0, max_depth, min_samples_leaf);
    Ok(DecisionTreeModel {
        root,
        max_depth,
        min_samples_leaf,
        n_features: k,
    })
}

#[allow(clippy::too_many_arguments)]
fn grow<F: Scalar>(
    data: &[Vec<F>],
    labels: &[usize],
    rows: &[usize],
    k: usize,
    n_classes: usize,
    depth: usize,
    max_depth: usize,
    min_samples_leaf: usize,
) -> TreeNode<F> {
    let mut counts = vec![0usize; n_classes];
    for &r in rows {
        counts[labels[r]] += 1;
    }
    let make_leaf = |counts: &[usize]| -> TreeNode<F> {
        let mut class = 0;
        for (c, &cnt) in counts.iter().enumerate() {
            if cnt > counts[class] {
                class = c;
            }
        }
        TreeNode::Leaf {
            class,
            probability: scalar::from_usize::<F>(counts[class])
                / scalar::from_usize(rows.len()),
        }
    };

    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if pure || depth >= max_depth || rows.len() < 2 * min_samples_leaf {
        return make_leaf(&counts);
    }

    let parent_entropy = entropy::<F>(&counts, rows.len());
    let total = scalar::from_usize::<F>(rows.len());
    let mut best: Option<BestSplit<F>> = None;

    for feature in 0..k {
        let mut ordered: Vec<(F, usize)> = rows.iter().map(|&r| (data[r][feature], labels[r])).collect();
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        let mut left_counts = vec![0usize; n_classes];
        let mut left_n = 0usize;
        for i in 0..ordered.len() - 1 {
            left_counts[ordered[i].1] += 1;
            left_n += 1;
            if ordered[i].0 == ordered[i + 1].0 {
                continue;
            }
            let right_n = rows.len() - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }
            let right_counts: Vec<usize> = counts
                .iter()
                .zip(&left_counts)
                .map(|(t, l)| t - l)
                .collect();
            let gain = parent_entropy
                - (scalar::from_usize::<F>(left_n) / total) * entropy(&left_counts, left_n)
                - (scalar::from_usize::<F>(right_n) / total) * entropy(&right_counts, right_n);
            // Strictly-greater comparison over features-then-thresholds in
            // ascending order keeps the first maximum: lower feature index,
            // then lower threshold.
            if best.as_ref().map_or(true, |b| gain > b.gain) {
                let threshold = (ordered[i].0 + ordered[i + 1].0) / scalar::from_f64(2.0);
                best = Some(BestSplit {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }

    let best = match best {
        Some(b) if b.gain > F::zero() => b,
        _ => return make_leaf(&counts),
    };

    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&r| data[r][best.feature] <= best.threshold);
    let left = grow(
        data,
        labels,
        &left_rows,
        k,
        n_classes,
        depth + 1,
        max_depth,
        min_samples_leaf,
    );
    let right = grow(
        data,
        labels,
        &right_rows,
        k,
        n_classes,
        depth + 1,
        max_depth,
        min_samples_leaf,
    );
    TreeNode::Split {
        feature: best.feature,
        threshold: best.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

pub(crate) fn validate_training<F: Scalar>(data: &[Vec<F>], labels: &[usize]) -> Result<usize> {
    if data.is_empty() {
        return Err(Error::TooFewRecords { needed: 1, got: 0 });
    }
    if labels.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            got: labels.len(),
        });
    }
    let k = data[0].len();
    if k == 0 {
        return Err(Error::invalid("matrix", "zero columns"));
    }
    for row in data {
        if row.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "training matrix" });
        }
    }
    Ok(k)
}
