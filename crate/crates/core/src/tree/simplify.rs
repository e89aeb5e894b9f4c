use crate::error::{Error, Result};
use crate::logic::{andness_to_code, gcd2_value, AndnessCode};
use crate::scalar::Scalar;

use super::LspTree;

/// Recursive view of an aggregation tree. Children are ordered deepest
/// first; sibling weights sum to one.
///
/// With code merging, runs of adjacent aggregators mapping to the same
/// operator code collapse into one n-ary node. A merged child's weight is the
/// product of the chain weights along its attachment path, renormalized per
/// node, and the node's andness is the mean of the merged aggregators. The
/// merged view is an explanation aid: evaluating it only approximates the
/// original chain unless the merged andness values coincide.
#[derive(Debug, Clone, PartialEq)]
pub enum SimplifiedTree<T> {
    Leaf {
        feature: String,
        weight: T,
    },
    Operator {
        code: AndnessCode,
        andness: T,
        weight: T,
        children: Vec<SimplifiedTree<T>>,
    },
}

impl<T: Scalar> SimplifiedTree<T> {
    pub fn from_tree(tree: &LspTree<T>, code_merge: bool) -> Self {
        let features = tree.features();
        let nodes = tree.nodes();
        let code_of = |a: T| andness_to_code(a).expect("node andness validated on construction");

        let first = nodes[0];
        let w0 = first.weight.value();
        let mut current = SimplifiedTree::Operator {
            code: code_of(first.andness.value()),
            andness: first.andness.value(),
            weight: T::one(),
            children: vec![
                SimplifiedTree::leaf(&features[0], w0),
                SimplifiedTree::leaf(&features[1], T::one() - w0),
            ],
        };
        let mut merged = 1usize;

        for (node, feature) in nodes[1..].iter().zip(&features[2..]) {
            let w = node.weight.value();
            let alpha = node.andness.value();
            let code = code_of(alpha);
            let newcomer = SimplifiedTree::leaf(feature, T::one() - w);
            match &mut current {
                SimplifiedTree::Operator { code: cur, andness, children, .. } if code_merge && *cur == code => {
                    for child in children.iter_mut() {
                        child.scale_weight(w);
                    }
                    children.push(newcomer);
                    renormalize(children);
                    merged += 1;
                    *andness = *andness + (alpha - *andness) / T::of(merged as f64);
                }
                _ => {
                    current.set_weight(w);
                    current = SimplifiedTree::Operator {
                        code,
                        andness: alpha,
                        weight: T::one(),
                        children: vec![current, newcomer],
                    };
                    merged = 1;
                }
            }
        }
        current
    }

    fn leaf(feature: &str, weight: T) -> Self {
        SimplifiedTree::Leaf { feature: feature.to_string(), weight }
    }

    pub fn weight(&self) -> T {
        match self {
            SimplifiedTree::Leaf { weight, .. } | SimplifiedTree::Operator { weight, .. } => *weight,
        }
    }

    fn set_weight(&mut self, w: T) {
        match self {
            SimplifiedTree::Leaf { weight, .. } | SimplifiedTree::Operator { weight, .. } => *weight = w,
        }
    }

    fn scale_weight(&mut self, s: T) {
        let w = self.weight();
        self.set_weight(w * s);
    }

    /// Leaf features in left-to-right (deepest-first) order.
    pub fn features(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_features(&mut out);
        out
    }

    fn collect_features<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            SimplifiedTree::Leaf { feature, .. } => out.push(feature),
            SimplifiedTree::Operator { children, .. } => {
                for c in children {
                    c.collect_features(out);
                }
            }
        }
    }

    /// Number of operator nodes.
    pub fn operator_count(&self) -> usize {
        match self {
            SimplifiedTree::Leaf { .. } => 0,
            SimplifiedTree::Operator { children, .. } => {
                1 + children.iter().map(SimplifiedTree::operator_count).sum::<usize>()
            }
        }
    }

    /// Evaluates the view. Each operator folds its children left to right;
    /// the running group carries the accumulated sibling weight.
    pub fn evaluate(&self, value_of: &dyn Fn(&str) -> Option<T>) -> Result<T> {
        match self {
            SimplifiedTree::Leaf { feature, .. } => {
                value_of(feature).ok_or_else(|| Error::Dataset(format!("no value for feature `{feature}`")))
            }
            SimplifiedTree::Operator { andness, children, .. } => {
                let mut acc = children[0].evaluate(value_of)?;
                let mut acc_weight = children[0].weight();
                for child in &children[1..] {
                    let v = child.evaluate(value_of)?;
                    let total = acc_weight + child.weight();
                    let w_left = if total > T::zero() { acc_weight / total } else { T::of(0.5) };
                    acc = gcd2_value(acc, v, w_left.min(T::one()), *andness);
                    acc_weight = total;
                }
                Ok(acc)
            }
        }
    }
}

fn renormalize<T: Scalar>(children: &mut [SimplifiedTree<T>]) {
    let total: T = children.iter().map(SimplifiedTree::weight).sum();
    if total > T::zero() {
        for c in children.iter_mut() {
            let w = c.weight();
            c.set_weight(w / total);
        }
    }
}
