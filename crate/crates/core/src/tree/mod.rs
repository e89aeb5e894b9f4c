//! Left-associative aggregation trees: the symbolic artifact produced by
//! training.
//!
//! A tree over features `f1..fn` computes
//! `gcd2(…gcd2(gcd2(f1, f2), f3)…, fn)`. Node `i` joins the running result
//! with feature `i + 1`, so the last feature is the top "newcomer" and carries
//! the most influence; the first features are the deepest leaves.

mod expression;
mod json;
mod prompt;
mod simplify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::logic::{gcd2_value, Andness, NodeWeight};
use crate::scalar::Scalar;

pub use expression::Expression;
pub use prompt::emit_report_prompt;
pub use simplify::SimplifiedTree;

/// Tree shape. Only the left-associative chain is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeLayout {
    #[default]
    Left,
    Balanced,
}

impl TreeLayout {
    /// Rejects layouts that are recognized but not implemented.
    pub fn ensure_supported(self) -> Result<Self> {
        match self {
            TreeLayout::Left => Ok(self),
            TreeLayout::Balanced => Err(Error::Config(
                "tree_layout \"balanced\" is recognized but untested and not supported; use \"left\"".into(),
            )),
        }
    }
}

impl FromStr for TreeLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "left" => Ok(TreeLayout::Left),
            "balanced" => Ok(TreeLayout::Balanced),
            other => Err(Error::Config(format!("unknown tree_layout `{other}`"))),
        }
    }
}

impl fmt::Display for TreeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeLayout::Left => "left",
            TreeLayout::Balanced => "balanced",
        })
    }
}

/// One binary aggregator: weight of the running (left) argument and andness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<T> {
    pub weight: NodeWeight<T>,
    pub andness: Andness<T>,
}

impl<T: Scalar> Node<T> {
    pub fn new(weight: T, andness: T) -> Result<Self> {
        Ok(Self { weight: NodeWeight::new(weight)?, andness: Andness::new(andness)? })
    }

    #[inline]
    pub fn apply(&self, running: T, newcomer: T) -> T {
        gcd2_value(running, newcomer, self.weight.value(), self.andness.value())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LspTree<T> {
    features: Vec<String>,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> LspTree<T> {
    pub fn new(features: Vec<String>, nodes: Vec<Node<T>>) -> Result<Self> {
        if features.len() < 2 {
            return Err(domain(format!("a tree needs at least 2 features, got {}", features.len())));
        }
        if nodes.len() + 1 != features.len() {
            return Err(Error::Shape { expected: features.len() - 1, got: nodes.len() });
        }
        Ok(Self { features, nodes })
    }

    /// Builds a tree from `(weight, andness)` pairs.
    pub fn from_params(features: Vec<String>, params: &[(T, T)]) -> Result<Self> {
        let nodes = params.iter().map(|&(w, a)| Node::new(w, a)).collect::<Result<Vec<_>>>()?;
        Self::new(features, nodes)
    }

    pub fn with_layout(features: Vec<String>, nodes: Vec<Node<T>>, layout: TreeLayout) -> Result<Self> {
        layout.ensure_supported()?;
        Self::new(features, nodes)
    }

    pub fn layout(&self) -> TreeLayout {
        TreeLayout::Left
    }

    /// Feature names, deepest first.
    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn nodes(&self) -> &[Node<T>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Left fold of the aggregators over a sample given in tree order.
    pub fn evaluate(&self, sample: &[T]) -> Result<T> {
        if sample.len() != self.features.len() {
            return Err(Error::Shape { expected: self.features.len(), got: sample.len() });
        }
        if let Some(v) = sample.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(domain(format!("sample value {v} outside [0, 1]")));
        }
        Ok(self.evaluate_unchecked(sample))
    }

    pub(crate) fn evaluate_unchecked(&self, sample: &[T]) -> T {
        self.nodes
            .iter()
            .zip(&sample[1..])
            .fold(sample[0], |running, (node, &x)| node.apply(running, x))
    }

    /// Column index of every tree feature inside `columns`.
    pub fn bind(&self, columns: &[String]) -> Result<Vec<usize>> {
        self.features
            .iter()
            .map(|f| {
                columns
                    .iter()
                    .position(|c| c == f)
                    .ok_or_else(|| Error::Dataset(format!("feature `{f}` missing from data")))
            })
            .collect()
    }

    /// Evaluates a row laid out in some other column order, using indices
    /// from [`LspTree::bind`].
    pub fn evaluate_bound(&self, row: &[T], binding: &[usize]) -> T {
        let mut it = binding.iter().map(|&i| row[i]);
        let first = it.next().expect("tree has at least two features");
        self.nodes.iter().zip(it).fold(first, |running, (node, x)| node.apply(running, x))
    }

    /// Drops the `k` deepest features and the `k` aggregators that absorbed
    /// them. The surviving nodes keep their parameters.
    pub fn prune(&self, k: usize) -> Result<Self> {
        if k + 2 > self.features.len() {
            return Err(domain(format!(
                "cannot prune {k} of {} features; at least 2 must remain",
                self.features.len()
            )));
        }
        Ok(Self { features: self.features[k..].to_vec(), nodes: self.nodes[k..].to_vec() })
    }

    pub fn simplify(&self, code_merge: bool) -> SimplifiedTree<T> {
        SimplifiedTree::from_tree(self, code_merge)
    }

    pub fn to_expression(&self) -> Expression {
        Expression::from_tree(self)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    pub(crate) fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn mean_node() {
        let t = LspTree::from_params(names(2), &[(0.5, 0.5)]).unwrap();
        assert_abs_diff_eq!(t.evaluate(&[0.2, 0.6]).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn product_chain() {
        let t = LspTree::from_params(names(3), &[(0.5, 1.25), (0.5, 1.25)]).unwrap();
        assert_abs_diff_eq!(t.evaluate(&[0.9, 0.8, 0.5]).unwrap(), 0.36, epsilon = 1e-12);
    }

    #[test]
    fn full_weight_on_running_argument() {
        let t = LspTree::from_params(names(2), &[(1.0, 1.25)]).unwrap();
        assert_abs_diff_eq!(t.evaluate(&[0.7, 0.1]).unwrap(), 0.49, epsilon = 1e-12);
        let t = LspTree::from_params(names(2), &[(1.0, 1.6)]).unwrap();
        // 0.7^(2(√(3/0.4) − 1)), 40-digit reference.
        assert_abs_diff_eq!(t.evaluate(&[0.7, 0.1]).unwrap(), 0.289_314_994_794_906_4, epsilon = 1e-12);
    }

    #[test]
    fn shape_errors() {
        let t = LspTree::from_params(names(3), &[(0.5, 0.5), (0.5, 0.5)]).unwrap();
        assert!(matches!(t.evaluate(&[0.1, 0.2]), Err(Error::Shape { .. })));
        assert!(t.evaluate(&[0.1, 0.2, 1.5]).is_err());
        assert!(LspTree::from_params(names(3), &[(0.5, 0.5)]).is_err());
        assert!(LspTree::<f64>::from_params(names(1), &[]).is_err());
        assert!(LspTree::from_params(names(2), &[(0.5, 2.5)]).is_err());
    }

    #[test]
    fn balanced_layout_rejected() {
        let nodes = vec![Node::new(0.5, 0.5).unwrap()];
        let err = LspTree::<f64>::with_layout(names(2), nodes.clone(), TreeLayout::Balanced).unwrap_err();
        assert!(err.to_string().contains("balanced"));
        assert!(LspTree::with_layout(names(2), nodes, TreeLayout::Left).is_ok());
        assert_eq!("balanced".parse::<TreeLayout>().unwrap(), TreeLayout::Balanced);
        assert!("diagonal".parse::<TreeLayout>().is_err());
    }

    #[test]
    fn prune_keeps_top_of_chain() {
        let params: Vec<(f64, f64)> = (0..4).map(|i| (0.1 + 0.2 * i as f64, 0.3 * i as f64)).collect();
        let t = LspTree::from_params(names(5), &params).unwrap();
        assert_eq!(t.prune(0).unwrap(), t);
        let p = t.prune(3).unwrap();
        assert_eq!(p.features(), &["f4".to_string(), "f5".to_string()]);
        assert_eq!(p.nodes(), &t.nodes()[3..]);
        assert!(t.prune(4).is_err());
    }

    #[test]
    fn bound_evaluation_follows_names() {
        let t = LspTree::from_params(vec!["b".into(), "a".into()], &[(0.25, 0.5)]).unwrap();
        let cols = vec!["a".to_string(), "b".to_string()];
        let binding = t.bind(&cols).unwrap();
        assert_abs_diff_eq!(t.evaluate_bound(&[1.0, 0.0], &binding), 0.75, epsilon = 1e-15);
        assert!(t.bind(&["a".to_string()]).is_err());
    }

    pub(crate) fn arb_tree(max_n: usize, alpha: std::ops::RangeInclusive<f64>) -> impl Strategy<Value = LspTree<f64>> {
        (2..=max_n).prop_flat_map(move |n| {
            prop::collection::vec((0.0f64..=1.0, alpha.clone()), n - 1)
                .prop_map(move |p| LspTree::from_params(names(n), &p).unwrap())
        })
    }

    proptest! {
        #[test]
        fn monotone_on_conjunctive_trees(
            t in arb_tree(6, 0.5..=1.99),
            seed in prop::collection::vec(0.0f64..=1.0, 6),
            bump in 0.0f64..0.5,
            idx in 0usize..6,
        ) {
            let n = t.len();
            let sample: Vec<f64> = seed[..n].to_vec();
            let i = idx % n;
            let mut up = sample.clone();
            up[i] = (up[i] + bump).min(1.0);
            prop_assert!(t.evaluate(&sample).unwrap() <= t.evaluate(&up).unwrap() + 1e-12);
        }

        #[test]
        fn prune_composes(t in arb_tree(8, -1.0..=2.0), k in 0usize..4, j in 0usize..4) {
            prop_assume!(k + j + 2 <= t.len());
            prop_assert_eq!(t.prune(k).unwrap().prune(j).unwrap(), t.prune(k + j).unwrap());
        }
    }
}
