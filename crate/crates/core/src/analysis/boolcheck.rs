use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::data::BoolExpr;
use crate::error::{Error, Result};
use crate::logic::{andness_to_code, AndnessCode};
use crate::scalar::Scalar;
use crate::tree::LspTree;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    /// Variable values in expression order.
    pub assignment: Vec<bool>,
    pub expected: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoolEquivalence {
    pub equivalent: bool,
    pub variables: Vec<String>,
    pub mismatches: Vec<Mismatch>,
    /// Tree leaves, deepest first, and the snapped code of every node.
    pub features: Vec<String>,
    pub operators: Vec<AndnessCode>,
}

/// Compares the thresholded tree with the expression on every 0/1 assignment.
pub fn bool_equivalence<T: Scalar>(tree: &LspTree<T>, expr: &BoolExpr, threshold: f64) -> Result<BoolEquivalence> {
    let variables = expr.variables();
    let vars: BTreeSet<&String> = variables.iter().collect();
    let leaves: BTreeSet<&String> = tree.features().iter().collect();
    if vars != leaves || tree.features().len() != variables.len() {
        return Err(Error::Domain(format!(
            "tree features {:?} do not match expression variables {:?}",
            tree.features(),
            variables
        )));
    }
    let binding = tree.bind(&variables)?;
    let t = T::of(threshold);
    let mut mismatches = Vec::new();
    for (bits, expected) in expr.truth_table()? {
        let row: Vec<T> = bits.iter().map(|&b| if b { T::one() } else { T::zero() }).collect();
        let score = tree.evaluate_bound(&row, &binding);
        if (score >= t) != expected {
            mismatches.push(Mismatch { assignment: bits, expected, score: score.to_f64_lossy() });
        }
    }
    Ok(BoolEquivalence {
        equivalent: mismatches.is_empty(),
        variables,
        mismatches,
        features: tree.features().to_vec(),
        operators: tree.nodes().iter().map(|n| andness_to_code(n.andness.value())).collect::<Result<_>>()?,
    })
}
