use std::fmt;

use crate::scalar::Scalar;

use super::LspTree;

/// Straight-line arithmetic program equivalent to a tree.
///
/// Inputs are named `x1..xn` in tree order (deepest first), intermediate
/// aggregators `n1, n2, …`, and the final line assigns `y`. Only `+ - * /`,
/// `pow(base, exp)` and `floor(v)` (drastic operators only) appear, so the
/// text runs as-is in Python with `from math import floor`, or in C.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expression {
    /// `# xi = feature` legend lines.
    pub legend: Vec<String>,
    /// `(target, expression)` assignments in evaluation order.
    pub assignments: Vec<(String, String)>,
}

impl Expression {
    pub fn from_tree<T: Scalar>(tree: &LspTree<T>) -> Self {
        let legend = tree.features().iter().enumerate().map(|(i, f)| format!("# x{} = {f}", i + 1)).collect();
        let last = tree.nodes().len() - 1;
        let mut assignments = Vec::with_capacity(tree.nodes().len());
        let mut running = "x1".to_string();
        for (k, node) in tree.nodes().iter().enumerate() {
            let newcomer = format!("x{}", k + 2);
            let rhs = node_expression(
                &running,
                &newcomer,
                node.weight.value().to_f64_lossy(),
                node.andness.value().to_f64_lossy(),
            );
            let target = if k == last { "y".to_string() } else { format!("n{}", k + 1) };
            assignments.push((target.clone(), rhs));
            running = target;
        }
        Self { legend, assignments }
    }

    /// Right-hand side of the final assignment.
    pub fn output(&self) -> &str {
        &self.assignments.last().expect("trees have at least one node").1
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.legend {
            writeln!(f, "{line}")?;
        }
        for (target, rhs) in &self.assignments {
            writeln!(f, "{target} = {rhs}")?;
        }
        Ok(())
    }
}

fn num(v: f64) -> String {
    let s = format!("{v}");
    if v < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

fn node_expression(left: &str, right: &str, w: f64, alpha: f64) -> String {
    if alpha < 0.5 {
        let l = format!("(1 - {left})");
        let r = format!("(1 - {right})");
        return format!("1 - ({})", conjunctive_expression(&l, &r, w, 1.0 - alpha));
    }
    conjunctive_expression(left, right, w, alpha)
}

fn conjunctive_expression(left: &str, right: &str, w: f64, alpha: f64) -> String {
    if alpha >= 2.0 {
        return format!("floor({left}*{right})");
    }
    let mean = mean_expression(left, right, w);
    if alpha == 0.5 {
        return mean;
    }
    let e = (3.0 / (2.0 - alpha)).sqrt() - 1.0;
    let geo = geometric_expression(left, right, w, e);
    if alpha >= 0.75 {
        return geo;
    }
    format!("{}*({mean}) + {}*({geo})", num(3.0 - 4.0 * alpha), num(4.0 * alpha - 2.0))
}

fn mean_expression(left: &str, right: &str, w: f64) -> String {
    let wr = 1.0 - w;
    match (w == 0.0, wr == 0.0) {
        (true, _) => right.to_string(),
        (_, true) => left.to_string(),
        _ => format!("{}*{left} + {}*{right}", num(w), num(wr)),
    }
}

fn power(base: &str, exponent: f64) -> Option<String> {
    if exponent == 0.0 {
        None
    } else if (exponent - 1.0).abs() < 1e-12 {
        Some(base.to_string())
    } else {
        Some(format!("pow({base}, {})", num(exponent)))
    }
}

fn geometric_expression(left: &str, right: &str, w: f64, e: f64) -> String {
    let factors: Vec<String> =
        [power(left, 2.0 * w * e), power(right, 2.0 * (1.0 - w) * e)].into_iter().flatten().collect();
    if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    }
}
