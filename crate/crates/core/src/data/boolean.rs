use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_VARS: usize = 16;

/// Boolean formula over named variables.
///
/// Text form: variables are identifiers, operators are `and`/`or`/`not`
/// (case-insensitive) or `∧`/`∨`/`¬` or `&`/`|`/`!`. Every group mixes at
/// most one binary operator, so `((A or B) and C)` is accepted and
/// `(A or B and C)` is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Var(String),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    And,
    Or,
    Not,
    Ident(String),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(Tok::Open);
            }
            ')' => {
                chars.next();
                out.push(Tok::Close);
            }
            '∧' | '&' => {
                chars.next();
                out.push(Tok::And);
            }
            '∨' | '|' => {
                chars.next();
                out.push(Tok::Or);
            }
            '¬' | '!' | '~' => {
                chars.next();
                out.push(Tok::Not);
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push(match word.to_ascii_lowercase().as_str() {
                    "and" => Tok::And,
                    "or" => Tok::Or,
                    "not" => Tok::Not,
                    _ => Tok::Ident(word),
                });
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}` at offset {i}"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    // group := unary (op unary)*   with a single op kind
    fn group(&mut self) -> Result<BoolExpr> {
        let mut items = vec![self.unary()?];
        let mut op: Option<Tok> = None;
        while let Some(t @ (Tok::And | Tok::Or)) = self.peek().cloned() {
            match &op {
                Some(o) if *o != t => {
                    return Err(Error::Parse("mixed `and`/`or` in one group; add parentheses".into()))
                }
                _ => op = Some(t),
            }
            self.bump();
            items.push(self.unary()?);
        }
        Ok(match op {
            None => items.pop().expect("one item"),
            Some(Tok::And) => BoolExpr::And(items),
            Some(_) => BoolExpr::Or(items),
        })
    }

    fn unary(&mut self) -> Result<BoolExpr> {
        match self.bump() {
            Some(Tok::Not) => Ok(BoolExpr::Not(Box::new(self.unary()?))),
            Some(Tok::Ident(name)) => Ok(BoolExpr::Var(name)),
            Some(Tok::Open) => {
                let inner = self.group()?;
                match self.bump() {
                    Some(Tok::Close) => Ok(inner),
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

impl FromStr for BoolExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { toks: lex(s)?, pos: 0 };
        let e = p.group()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input after token {}", p.pos)));
        }
        Ok(e)
    }
}

impl BoolExpr {
    /// Distinct variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        fn walk(e: &BoolExpr, out: &mut Vec<String>) {
            match e {
                BoolExpr::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                BoolExpr::Not(inner) => walk(inner, out),
                BoolExpr::And(xs) | BoolExpr::Or(xs) => xs.iter().for_each(|x| walk(x, out)),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Evaluates with `lookup` supplying each variable's value.
    pub fn eval_with(&self, lookup: &dyn Fn(&str) -> bool) -> bool {
        match self {
            BoolExpr::Var(v) => lookup(v),
            BoolExpr::Not(e) => !e.eval_with(lookup),
            BoolExpr::And(xs) => xs.iter().all(|x| x.eval_with(lookup)),
            BoolExpr::Or(xs) => xs.iter().any(|x| x.eval_with(lookup)),
        }
    }

    /// Evaluates with values in [`variables`](Self::variables) order.
    pub fn eval(&self, values: &[bool]) -> bool {
        let vars = self.variables();
        self.eval_with(&|name| vars.iter().position(|v| v == name).map(|i| values[i]).unwrap_or(false))
    }

    /// Truth table in enumeration order: row `m` assigns variable `j` the bit
    /// `k − 1 − j` of `m`, so the first variable is the most significant.
    pub fn truth_table(&self) -> Result<Vec<(Vec<bool>, bool)>> {
        let k = self.variables().len();
        if k > MAX_VARS {
            return Err(Error::Domain(format!("{k} variables exceed the limit of {MAX_VARS}")));
        }
        Ok((0..1usize << k)
            .map(|m| {
                let bits: Vec<bool> = (0..k).map(|j| (m >> (k - 1 - j)) & 1 == 1).collect();
                let y = self.eval(&bits);
                (bits, y)
            })
            .collect())
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Var(v) => f.write_str(v),
            BoolExpr::Not(e) => write!(f, "not {e}"),
            BoolExpr::And(xs) | BoolExpr::Or(xs) => {
                let op = if matches!(self, BoolExpr::And(_)) { " and " } else { " or " };
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Truth table of `expr` repeated `repeats` times: `2^k · repeats` rows of 0/1
/// features labelled with the expression value.
pub fn boolean_dataset<T: Scalar>(expr: &BoolExpr, repeats: usize) -> Result<Dataset<T>> {
    if repeats == 0 {
        return Err(Error::Domain("repeats must be at least 1".into()));
    }
    let table = expr.truth_table()?;
    let names = expr.variables();
    let k = names.len();
    let n = table.len() * repeats;
    let mut rows = Array2::<T>::zeros((n, k));
    let mut labels = Vec::with_capacity(n);
    for r in 0..repeats {
        for (m, (bits, y)) in table.iter().enumerate() {
            let i = r * table.len() + m;
            for (j, &b) in bits.iter().enumerate() {
                if b {
                    rows[[i, j]] = T::one();
                }
            }
            labels.push(*y);
        }
    }
    Dataset::new(names, rows, labels, format!("truth table of {expr} x{repeats}"))
}
