//! Dataset ingestion and preparation: CSV loading, normalization of raw
//! measurements into degrees of truth, feature reversal, stratified splits,
//! and synthetic Boolean truth-table datasets.

mod boolean;
mod csv_table;
mod normalize;
mod split;

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use boolean::{boolean_dataset, BoolExpr};
pub use csv_table::{load_csv, LabelColumn, RawTable};
pub use normalize::{fit_minmax, fit_none, fit_robust_sigmoid, ColumnScaler, NormalizerKind, NormalizerSpec};
pub use split::{split, stratified_split};

/// How a raw table becomes train/test datasets.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Preparation {
    pub normalizer: NormalizerKind,
    /// Columns mapped through `x ↦ 1 − x` after normalization.
    pub reversed: Vec<String>,
    pub test_fraction: f64,
}

impl Default for Preparation {
    fn default() -> Self {
        Self { normalizer: NormalizerKind::Minmax, reversed: Vec::new(), test_fraction: 0.2 }
    }
}

/// A prepared split plus the normalizer fitted on its training side.
#[derive(Debug, Clone)]
pub struct Prepared<T> {
    pub normalizer: NormalizerSpec,
    pub train: Dataset<T>,
    pub test: Dataset<T>,
}

impl Preparation {
    /// Stratified split by `seed`, normalizer fitted on the training rows
    /// only, then applied to both sides.
    pub fn prepare<T: Scalar>(&self, table: &RawTable, labels: &[bool], seed: u64) -> Result<Prepared<T>> {
        if labels.len() != table.len() {
            return Err(Error::Shape { expected: table.len(), got: labels.len() });
        }
        let (tr, te) = stratified_split(labels, self.test_fraction, seed)?;
        let pick = |idx: &[usize]| idx.iter().map(|&i| labels[i]).collect::<Vec<_>>();
        let raw_train = table.subset(&tr);
        let normalizer = self.normalizer.fit(&raw_train)?.with_reversed(&self.reversed)?;
        let train = normalizer.apply(&raw_train, pick(&tr))?;
        let test = normalizer.apply(&table.subset(&te), pick(&te))?;
        Ok(Prepared { normalizer, train, test })
    }
}

/// Features normalized to `[0, 1]` plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    names: Vec<String>,
    rows: Array2<T>,
    labels: Vec<bool>,
    provenance: String,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(names: Vec<String>, rows: Array2<T>, labels: Vec<bool>, provenance: impl Into<String>) -> Result<Self> {
        if rows.ncols() != names.len() {
            return Err(Error::Shape { expected: names.len(), got: rows.ncols() });
        }
        if rows.nrows() != labels.len() {
            return Err(Error::Shape { expected: rows.nrows(), got: labels.len() });
        }
        if let Some(v) = rows.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::Dataset(format!("cell value {v} outside [0, 1]")));
        }
        Ok(Self { names, rows, labels, provenance: provenance.into() })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rows(&self) -> &Array2<T> {
        &self.rows
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::Dataset(format!("unknown column `{name}`")))
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            names: self.names.clone(),
            rows: self.rows.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// `x ↦ 1 − x` on the named columns.
    pub fn reverse_features<S: AsRef<str>>(&self, columns: &[S]) -> Result<Self> {
        let mut out = self.clone();
        for c in columns {
            let j = self.column_index(c.as_ref())?;
            out.rows.column_mut(j).mapv_inplace(|v| T::one() - v);
        }
        if !columns.is_empty() {
            let list: Vec<&str> = columns.iter().map(AsRef::as_ref).collect();
            out.provenance = format!("{}; reversed [{}]", self.provenance, list.join(", "));
        }
        Ok(out)
    }

    /// Keeps only the named columns, in the given order.
    pub fn select_columns<S: AsRef<str>>(&self, columns: &[S]) -> Result<Self> {
        let idx = columns.iter().map(|c| self.column_index(c.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            names: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: self.rows.select(Axis(1), &idx),
            labels: self.labels.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Labels as `0.0` / `1.0`.
    pub fn targets(&self) -> Vec<T> {
        self.labels.iter().map(|&l| if l { T::one() } else { T::zero() }).collect()
    }
}
