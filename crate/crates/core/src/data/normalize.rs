use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Dataset, RawTable};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerKind {
    #[default]
    Minmax,
    RobustSigmoid,
    /// Values are used as-is and must already lie in `[0, 1]`.
    None,
}

impl std::str::FromStr for NormalizerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "minmax" | "min_max" => Ok(Self::Minmax),
            "robust_sigmoid" | "sigmoid" => Ok(Self::RobustSigmoid),
            "none" | "identity" => Ok(Self::None),
            other => Err(Error::Config(format!("unknown normalizer `{other}`"))),
        }
    }
}

/// Fitted per-column transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnScaler {
    Minmax { min: f64, max: f64 },
    Sigmoid { median: f64, half_iqr: f64 },
    /// Column had a single value at fit time; always maps to 0.5.
    Constant { value: f64 },
    Identity,
}

impl ColumnScaler {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ColumnScaler::Minmax { min, max } => ((x - min) / (max - min)).clamp(0.0, 1.0),
            ColumnScaler::Sigmoid { median, half_iqr } => 1.0 / (1.0 + (-(x - median) / half_iqr).exp()),
            ColumnScaler::Constant { .. } => 0.5,
            ColumnScaler::Identity => x,
        }
    }
}

/// Fitted normalizer: one scaler per column plus the reversed columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizerSpec {
    pub kind: NormalizerKind,
    pub names: Vec<String>,
    pub columns: Vec<ColumnScaler>,
    #[serde(default)]
    pub reversed: Vec<String>,
}

impl NormalizerSpec {
    pub fn with_reversed<S: AsRef<str>>(mut self, columns: &[S]) -> Result<Self> {
        for c in columns {
            let c = c.as_ref();
            if !self.names.iter().any(|n| n == c) {
                return Err(Error::Dataset(format!("cannot reverse unknown column `{c}`")));
            }
            if !self.reversed.iter().any(|n| n == c) {
                self.reversed.push(c.to_string());
            }
        }
        Ok(self)
    }

    /// Normalizes a raw table (columns matched by name) into a dataset.
    pub fn apply<T: Scalar>(&self, table: &RawTable, labels: Vec<bool>) -> Result<Dataset<T>> {
        let idx = self
            .names
            .iter()
            .map(|n| {
                table
                    .names
                    .iter()
                    .position(|t| t == n)
                    .ok_or_else(|| Error::Dataset(format!("input lacks column `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rev: Vec<bool> = self.names.iter().map(|n| self.reversed.contains(n)).collect();
        let mut rows = Array2::<T>::zeros((table.len(), self.names.len()));
        for (i, raw) in table.rows.iter().enumerate() {
            for (j, scaler) in self.columns.iter().enumerate() {
                let mut v = scaler.apply(raw[idx[j]]);
                if self.kind == NormalizerKind::None && !(0.0..=1.0).contains(&v) {
                    return Err(Error::Dataset(format!(
                        "row {}, column `{}`: {v} outside [0, 1] and no normalizer selected",
                        i + 1,
                        self.names[j]
                    )));
                }
                if rev[j] {
                    v = 1.0 - v;
                }
                rows[[i, j]] = T::of(v);
            }
        }
        let mut provenance = format!("{} ({:?} normalization)", table.source, self.kind);
        if !self.reversed.is_empty() {
            provenance.push_str(&format!("; reversed [{}]", self.reversed.join(", ")));
        }
        Dataset::new(self.names.clone(), rows, labels, provenance)
    }

    pub fn constant_columns(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.columns)
            .filter(|(_, c)| matches!(c, ColumnScaler::Constant { .. }))
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

fn check_fit(table: &RawTable) -> Result<()> {
    if table.is_empty() {
        return Err(Error::Dataset("cannot fit a normalizer on an empty table".into()));
    }
    Ok(())
}

fn min_max(col: &[f64]) -> (f64, f64) {
    col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn constant(name: &str, value: f64) -> ColumnScaler {
    log::warn!("column `{name}` is constant ({value}); mapping it to 0.5");
    ColumnScaler::Constant { value }
}

/// `(x − min) / (max − min)`, clipped to `[0, 1]` for unseen data.
pub fn fit_minmax(table: &RawTable) -> Result<NormalizerSpec> {
    check_fit(table)?;
    let columns = (0..table.n_features())
        .map(|j| {
            let (lo, hi) = min_max(&table.column(j));
            if hi > lo {
                ColumnScaler::Minmax { min: lo, max: hi }
            } else {
                constant(&table.names[j], lo)
            }
        })
        .collect();
    Ok(NormalizerSpec { kind: NormalizerKind::Minmax, names: table.names.clone(), columns, reversed: vec![] })
}

/// Quantile with linear interpolation between order statistics.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Logistic squashing centred on the median with the interquartile half-range
/// as scale, so the quartiles land on `σ(±1)`. Columns with zero IQR fall back
/// to min-max.
pub fn fit_robust_sigmoid(table: &RawTable) -> Result<NormalizerSpec> {
    check_fit(table)?;
    let columns = (0..table.n_features())
        .map(|j| {
            let mut col = table.column(j);
            col.sort_by(f64::total_cmp);
            let median = quantile(&col, 0.5);
            let iqr = quantile(&col, 0.75) - quantile(&col, 0.25);
            let (lo, hi) = (col[0], col[col.len() - 1]);
            if iqr > 0.0 {
                ColumnScaler::Sigmoid { median, half_iqr: iqr / 2.0 }
            } else if hi > lo {
                log::warn!("column `{}` has zero IQR; using min-max instead", table.names[j]);
                ColumnScaler::Minmax { min: lo, max: hi }
            } else {
                constant(&table.names[j], lo)
            }
        })
        .collect();
    Ok(NormalizerSpec { kind: NormalizerKind::RobustSigmoid, names: table.names.clone(), columns, reversed: vec![] })
}

pub fn fit_none(table: &RawTable) -> NormalizerSpec {
    NormalizerSpec {
        kind: NormalizerKind::None,
        names: table.names.clone(),
        columns: vec![ColumnScaler::Identity; table.n_features()],
        reversed: vec![],
    }
}

impl NormalizerKind {
    pub fn fit(self, table: &RawTable) -> Result<NormalizerSpec> {
        match self {
            NormalizerKind::Minmax => fit_minmax(table),
            NormalizerKind::RobustSigmoid => fit_robust_sigmoid(table),
            NormalizerKind::None => Ok(fit_none(table)),
        }
    }
}
