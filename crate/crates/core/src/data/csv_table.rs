use std::path::Path;

use crate::error::{Error, Result};

/// Which CSV column holds the label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    #[default]
    Last,
    Index(usize),
    Name(String),
}

impl LabelColumn {
    fn resolve(&self, header: &[String], width: usize) -> Result<usize> {
        match self {
            LabelColumn::Last if width > 0 => Ok(width - 1),
            LabelColumn::Last => Err(Error::Dataset("table has no columns".into())),
            LabelColumn::Index(i) if *i < width => Ok(*i),
            LabelColumn::Index(i) => Err(Error::Dataset(format!("label column index {i} out of range ({width} columns)"))),
            LabelColumn::Name(name) => header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Dataset(format!("unknown label column `{name}`"))),
        }
    }
}

/// Numeric table before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<f64>,
    pub source: String,
}

impl RawTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            names: self.names.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            source: self.source.clone(),
        }
    }

    /// Binary labels. With `positive`, rows whose label equals it are
    /// positive (one-vs-rest); otherwise labels must already be 0 or 1.
    pub fn binary_labels(&self, positive: Option<f64>) -> Result<Vec<bool>> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| match positive {
                Some(p) => Ok(l == p),
                None if l == 0.0 => Ok(false),
                None if l == 1.0 => Ok(true),
                None => Err(Error::Dataset(format!(
                    "row {}: label {l} is not binary; choose a positive class",
                    i + 1
                ))),
            })
            .collect()
    }
}

/// Reads a comma-separated numeric table. Every non-label cell must parse as
/// a decimal number.
pub fn load_csv(path: impl AsRef<Path>, label_column: &LabelColumn, has_header: bool) -> Result<RawTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, label_column, has_header, &path.display().to_string())
}

pub(crate) fn parse_csv(text: &str, label_column: &LabelColumn, has_header: bool, source: &str) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let mut header: Option<Vec<String>> = None;
    if has_header {
        match records.next() {
            Some(rec) => header = Some(rec?.iter().map(str::to_string).collect()),
            None => return Err(Error::Dataset(format!("{source}: file is empty"))),
        }
    }

    let mut cells: Vec<Vec<f64>> = Vec::new();
    let mut width = header.as_ref().map(Vec::len);
    for rec in records {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::Parse(format!("{source}: line {line}: expected {w} fields, found {}", rec.len())));
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Parse(format!("{source}: line {line}, column {}: `{c}` is not a number", j + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(Error::Dataset(format!("{source}: no data rows")));
    }
    let width = width.expect("at least one row");
    let header = header.unwrap_or_else(|| (1..=width).map(|i| format!("x{i}")).collect());
    let label = label_column.resolve(&header, width)?;

    let names = header.iter().enumerate().filter(|(j, _)| *j != label).map(|(_, h)| h.clone()).collect();
    let labels = cells.iter().map(|r| r[label]).collect();
    let rows = cells
        .into_iter()
        .map(|r| r.into_iter().enumerate().filter(|(j, _)| *j != label).map(|(_, v)| v).collect())
        .collect();
    Ok(RawTable { names, rows, labels, source: source.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_label() {
        let t = parse_csv("a,b,y\n1,2,0\n3,4.5,1\n", &LabelColumn::Name("y".into()), true, "mem").unwrap();
        assert_eq!(t.names, vec!["a", "b"]);
        assert_eq!(t.rows, vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        assert_eq!(t.binary_labels(None).unwrap(), vec![false, true]);
    }

    #[test]
    fn label_by_index_and_headerless() {
        let t = parse_csv("1,0,2\n1,1,3\n", &LabelColumn::Index(1), false, "mem").unwrap();
        assert_eq!(t.names, vec!["x1", "x3"]);
        assert_eq!(t.labels, vec![0.0, 1.0]);
    }

    #[test]
    fn header_only_is_empty_dataset() {
        let err = parse_csv("a,b,y\n", &LabelColumn::Last, true, "mem").unwrap_err();
        assert!(matches!(err, Error::Dataset(_)));
    }

    #[test]
    fn wrong_arity_names_line() {
        let err = parse_csv("a,b,y\n1,2,0\n1,2\n", &LabelColumn::Last, true, "mem").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn non_numeric_cell_rejected() {
        let err = parse_csv("a,y\nfoo,1\n", &LabelColumn::Last, true, "mem").unwrap_err();
        assert!(err.to_string().contains("`foo`"));
    }

    #[test]
    fn unknown_label_column() {
        assert!(parse_csv("a,y\n1,1\n", &LabelColumn::Name("z".into()), true, "mem").is_err());
    }

    #[test]
    fn missing_file() {
        assert!(matches!(load_csv("/nonexistent/x.csv", &LabelColumn::Last, true), Err(Error::Io(_))));
    }

    #[test]
    fn one_vs_rest_labels() {
        let t = parse_csv("a,y\n1,0\n2,1\n3,2\n", &LabelColumn::Last, true, "mem").unwrap();
        assert!(t.binary_labels(None).is_err());
        assert_eq!(t.binary_labels(Some(2.0)).unwrap(), vec![false, false, true]);
    }
}
