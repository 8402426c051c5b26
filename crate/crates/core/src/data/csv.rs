use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// A missing token is a hard error.
    #[default]
    Error,
    /// Rows containing a missing token are skipped.
    DropRow,
}

/// Describes how a CSV table maps to a binary dataset. Stored next to the
/// data as `<stem>.manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvManifest {
    /// 0-based column holding the class label.
    pub label_column: usize,
    /// Label token mapped to class 1.
    pub positive_label: String,
    /// Label token mapped to class 0. When absent, exactly one other token is
    /// allowed.
    #[serde(default)]
    pub negative_label: Option<String>,
    #[serde(default)]
    pub missing_policy: MissingPolicy,
    #[serde(default)]
    pub header: bool,
}

impl CsvManifest {
    pub fn zero_one(label_column: usize) -> Self {
        Self {
            label_column,
            positive_label: "1".into(),
            negative_label: Some("0".into()),
            missing_policy: MissingPolicy::Error,
            header: false,
        }
    }
}

const MISSING_TOKENS: [&str; 4] = ["", "?", "NA", "NaN"];

fn same_label(token: &str, label: &str) -> bool {
    if token == label {
        return true;
    }
    match (token.parse::<f64>(), label.parse::<f64>()) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

/// Parses a numeric table with labels `0`/`1` in `label_column`.
pub fn parse_csv(text: &str, label_column: usize) -> Result<Dataset> {
    parse_csv_with(text, &CsvManifest::zero_one(label_column))
}

pub fn parse_csv_with(text: &str, manifest: &CsvManifest) -> Result<Dataset> {
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut width: Option<usize> = None;
    let mut negative: Option<String> = manifest.negative_label.clone();
    let perr = |line: usize, msg: String| Error::Parse { line, msg };

    'rows: for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        if manifest.header && lineno == 0 {
            continue;
        }
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(perr(
                    line_no,
                    format!("ragged row: {} columns, expected {w}", cells.len()),
                ))
            }
            _ => {}
        }
        if manifest.label_column >= cells.len() {
            return Err(perr(line_no, format!("no label column {}", manifest.label_column)));
        }
        if cells.iter().any(|c| MISSING_TOKENS.contains(c)) {
            match manifest.missing_policy {
                MissingPolicy::Error => {
                    return Err(perr(line_no, "missing value (no imputation)".into()))
                }
                MissingPolicy::DropRow => continue 'rows,
            }
        }
        let tok = cells[manifest.label_column];
        let y = if same_label(tok, &manifest.positive_label) {
            1
        } else {
            match &negative {
                Some(neg) if same_label(tok, neg) => 0,
                Some(_) => {
                    return Err(perr(line_no, format!("non-binary label '{tok}'")));
                }
                None => {
                    negative = Some(tok.to_string());
                    0
                }
            }
        };
        for (j, c) in cells.iter().enumerate() {
            if j == manifest.label_column {
                continue;
            }
            let v: f64 = c
                .parse()
                .map_err(|_| perr(line_no, format!("non-numeric cell '{c}' in column {j}")))?;
            if !v.is_finite() {
                return Err(perr(line_no, format!("non-finite cell '{c}'")));
            }
            values.push(v);
        }
        labels.push(y);
    }
    let dim = width.map_or(0, |w| w - 1);
    Dataset::dense(values, dim, labels)
}

/// Reads `path` and the manifest stored beside it as `<stem>.manifest.json`.
pub fn load_csv_with_manifest(path: &Path) -> Result<Dataset> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Data(format!("bad dataset path {}", path.display())))?;
    let manifest_path = path.with_file_name(format!("{stem}.manifest.json"));
    let manifest: CsvManifest = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
    let text = std::fs::read_to_string(path)?;
    parse_csv_with(&text, &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table() {
        let d = parse_csv("1.0,2.0,0\n3,4,1\n", 2).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 2);
        assert_eq!(d.labels(), &[0, 1]);
        assert_eq!(d.dense_row(1), vec![3.0, 4.0]);
    }

    #[test]
    fn breast_style_encoding() {
        let m = CsvManifest {
            label_column: 2,
            positive_label: "4".into(),
            negative_label: Some("2".into()),
            missing_policy: MissingPolicy::Error,
            header: false,
        };
        let d = parse_csv_with("5,1,2\n8,10,4\n", &m).unwrap();
        assert_eq!(d.labels(), &[0, 1]);
        assert!(parse_csv_with("5,1,3\n", &m).is_err());
    }

    #[test]
    fn missing_values_are_errors_unless_dropped() {
        let mut m = CsvManifest::zero_one(1);
        assert!(matches!(parse_csv_with("1,0\n?,1\n", &m), Err(Error::Parse { line: 2, .. })));
        m.missing_policy = MissingPolicy::DropRow;
        assert_eq!(parse_csv_with("1,0\n?,1\n", &m).unwrap().len(), 1);
    }

    #[test]
    fn ragged_and_non_binary_rejected() {
        assert!(parse_csv("1,2,0\n1,1\n", 2).is_err());
        assert!(parse_csv("1,2,0\n1,1,7\n", 2).is_err());
        let m = CsvManifest {
            negative_label: None,
            ..CsvManifest::zero_one(1)
        };
        assert!(parse_csv_with("1,1\n1,a\n1,b\n", &m).is_err());
        assert_eq!(parse_csv_with("1,1\n1,a\n1,a\n", &m).unwrap().class_counts(), (2, 1));
    }

    #[test]
    fn header_and_string_labels() {
        let m = CsvManifest {
            label_column: 0,
            positive_label: "tested_positive".into(),
            negative_label: Some("tested_negative".into()),
            missing_policy: MissingPolicy::Error,
            header: true,
        };
        let d = parse_csv_with("class,x\ntested_positive,1\ntested_negative,2\n", &m).unwrap();
        assert_eq!(d.labels(), &[1, 0]);
        assert_eq!(d.dense_row(1), vec![2.0]);
    }
}
