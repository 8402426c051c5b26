//! Datasets, file formats, preprocessing and resampling.

mod csv;
mod libsvm;
mod noise;
mod scale;
mod split;

pub use self::csv::{load_csv_with_manifest, parse_csv, CsvManifest, MissingPolicy};
pub use self::libsvm::{parse_libsvm, parse_libsvm_with_dim, write_libsvm};
pub use self::noise::inject_label_noise;
pub use self::scale::{standardize, Scaler};
pub use self::split::{make_splits, Fold, SplitPlan, SplitScheme};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Feature storage. Sparse rows hold `(index, value)` pairs with 0-based,
/// strictly ascending indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Features {
    Dense { values: Vec<f64>, dim: usize },
    Sparse { rows: Vec<Vec<(u32, f64)>>, dim: usize },
}

/// Labeled binary classification data with labels in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    features: Features,
    labels: Vec<u8>,
    /// Set once a [`Scaler`] has been applied.
    standardized: bool,
}

impl Dataset {
    pub fn dense(values: Vec<f64>, dim: usize, labels: Vec<u8>) -> Result<Self> {
        if dim == 0 && !values.is_empty() {
            return Err(Error::Data("dense data with zero dimension".into()));
        }
        if values.len() != dim * labels.len() {
            return Err(Error::Data(format!(
                "{} values do not form {} rows of dimension {dim}",
                values.len(),
                labels.len()
            )));
        }
        Self::check_labels(&labels)?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        Ok(Self {
            features: Features::Dense { values, dim },
            labels,
            standardized: false,
        })
    }

    /// Builds a dataset from row vectors of equal length.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<u8>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::Data("row and label counts differ".into()));
        }
        let mut values = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::dense(values, dim, labels)
    }

    pub fn sparse(rows: Vec<Vec<(u32, f64)>>, dim: usize, labels: Vec<u8>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Data("row and label counts differ".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            let mut prev: Option<u32> = None;
            for &(j, v) in row {
                if j as usize >= dim {
                    return Err(Error::Data(format!("row {i}: index {j} >= dim {dim}")));
                }
                if prev.is_some_and(|p| j <= p) {
                    return Err(Error::Data(format!("row {i}: indices not ascending")));
                }
                if !v.is_finite() {
                    return Err(Error::Data(format!("row {i}: non-finite value")));
                }
                prev = Some(j);
            }
        }
        Self::check_labels(&labels)?;
        Ok(Self {
            features: Features::Sparse { rows, dim },
            labels,
            standardized: false,
        })
    }

    fn check_labels(labels: &[u8]) -> Result<()> {
        match labels.iter().find(|&&y| y > 1) {
            Some(y) => Err(Error::Data(format!("label {y} is not binary"))),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        match &self.features {
            Features::Dense { dim, .. } | Features::Sparse { dim, .. } => *dim,
        }
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    /// Label in the `{-1, +1}` margin encoding.
    pub fn target(&self, i: usize) -> f64 {
        if self.labels[i] == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_standardized(&self) -> bool {
        self.standardized
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.features, Features::Sparse { .. })
    }

    /// `(negatives, positives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        (self.len() - pos, pos)
    }

    pub fn require_both_classes(&self) -> Result<()> {
        let (neg, pos) = self.class_counts();
        if neg == 0 || pos == 0 {
            return Err(Error::Data(format!(
                "training data needs both classes (negatives {neg}, positives {pos})"
            )));
        }
        Ok(())
    }

    /// Dot product of row `i` with `w[..dim]`.
    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        match &self.features {
            Features::Dense { values, dim } => values[i * dim..(i + 1) * dim]
                .iter()
                .zip(w)
                .map(|(x, w)| x * w)
                .sum(),
            Features::Sparse { rows, .. } => {
                rows[i].iter().map(|&(j, v)| v * w[j as usize]).sum()
            }
        }
    }

    /// Calls `f(j, x_ij)` for every stored entry of row `i`.
    pub fn for_each_in_row(&self, i: usize, mut f: impl FnMut(usize, f64)) {
        match &self.features {
            Features::Dense { values, dim } => {
                for (j, &v) in values[i * dim..(i + 1) * dim].iter().enumerate() {
                    f(j, v);
                }
            }
            Features::Sparse { rows, .. } => {
                for &(j, v) in &rows[i] {
                    f(j as usize, v);
                }
            }
        }
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.for_each_in_row(i, |j, v| out[j] = v);
        out
    }

    /// Row-major dense copy of all features.
    pub fn to_dense_values(&self) -> Vec<f64> {
        match &self.features {
            Features::Dense { values, .. } => values.clone(),
            Features::Sparse { .. } => (0..self.len()).flat_map(|i| self.dense_row(i)).collect(),
        }
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        let features = match &self.features {
            Features::Dense { values, dim } => {
                let mut out = Vec::with_capacity(idx.len() * dim);
                for &i in idx {
                    out.extend_from_slice(&values[i * dim..(i + 1) * dim]);
                }
                Features::Dense {
                    values: out,
                    dim: *dim,
                }
            }
            Features::Sparse { rows, dim } => Features::Sparse {
                rows: idx.iter().map(|&i| rows[i].clone()).collect(),
                dim: *dim,
            },
        };
        Dataset {
            features,
            labels,
            standardized: self.standardized,
        }
    }

    /// Copy with the given labels replacing the current ones.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Dataset> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        Self::check_labels(&labels)?;
        Ok(Dataset {
            features: self.features.clone(),
            labels,
            standardized: self.standardized,
        })
    }

    pub(crate) fn features_mut(&mut self) -> &mut Features {
        &mut self.features
    }

    pub(crate) fn mark_standardized(&mut self) {
        self.standardized = true;
    }
}

/// Environment variable naming the directory searched for named datasets.
pub const DATA_DIR_ENV: &str = "BBLR_DATA_DIR";

/// Resolves a dataset argument: an existing path is used as is, otherwise the
/// name is looked up as `<dir>/<name>.csv` (with its manifest) or
/// `<dir>/<name>.libsvm`.
pub fn resolve_dataset(name_or_path: &str, data_dir: Option<&Path>) -> Result<PathBuf> {
    let direct = PathBuf::from(name_or_path);
    if direct.is_file() {
        return Ok(direct);
    }
    let dir = match data_dir {
        Some(d) => d.to_path_buf(),
        None => std::env::var_os(DATA_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("data/uci")),
    };
    for ext in ["csv", "libsvm"] {
        let p = dir.join(format!("{name_or_path}.{ext}"));
        if p.is_file() {
            return Ok(p);
        }
    }
    Err(Error::Data(format!(
        "dataset '{name_or_path}' not found (searched {})",
        dir.display()
    )))
}

/// Loads a dataset file: `.libsvm`/`.svm`/`.txt` as sparse text, anything else
/// as CSV with a sibling `<stem>.manifest.json`.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if matches!(ext, "libsvm" | "svm" | "txt") {
        let text = std::fs::read_to_string(path)?;
        parse_libsvm(&text)
    } else {
        load_csv_with_manifest(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_rows_agree() {
        let d = Dataset::from_rows(&[vec![0.5, 0.0, 2.0], vec![0.0, 0.0, 0.0]], vec![1, 0]).unwrap();
        let s = Dataset::sparse(vec![vec![(0, 0.5), (2, 2.0)], vec![]], 3, vec![1, 0]).unwrap();
        let w = [1.0, 2.0, 3.0];
        for i in 0..2 {
            assert_eq!(d.row_dot(i, &w), s.row_dot(i, &w));
            assert_eq!(d.dense_row(i), s.dense_row(i));
        }
        assert_eq!(d.to_dense_values(), s.to_dense_values());
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Dataset::sparse(vec![vec![(3, 1.0)]], 3, vec![1]).is_err());
        assert!(Dataset::sparse(vec![vec![(1, 1.0), (1, 2.0)]], 3, vec![1]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], vec![2]).is_err());
        assert!(Dataset::from_rows(&[vec![f64::NAN]], vec![1]).is_err());
        let one_class = Dataset::from_rows(&[vec![1.0], vec![2.0]], vec![1, 1]).unwrap();
        assert!(one_class.require_both_classes().is_err());
    }

    #[test]
    fn subset_keeps_rows() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 0]).unwrap();
        let s = d.subset(&[2, 1]);
        assert_eq!(s.dense_row(0), vec![3.0]);
        assert_eq!(s.labels(), &[0, 1]);
    }
}
