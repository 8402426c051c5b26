use serde::{Deserialize, Serialize};

use super::{Dataset, Features};
use crate::error::{Error, Result};

const STD_FLOOR: f64 = 1e-12;

/// Per-feature z-score transform fitted on training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Population mean and standard deviation of each feature.
    pub fn fit(data: &Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Data("cannot fit a scaler on empty data".into()));
        }
        let d = data.dim();
        let n = data.len() as f64;
        let mut mean = vec![0.0; d];
        for i in 0..data.len() {
            data.for_each_in_row(i, |j, v| mean[j] += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        let mut stored = vec![0usize; d];
        for i in 0..data.len() {
            data.for_each_in_row(i, |j, v| {
                var[j] += (v - mean[j]).powi(2);
                stored[j] += 1;
            });
        }
        // implicit zeros of sparse rows
        for j in 0..d {
            var[j] += (data.len() - stored[j]) as f64 * mean[j] * mean[j];
        }
        let std = var.iter().map(|v| (v / n).sqrt()).collect();
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Maps one raw feature vector. Constant features map to 0.
    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| if *s < STD_FLOOR { 0.0 } else { (v - m) / s })
            .collect()
    }

    /// Returns a standardized dense copy. Sparse input becomes dense.
    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        if data.is_standardized() {
            return Err(Error::Data("dataset is already standardized".into()));
        }
        if data.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: data.dim(),
            });
        }
        let mut values = Vec::with_capacity(data.len() * self.dim());
        for i in 0..data.len() {
            values.extend(self.transform_row(&data.dense_row(i)));
        }
        let mut out = data.clone();
        *out.features_mut() = Features::Dense {
            values,
            dim: self.dim(),
        };
        out.mark_standardized();
        Ok(out)
    }
}

/// Fits a scaler on `train` and applies it to both sets.
pub fn standardize(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset, Scaler)> {
    let s = Scaler::fit(train)?;
    Ok((s.transform(train)?, s.transform(test)?, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mean_unit_variance() {
        let d = Dataset::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]], vec![0, 1, 0])
            .unwrap();
        let s = Scaler::fit(&d).unwrap();
        let t = s.transform(&d).unwrap();
        let col: Vec<f64> = (0..3).map(|i| t.dense_row(i)[0]).collect();
        assert!(col.iter().sum::<f64>().abs() < 1e-12);
        assert!((col.iter().map(|v| v * v).sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
        assert!((0..3).all(|i| t.dense_row(i)[1] == 0.0));
        assert!(s.transform(&t).is_err());
    }

    #[test]
    fn sparse_matches_dense() {
        let dense = Dataset::from_rows(&[vec![0.0, 2.0], vec![4.0, 0.0], vec![0.0, 0.0]], vec![0, 1, 1])
            .unwrap();
        let sparse = Dataset::sparse(vec![vec![(1, 2.0)], vec![(0, 4.0)], vec![]], 2, vec![0, 1, 1])
            .unwrap();
        let a = Scaler::fit(&dense).unwrap();
        let b = Scaler::fit(&sparse).unwrap();
        for j in 0..2 {
            assert!((a.mean[j] - b.mean[j]).abs() < 1e-15);
            assert!((a.std[j] - b.std[j]).abs() < 1e-15);
        }
    }
}
