//! Plain L2-regularized logistic regression, written independently of the
//! plateau model so the two can be checked against each other.

use crate::data::Dataset;
use crate::error::{constraint, Result};
use crate::model::LinearModel;
use crate::numeric::{sigmoid, softplus};

/// `y s - log(1 + e^s)`
#[inline]
pub fn point_ll(y: u8, s: f64) -> f64 {
    f64::from(y) * s - softplus(s)
}

/// `y - sigmoid(s)`
#[inline]
pub fn point_dll(y: u8, s: f64) -> f64 {
    f64::from(y) - sigmoid(s)
}

pub fn lr_log_likelihood(data: &Dataset, model: &LinearModel, l2: f64) -> Result<f64> {
    if l2 < 0.0 {
        return Err(constraint("lambda must be non-negative"));
    }
    let s = model.scores(data)?;
    let mut ll = 0.0;
    for (i, si) in s.into_iter().enumerate() {
        ll += point_ll(data.label(i), si);
    }
    Ok(ll - 0.5 * l2 * model.weights.iter().map(|w| w * w).sum::<f64>())
}

pub fn lr_gradient(data: &Dataset, model: &LinearModel, l2: f64) -> Result<Vec<f64>> {
    let s = model.scores(data)?;
    let d = data.dim();
    let mut g = vec![0.0; d + 1];
    for (i, si) in s.into_iter().enumerate() {
        let r = point_dll(data.label(i), si);
        for (j, x) in data.dense_row(i).into_iter().enumerate() {
            g[j] += r * x;
        }
        g[d] += r;
    }
    for (gj, wj) in g.iter_mut().zip(&model.weights) {
        *gj -= l2 * wj;
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_gives_log_half() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0]], vec![1, 0]).unwrap();
        let ll = lr_log_likelihood(&d, &LinearModel::zeros(1), 1.0).unwrap();
        assert!((ll - 2.0 * 0.5f64.ln()).abs() < 1e-15);
        let g = lr_gradient(&d, &LinearModel::zeros(1), 0.0).unwrap();
        assert!((g[0] - (0.5 - 1.0)).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
    }
}
