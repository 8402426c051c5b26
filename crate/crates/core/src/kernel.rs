//! Kernel Beta-Bernoulli model: `eta = gamma * sum_j a_j K(x, x_j)` over the
//! retained training inputs, with an RBF kernel.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Scaler};
use crate::error::{constraint, Error, Result};
use crate::hyper::BBHyper;
use crate::model::{label_of, PlateauLik};
use crate::prior::{MixturePrior, Prior};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-|x - x'|^2 / (2 sigma^2))`
    Rbf { sigma: f64 },
}

impl KernelSpec {
    pub fn rbf(sigma: f64) -> Result<Self> {
        let k = KernelSpec::Rbf { sigma };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { sigma } if sigma > 0.0 && sigma.is_finite() => Ok(()),
            KernelSpec::Rbf { sigma } => Err(constraint(format!("RBF bandwidth {sigma} must be positive"))),
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

/// Dense symmetric kernel matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Gram {
    n: usize,
    values: Vec<f64>,
}

impl Gram {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Sub-matrix over `idx` (rows and columns).
    pub fn select(&self, idx: &[usize]) -> Gram {
        let mut values = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            let r = self.row(i);
            values.extend(idx.iter().map(|&j| r[j]));
        }
        Gram { n: idx.len(), values }
    }

    /// Rows `rows` against columns `cols` (a cross-kernel block, row-major).
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            let r = self.row(i);
            out.extend(cols.iter().map(|&j| r[j]));
        }
        out
    }
}

fn dense_rows(data: &Dataset) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = (0..data.len()).map(|i| data.dense_row(i)).collect();
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite feature value".into()));
    }
    Ok(rows)
}

/// `G_ij = K(x_i, x_j)` over all rows of `data`.
pub fn gram(data: &Dataset, spec: &KernelSpec) -> Result<Gram> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::Data("gram matrix of an empty dataset".into()));
    }
    let rows = dense_rows(data)?;
    let n = rows.len();
    let fill_row = |i: usize, out: &mut [f64]| {
        for j in 0..n {
            out[j] = if i == j { 1.0 } else { spec.eval(&rows[i], &rows[j]) };
        }
    };
    let mut values = vec![0.0; n * n];
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        values
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, out)| fill_row(i, out));
    }
    #[cfg(not(feature = "parallel"))]
    values.chunks_mut(n).enumerate().for_each(|(i, out)| fill_row(i, out));
    // exact symmetry regardless of summation order
    for i in 0..n {
        for j in 0..i {
            values[i * n + j] = values[j * n + i];
        }
    }
    Ok(Gram { n, values })
}

/// Median Euclidean distance over distinct pairs of rows; the usual RBF
/// bandwidth scale.
pub fn median_pairwise_distance(data: &Dataset) -> f64 {
    let rows: Vec<Vec<f64>> = (0..data.len()).map(|i| data.dense_row(i)).collect();
    let mut d = Vec::with_capacity(rows.len() * rows.len().saturating_sub(1) / 2);
    for i in 0..rows.len() {
        for j in 0..i {
            let s: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            d.push(s.sqrt());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    let mid = d.len() / 2;
    let (_, m, _) = d.select_nth_unstable_by(mid, f64::total_cmp);
    if *m > 0.0 {
        *m
    } else {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub alphas: Vec<f64>,
    pub spec: KernelSpec,
    /// Retained training inputs, one row per coefficient.
    pub inputs: Vec<Vec<f64>>,
}

impl KernelModel {
    pub fn new(alphas: Vec<f64>, spec: KernelSpec, inputs: Vec<Vec<f64>>) -> Result<Self> {
        spec.validate()?;
        if alphas.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: inputs.len(),
                got: alphas.len(),
            });
        }
        Ok(Self { alphas, spec, inputs })
    }

    pub fn from_dataset(alphas: Vec<f64>, spec: KernelSpec, train: &Dataset) -> Result<Self> {
        Self::new(alphas, spec, dense_rows(train)?)
    }

    /// `k(x) = (K(x, x_1), ..., K(x, x_N))`.
    pub fn kernel_vector(&self, x: &[f64]) -> Vec<f64> {
        self.inputs.iter().map(|z| self.spec.eval(x, z)).collect()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.kernel_vector(x).iter().zip(&self.alphas).map(|(k, a)| k * a).sum()
    }

    pub fn predict_labels(&self, data: &Dataset) -> Vec<u8> {
        (0..data.len()).map(|i| label_of(self.score(&data.dense_row(i)))).collect()
    }
}

pub fn mu_kbb(model: &KernelModel, kvec: &[f64], hyper: &BBHyper) -> Result<f64> {
    if kvec.len() != model.alphas.len() {
        return Err(Error::DimensionMismatch {
            expected: model.alphas.len(),
            got: kvec.len(),
        });
    }
    let s: f64 = kvec.iter().zip(&model.alphas).map(|(k, a)| k * a).sum();
    Ok(PlateauLik::new(hyper).mu(s))
}

fn check_gram(g: &Gram, labels: &[u8], alphas: &[f64]) -> Result<()> {
    if g.n() != labels.len() || g.n() != alphas.len() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: alphas.len().min(labels.len()),
        });
    }
    Ok(())
}

fn gram_scores(g: &Gram, alphas: &[f64]) -> Vec<f64> {
    (0..g.n())
        .map(|i| g.row(i).iter().zip(alphas).map(|(k, a)| k * a).sum())
        .collect()
}

/// Log-likelihood of the training labels plus the log prior of the alphas.
pub fn kernel_log_likelihood(
    g: &Gram,
    labels: &[u8],
    alphas: &[f64],
    hyper: &BBHyper,
    prior: &Prior,
) -> Result<f64> {
    check_gram(g, labels, alphas)?;
    prior.validate()?;
    let lik = PlateauLik::new(hyper);
    let s = gram_scores(g, alphas);
    let ll: f64 = s.iter().zip(labels).map(|(&s, &y)| lik.ll(y, s)).sum();
    Ok(ll + alphas.iter().map(|&a| prior.coord(a)).sum::<f64>())
}

/// Gradient of [`kernel_log_likelihood`] in the alphas.
pub fn grad_alphas(
    g: &Gram,
    labels: &[u8],
    alphas: &[f64],
    hyper: &BBHyper,
    prior: &Prior,
) -> Result<Vec<f64>> {
    check_gram(g, labels, alphas)?;
    prior.validate()?;
    let lik = PlateauLik::new(hyper);
    let s = gram_scores(g, alphas);
    let mut out: Vec<f64> = alphas.iter().map(|&a| prior.coord_grad(a)).collect();
    for (i, (&si, &y)) in s.iter().zip(labels).enumerate() {
        let r = lik.dll(y, si);
        for (o, k) in out.iter_mut().zip(g.row(i)) {
            *o += r * k;
        }
    }
    Ok(out)
}

/// Number of coefficients with `|a_j| > tau * max |a|`.
pub fn support_count(alphas: &[f64], tau: f64) -> usize {
    let max = alphas.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if max == 0.0 {
        return 0;
    }
    alphas.iter().filter(|a| a.abs() > tau * max).count()
}

pub const DEFAULT_SUPPORT_TAU: f64 = 1e-4;

/// Names the rows of a dataset file the model was trained on, so the inputs
/// are not duplicated in the model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainInputsRef {
    pub dataset: String,
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedKernelModel {
    pub alphas: Vec<f64>,
    pub spec: KernelSpec,
    pub train_inputs_ref: TrainInputsRef,
    pub hyper: BBHyper,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixture_prior: Option<MixturePrior>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rbf_values() {
        let k = KernelSpec::rbf(1.5).unwrap();
        assert_eq!(k.eval(&[1.0, 2.0], &[1.0, 2.0]), 1.0);
        let d = 1.5 * 2f64.sqrt();
        assert!((k.eval(&[0.0], &[d]) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(KernelSpec::rbf(0.0).is_err());
    }

    #[test]
    fn gram_is_symmetric_with_unit_diagonal() {
        let d = Dataset::from_rows(&[vec![0.0, 1.0], vec![2.0, -1.0], vec![0.5, 0.5]], vec![0, 1, 0]).unwrap();
        let g = gram(&d, &KernelSpec::rbf(1.0).unwrap()).unwrap();
        for i in 0..3 {
            assert_eq!(g.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(g.get(i, j), g.get(j, i));
                assert!(g.get(i, j) > 0.0 && g.get(i, j) <= 1.0);
            }
        }
        let s = g.select(&[2, 0]);
        assert_eq!(s.get(0, 1), g.get(2, 0));
    }

    #[test]
    fn support_counting() {
        assert_eq!(support_count(&[0.0, 0.0, 0.0], 1e-4), 0);
        assert_eq!(support_count(&[1.0, 1e-9, -2.0], 1e-4), 2);
    }

    #[test]
    fn zero_alphas_give_midpoint() {
        let m = KernelModel::new(vec![0.0; 2], KernelSpec::rbf(1.0).unwrap(), vec![vec![0.0], vec![1.0]]).unwrap();
        let h = BBHyper::new(2.0, 1.0, 10.0, 3.0).unwrap();
        let mu = mu_kbb(&m, &m.kernel_vector(&[0.3]), &h).unwrap();
        assert!((mu - (h.a() + h.b() / 2.0)).abs() < 1e-15);
        assert!(mu_kbb(&m, &[1.0], &h).is_err());
    }

    #[test]
    fn single_point_gradient() {
        let g = Gram::from_values(1, vec![1.0]).unwrap();
        let h = BBHyper::new(1.0, 1.0, 10.0, 2.0).unwrap();
        let grad = grad_alphas(&g, &[1], &[0.0], &h, &Prior::None).unwrap();
        let mu = h.a() + h.b() * 0.5;
        assert!((grad[0] - 2.0 * h.b() / mu * 0.25).abs() < 1e-14);
    }
}
