//! The linear Beta-Bernoulli model: `mu = w theta_B + (1 - w) sigmoid(gamma w'x)`
//! over features augmented with a constant 1 (the last weight is the bias).

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Scaler};
use crate::error::{constraint, Error, Result};
use crate::hyper::BBHyper;
use crate::numeric::{log_plateau, log_plateau_slope, sigmoid, sigmoid_slope};

/// Per-example log-likelihood of the plateau model as a function of the raw
/// score `s = w'x`. Shared by the linear and kernel models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlateauLik {
    pub a: f64,
    pub a_neg: f64,
    pub b: f64,
    pub gamma: f64,
}

impl PlateauLik {
    pub fn new(hyper: &BBHyper) -> Self {
        Self {
            a: hyper.a(),
            a_neg: hyper.a_neg(),
            b: hyper.b(),
            gamma: hyper.gamma(),
        }
    }

    pub fn mu(&self, s: f64) -> f64 {
        self.a + self.b * sigmoid(self.gamma * s)
    }

    /// `log mu` for `y = 1`, `log(1 - mu)` for `y = 0`. The complement is
    /// evaluated as `a_neg + b sigmoid(-eta)` so neither side cancels.
    #[inline]
    pub fn ll(&self, y: u8, s: f64) -> f64 {
        let eta = self.gamma * s;
        if y == 1 {
            log_plateau(self.a, self.b, eta)
        } else {
            log_plateau(self.a_neg, self.b, -eta)
        }
    }

    /// Derivative of [`Self::ll`] in `s`.
    #[inline]
    pub fn dll(&self, y: u8, s: f64) -> f64 {
        let eta = self.gamma * s;
        if y == 1 {
            self.gamma * log_plateau_slope(self.a, self.b, eta)
        } else {
            -self.gamma * log_plateau_slope(self.a_neg, self.b, -eta)
        }
    }

    /// `d ll / d mu`: `1/mu` or `-1/(1 - mu)`.
    pub fn dll_dmu(&self, y: u8, s: f64) -> f64 {
        let eta = self.gamma * s;
        if y == 1 {
            1.0 / (self.a + self.b * sigmoid(eta)).max(1e-300)
        } else {
            -1.0 / (self.a_neg + self.b * sigmoid(-eta)).max(1e-300)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: vec![0.0; dim + 1],
        }
    }

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(constraint("a linear model needs at least the bias weight"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(constraint("non-finite weight"));
        }
        Ok(Self { weights })
    }

    /// Feature dimension (without the bias).
    pub fn dim(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn bias(&self) -> f64 {
        self.weights[self.dim()]
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }

    /// `w'x` for a raw (unaugmented) feature vector.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        self.check(x.len())?;
        Ok(x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias())
    }

    pub fn score_row(&self, data: &Dataset, i: usize) -> f64 {
        data.row_dot(i, &self.weights) + self.bias()
    }

    pub fn scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check(data.dim())?;
        Ok((0..data.len()).map(|i| self.score_row(data, i)).collect())
    }

    /// Labels by the sign rule `w'x >= 0`.
    pub fn predict_labels(&self, data: &Dataset) -> Result<Vec<u8>> {
        Ok(self.scores(data)?.into_iter().map(label_of).collect())
    }
}

/// `1` iff `s >= 0`.
pub fn label_of(s: f64) -> u8 {
    u8::from(s >= 0.0)
}

fn check_l2(l2: f64) -> Result<()> {
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(constraint(format!("lambda = {l2} must be non-negative")));
    }
    Ok(())
}

pub fn mu_bbgamma(model: &LinearModel, x: &[f64], hyper: &BBHyper) -> Result<f64> {
    Ok(PlateauLik::new(hyper).mu(model.score(x)?))
}

/// Penalized log-likelihood `sum_i log p(y_i | x_i) - lambda/2 |w|^2`.
pub fn log_likelihood(data: &Dataset, model: &LinearModel, hyper: &BBHyper, l2: f64) -> Result<f64> {
    check_l2(l2)?;
    let lik = PlateauLik::new(hyper);
    let s = model.scores(data)?;
    let ll: f64 = s.iter().zip(data.labels()).map(|(&s, &y)| lik.ll(y, s)).sum();
    let norm: f64 = model.weights.iter().map(|w| w * w).sum();
    Ok(ll - 0.5 * l2 * norm)
}

pub fn grad_weights(data: &Dataset, model: &LinearModel, hyper: &BBHyper, l2: f64) -> Result<Vec<f64>> {
    check_l2(l2)?;
    let lik = PlateauLik::new(hyper);
    let s = model.scores(data)?;
    let d = data.dim();
    let mut g: Vec<f64> = model.weights.iter().map(|w| -l2 * w).collect();
    for (i, &si) in s.iter().enumerate() {
        let r = lik.dll(data.label(i), si);
        data.for_each_in_row(i, |j, x| g[j] += r * x);
        g[d] += r;
    }
    Ok(g)
}

/// Partial derivatives of the unpenalized log-likelihood in the mixing view.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperGrad {
    pub w: f64,
    pub theta_b: f64,
    pub gamma: f64,
}

pub fn grad_hyper(data: &Dataset, model: &LinearModel, hyper: &BBHyper) -> Result<HyperGrad> {
    let lik = PlateauLik::new(hyper);
    let s = model.scores(data)?;
    let (mut gw, mut gt, mut gg) = (0.0, 0.0, 0.0);
    for (i, &si) in s.iter().enumerate() {
        let y = data.label(i);
        let eta = hyper.gamma() * si;
        let r = lik.dll_dmu(y, si);
        gw += r * (hyper.theta_b() - sigmoid(eta));
        gt += r;
        gg += r * hyper.b() * sigmoid_slope(eta) * si;
    }
    Ok(HyperGrad {
        w: gw,
        theta_b: hyper.w() * gt,
        gamma: gg,
    })
}

const RATE_CLAMP: f64 = 1.0 - 1e-6;
const MIX_LO: f64 = 1e-4;
const MIX_HI: f64 = 1.0 - 1e-4;

/// Mixing weights that reproduce the observed true positive and true negative
/// rates as the model's saturated probabilities: `w = 2 - (TPR + TNR)`,
/// `theta_B = (1 - TNR) / w`.
pub fn asymptotic_init(tpr: f64, tnr: f64) -> (f64, f64) {
    let tpr = tpr.clamp(0.0, RATE_CLAMP);
    let tnr = tnr.clamp(0.0, RATE_CLAMP);
    let w = 2.0 - (tpr + tnr);
    let theta = (1.0 - tnr) / w;
    (w.clamp(MIX_LO, MIX_HI), theta.clamp(MIX_LO, MIX_HI))
}

/// Label by the sign of `w'x` (ties go to the positive class) and the model
/// probability of the positive class.
pub fn predict(model: &LinearModel, x: &[f64], hyper: &BBHyper) -> Result<(u8, f64)> {
    let s = model.score(x)?;
    Ok((label_of(s), PlateauLik::new(hyper).mu(s)))
}

/// On-disk form of a trained linear model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedLinearModel {
    pub weights: Vec<f64>,
    pub hyper: BBHyper,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<Scaler>,
}

impl SavedLinearModel {
    pub fn model(&self) -> Result<LinearModel> {
        LinearModel::new(self.weights.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::softplus;

    fn toy() -> Dataset {
        Dataset::from_rows(&[vec![1.0, -2.0], vec![0.5, 0.3], vec![-1.0, 1.5]], vec![1, 0, 1]).unwrap()
    }

    #[test]
    fn midpoint_probability() {
        let h = BBHyper::new(1.0, 1.0, 100.0, 1.0).unwrap();
        let m = LinearModel::zeros(2);
        let mu = mu_bbgamma(&m, &[3.0, 4.0], &h).unwrap();
        assert!((mu - 0.5).abs() < 1e-15);
        assert!(mu_bbgamma(&m, &[3.0], &h).is_err());
    }

    #[test]
    fn logistic_reduction() {
        let d = toy();
        let m = LinearModel::new(vec![0.3, -0.7, 0.2]).unwrap();
        let h = BBHyper::logistic(1.0);
        let ll = log_likelihood(&d, &m, &h, 0.0).unwrap();
        let s = m.scores(&d).unwrap();
        let direct: f64 = s
            .iter()
            .zip(d.labels())
            .map(|(&s, &y)| if y == 1 { -softplus(-s) } else { -softplus(s) })
            .sum();
        assert!((ll - direct).abs() < 1e-12);
    }

    #[test]
    fn saturated_mixing_has_no_weight_gradient() {
        let h = BBHyper::from_mixing(1.0, 0.3, 10.0, 2.0).unwrap();
        let g = grad_weights(&toy(), &LinearModel::new(vec![1.0, 2.0, 3.0]).unwrap(), &h, 0.0).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn asymptotic_values() {
        let (w, t) = asymptotic_init(0.9, 0.8);
        assert!((w - 0.3).abs() < 1e-12 && (t - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(asymptotic_init(0.5, 0.5).0, 1.0 - 1e-4);
        let (w, t) = asymptotic_init(1.0, 1.0);
        assert_eq!(w, 1e-4);
        assert!((t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn prediction_rule() {
        let h = BBHyper::new(5.0, 10.0, 5.0, 1.0).unwrap();
        let m = LinearModel::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(predict(&m, &[5.0], &h).unwrap().0, 1);
        assert_eq!(predict(&m, &[0.0], &h).unwrap().0, 1);
        let (y, p) = predict(&m, &[-5.0], &h).unwrap();
        assert_eq!(y, 0);
        assert!(p >= 0.25);
    }

    #[test]
    fn saved_model_round_trip() {
        let s = SavedLinearModel {
            weights: vec![0.1, -1e-300, 3.5e12],
            hyper: BBHyper::new(2.0, 3.0, 50.0, 7.0).unwrap(),
            lambda: Some(0.01),
            scaler: None,
        };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<SavedLinearModel>(&json).unwrap(), s);
    }
}
