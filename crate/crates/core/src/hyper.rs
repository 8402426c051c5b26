//! Beta-Bernoulli hyper-parameters in both the count view `(alpha, beta, n)`
//! and the mixing view `(w, theta_B)`.

use serde::{Deserialize, Serialize};

use crate::error::{constraint, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyper")]
pub struct BBHyper {
    alpha: f64,
    beta: f64,
    n: f64,
    w: f64,
    #[serde(rename = "theta_B")]
    theta_b: f64,
    gamma: f64,
}

#[derive(Deserialize)]
struct RawHyper {
    alpha: f64,
    beta: f64,
    n: f64,
    w: f64,
    #[serde(rename = "theta_B")]
    theta_b: f64,
    gamma: f64,
}

impl TryFrom<RawHyper> for BBHyper {
    type Error = crate::Error;

    fn try_from(r: RawHyper) -> Result<Self> {
        let h = BBHyper {
            alpha: r.alpha,
            beta: r.beta,
            n: r.n,
            w: r.w,
            theta_b: r.theta_b,
            gamma: r.gamma,
        };
        h.validate()?;
        let tot = r.alpha + r.beta;
        if tot > 0.0 {
            let w = tot / (tot + r.n);
            let th = r.alpha / tot;
            if (w - r.w).abs() > 1e-9 || (th - r.theta_b).abs() > 1e-9 {
                return Err(constraint("count and mixing views of the hyper disagree"));
            }
        } else if r.w != 0.0 {
            return Err(constraint("alpha + beta = 0 requires w = 0"));
        }
        Ok(h)
    }
}

impl BBHyper {
    /// From pseudo-counts and the equivalent sample size.
    pub fn new(alpha: f64, beta: f64, n: f64, gamma: f64) -> Result<Self> {
        let tot = alpha + beta;
        if !(tot > 0.0) {
            return Err(constraint("alpha + beta must be positive"));
        }
        let h = Self {
            alpha,
            beta,
            n,
            w: tot / (tot + n),
            theta_b: alpha / tot,
            gamma,
        };
        h.validate()?;
        Ok(h)
    }

    /// From the mixing view, keeping `n` as the equivalent sample size.
    /// `w = 0` gives `alpha = beta = 0` (plain logistic model).
    pub fn from_mixing(w: f64, theta_b: f64, n: f64, gamma: f64) -> Result<Self> {
        let mut h = Self {
            alpha: 0.0,
            beta: 0.0,
            n,
            w,
            theta_b,
            gamma,
        };
        h.sync_counts();
        h.validate()?;
        Ok(h)
    }

    /// Plain logistic regression: no floor, full span.
    pub fn logistic(gamma: f64) -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            n: 1.0,
            w: 0.0,
            theta_b: 0.5,
            gamma,
        }
    }

    /// Prior from the empirical class counts of a training set: `alpha` = #pos,
    /// `beta` = #neg, `n` = N.
    pub fn from_class_counts(neg: usize, pos: usize, gamma: f64) -> Result<Self> {
        Self::new(pos as f64, neg as f64, (pos + neg) as f64, gamma)
    }

    fn sync_counts(&mut self) {
        if self.w >= 1.0 {
            // infinite pseudo-counts; keep the ratio only
            self.alpha = f64::INFINITY;
            self.beta = f64::INFINITY;
            return;
        }
        let tot = self.n * self.w / (1.0 - self.w);
        self.alpha = tot * self.theta_b;
        self.beta = tot - self.alpha;
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.n, self.w, self.theta_b, self.gamma];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(constraint("hyper-parameters must be finite"));
        }
        if self.alpha < 0.0 || self.beta < 0.0 || self.n < 0.0 {
            return Err(constraint("pseudo-counts and n must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.w) {
            return Err(constraint(format!("w = {} outside [0, 1]", self.w)));
        }
        if !(self.theta_b > 0.0 && self.theta_b < 1.0) {
            return Err(constraint(format!("theta_B = {} outside (0, 1)", self.theta_b)));
        }
        if !(self.gamma > 0.0) {
            return Err(constraint(format!("gamma = {} must be positive", self.gamma)));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn n(&self) -> f64 {
        self.n
    }
    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Floor of the positive-class probability, `w * theta_B`.
    pub fn a(&self) -> f64 {
        self.w * self.theta_b
    }

    /// Span of the probability, `1 - w`.
    pub fn b(&self) -> f64 {
        1.0 - self.w
    }

    /// Floor of the negative-class probability, `w * (1 - theta_B)`.
    pub fn a_neg(&self) -> f64 {
        self.w * (1.0 - self.theta_b)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.gamma = gamma;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the mixing view, recomputing the pseudo-counts for the same `n`.
    pub fn with_mixing(self, w: f64, theta_b: f64) -> Result<Self> {
        Self::from_mixing(w, theta_b, self.n, self.gamma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_prior_views() {
        let h = BBHyper::new(1.0, 1.0, 100.0, 1.0).unwrap();
        assert!((h.w() - 2.0 / 102.0).abs() < 1e-15);
        assert_eq!(h.theta_b(), 0.5);
        assert!((h.a() + h.b() / 2.0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_plateaus() {
        let n = 7.0;
        let h = BBHyper::new(n, 2.0 * n, n, 1.0).unwrap();
        assert!((h.w() - 0.75).abs() < 1e-15);
        assert!((h.theta_b() - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.a() - 0.25).abs() < 1e-15);
        assert!((h.a() + h.b() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mixing_round_trip() {
        let h = BBHyper::new(3.0, 5.0, 40.0, 2.0).unwrap();
        let g = h.with_mixing(h.w(), h.theta_b()).unwrap();
        assert!((g.alpha() - 3.0).abs() < 1e-12);
        assert!((g.beta() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_and_consistency_check() {
        let h = BBHyper::new(1.0, 3.0, 11.0, 4.5).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert!(s.contains("\"theta_B\""));
        let back: BBHyper = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
        let bad = s.replace("\"n\":11.0", "\"n\":12.0");
        assert!(serde_json::from_str::<BBHyper>(&bad).is_err());
        let lr = BBHyper::logistic(1.0);
        let back: BBHyper = serde_json::from_str(&serde_json::to_string(&lr).unwrap()).unwrap();
        assert_eq!(back, lr);
    }

    #[test]
    fn invalid_values() {
        assert!(BBHyper::new(0.0, 0.0, 1.0, 1.0).is_err());
        assert!(BBHyper::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(BBHyper::from_mixing(1.2, 0.5, 1.0, 1.0).is_err());
        assert!(BBHyper::from_mixing(0.5, 1.0, 1.0, 1.0).is_err());
    }
}
