//! Coefficient priors: Gaussian (L2) and the Gauss-Laplace mixture used to
//! sparsify kernel models.

use serde::{Deserialize, Serialize};

use crate::error::{constraint, Result};
use crate::numeric::log_add_exp;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
const SIGMA_FLOOR: f64 = 1e-6;
const B_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    Gauss,
    Laplace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixturePrior {
    pub pi_g: f64,
    pub pi_l: f64,
    pub sigma_g: f64,
    pub b_l: f64,
    #[serde(default)]
    pub assign: Vec<Cluster>,
    /// Lower bound of `b_l / sigma_g` kept by the EM updates.
    #[serde(default = "default_scale_ratio")]
    pub min_scale_ratio: f64,
}

fn default_scale_ratio() -> f64 {
    DEFAULT_SCALE_RATIO
}

pub const DEFAULT_SCALE_RATIO: f64 = 0.1;

impl MixturePrior {
    pub fn new(pi_g: f64, sigma_g: f64, b_l: f64) -> Result<Self> {
        let p = Self {
            pi_g,
            pi_l: 1.0 - pi_g,
            sigma_g,
            b_l,
            assign: Vec::new(),
            min_scale_ratio: DEFAULT_SCALE_RATIO,
        };
        p.validate()?;
        Ok(p)
    }

    /// Even mixture with `sigma_g = std(coeffs)` and `b_l = 0.1 mean|coeffs|`,
    /// then clusters assigned by posterior.
    pub fn initial(coeffs: &[f64]) -> Self {
        let n = coeffs.len().max(1) as f64;
        let mean = coeffs.iter().sum::<f64>() / n;
        let var = coeffs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        let mean_abs = coeffs.iter().map(|a| a.abs()).sum::<f64>() / n;
        let mut p = Self {
            pi_g: 0.5,
            pi_l: 0.5,
            sigma_g: var.sqrt().max(SIGMA_FLOOR),
            b_l: (0.1 * mean_abs).max(B_FLOOR),
            assign: Vec::new(),
            min_scale_ratio: DEFAULT_SCALE_RATIO,
        };
        p.assign = coeffs.iter().map(|&a| p.best_cluster(a)).collect();
        p
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.sigma_g) && ok(self.b_l)) {
            return Err(constraint("mixture scales must be finite and positive"));
        }
        if !(0.0..=1.0).contains(&self.pi_g)
            || !(0.0..=1.0).contains(&self.pi_l)
            || (self.pi_g + self.pi_l - 1.0).abs() > 1e-12
        {
            return Err(constraint("mixture weights must lie in [0, 1] and sum to 1"));
        }
        Ok(())
    }

    fn log_gauss(&self, a: f64) -> f64 {
        self.pi_g.ln() - LN_SQRT_2PI - self.sigma_g.ln() - 0.5 * (a / self.sigma_g).powi(2)
    }

    fn log_laplace(&self, a: f64) -> f64 {
        self.pi_l.ln() - (2.0 * self.b_l).ln() - a.abs() / self.b_l
    }

    /// `log(pi_g N(a; 0, sigma_g^2) + pi_l Lap(a; 0, b_l))`.
    pub fn log_density(&self, a: f64) -> f64 {
        log_add_exp(self.log_gauss(a), self.log_laplace(a))
    }

    /// Derivative of [`Self::log_density`], with `d|a|/da = 0` at the origin.
    pub fn d_log_density(&self, a: f64) -> f64 {
        let lg = self.log_gauss(a);
        let ll = self.log_laplace(a);
        let tot = log_add_exp(lg, ll);
        if tot == f64::NEG_INFINITY {
            return 0.0;
        }
        let rg = (lg - tot).exp();
        let rl = (ll - tot).exp();
        let sign = if a > 0.0 {
            1.0
        } else if a < 0.0 {
            -1.0
        } else {
            0.0
        };
        rg * (-a / (self.sigma_g * self.sigma_g)) + rl * (-sign / self.b_l)
    }

    fn best_cluster(&self, a: f64) -> Cluster {
        if self.log_gauss(a) >= self.log_laplace(a) {
            Cluster::Gauss
        } else {
            Cluster::Laplace
        }
    }
}

/// Prior over model coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Prior {
    None,
    L2 { lambda: f64 },
    Mixture(MixturePrior),
}

impl Prior {
    pub fn validate(&self) -> Result<()> {
        match self {
            Prior::None => Ok(()),
            Prior::L2 { lambda } if *lambda >= 0.0 && lambda.is_finite() => Ok(()),
            Prior::L2 { lambda } => Err(constraint(format!("lambda = {lambda} must be non-negative"))),
            Prior::Mixture(m) => m.validate(),
        }
    }

    /// Contribution of a single coefficient; the prior is separable.
    #[inline]
    pub fn coord(&self, a: f64) -> f64 {
        match self {
            Prior::None => 0.0,
            Prior::L2 { lambda } => -0.5 * lambda * a * a,
            Prior::Mixture(m) => m.log_density(a),
        }
    }

    #[inline]
    pub fn coord_grad(&self, a: f64) -> f64 {
        match self {
            Prior::None => 0.0,
            Prior::L2 { lambda } => -lambda * a,
            Prior::Mixture(m) => m.d_log_density(a),
        }
    }
}

pub fn log_prior(prior: &Prior, coeffs: &[f64]) -> Result<f64> {
    prior.validate()?;
    Ok(coeffs.iter().map(|&a| prior.coord(a)).sum())
}

pub fn grad_prior(prior: &Prior, coeffs: &[f64]) -> Result<Vec<f64>> {
    prior.validate()?;
    Ok(coeffs.iter().map(|&a| prior.coord_grad(a)).collect())
}

/// One hard-assignment EM step: assign each coefficient to the component with
/// the larger weighted density, then refit weights and scales. An empty
/// cluster keeps its scale and gets a `1/n` weight floor before renormalizing.
pub fn hard_em_update(coeffs: &[f64], params: &MixturePrior) -> MixturePrior {
    let assign: Vec<Cluster> = coeffs.iter().map(|&a| params.best_cluster(a)).collect();
    let n = coeffs.len().max(1) as f64;
    let (mut ng, mut sq, mut nl, mut abs) = (0usize, 0.0, 0usize, 0.0);
    for (&a, c) in coeffs.iter().zip(&assign) {
        match c {
            Cluster::Gauss => {
                ng += 1;
                sq += a * a;
            }
            Cluster::Laplace => {
                nl += 1;
                abs += a.abs();
            }
        }
    }
    let sigma_g = if ng > 0 {
        (sq / ng as f64).sqrt().max(SIGMA_FLOOR)
    } else {
        params.sigma_g
    };
    let b_l = if nl > 0 {
        (abs / nl as f64).max(B_FLOOR).max(params.min_scale_ratio * sigma_g)
    } else {
        params.b_l
    };
    let wg = (ng as f64 / n).max(1.0 / n);
    let wl = (nl as f64 / n).max(1.0 / n);
    MixturePrior {
        pi_g: wg / (wg + wl),
        pi_l: wl / (wg + wl),
        sigma_g,
        b_l,
        assign,
        min_scale_ratio: params.min_scale_ratio,
    }
}
