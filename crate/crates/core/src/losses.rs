//! Scalar classification losses as functions of the margin `z = t * w'x`.
//!
//! These are used for plotting and as baselines. Training maximizes the
//! Beta-Bernoulli log-likelihood in [`crate::model`], which shares the same
//! numerically stable kernel ([`crate::numeric::log_plateau`]).

use serde::{Deserialize, Serialize};

use crate::error::{constraint, Result};
use crate::numeric::{log_plateau, log_plateau_slope, sigmoid, softplus};

/// Floor and span of the Beta-Bernoulli probability: the model assigns the
/// positive class a probability in `[a, a + b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauConstants {
    pub a: f64,
    pub b: f64,
}

impl PlateauConstants {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let p = Self { a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(constraint("plateau constants must be finite"));
        }
        if self.a < 0.0 {
            return Err(constraint(format!("plateau floor a = {} < 0", self.a)));
        }
        if self.b <= 0.0 {
            return Err(constraint(format!("plateau span b = {} <= 0", self.b)));
        }
        if self.a + self.b > 1.0 + 1e-12 {
            return Err(constraint(format!(
                "a + b = {} exceeds 1",
                self.a + self.b
            )));
        }
        Ok(())
    }

    /// Floor of the probability assigned to the negative class, `1 - a - b`.
    pub fn complement_floor(&self) -> f64 {
        (1.0 - self.a - self.b).max(0.0)
    }

    /// Scale `s` and offset `c` such that `s * (L - c)` maps the plateau range
    /// of a symmetric (`a == 1 - a - b`) loss onto `[0, 1]`.
    pub fn zero_one_rescale(&self) -> (f64, f64) {
        let c = -(self.a + self.b).ln();
        let s = 1.0 / ((self.a + self.b) / self.a).ln();
        (s, c)
    }
}

/// Class of the target in the `{-1, +1}` encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    Positive,
    Negative,
}

impl Target {
    pub fn sign(self) -> f64 {
        match self {
            Target::Positive => 1.0,
            Target::Negative => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LossKind {
    Logistic,
    Hinge,
    ZeroOne,
    /// `(1 + exp(gamma z))^-1`
    Sigmoid,
    /// `gamma^-1 log(1 + exp(gamma (1 - z)))`
    GenLogistic,
    BetaBernoulli {
        plateau: PlateauConstants,
        target: Target,
    },
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::Logistic => "logistic",
            LossKind::Hinge => "hinge",
            LossKind::ZeroOne => "zero_one",
            LossKind::Sigmoid => "sigmoid",
            LossKind::GenLogistic => "gen_logistic",
            LossKind::BetaBernoulli { .. } => "bbgamma",
        }
    }

    fn uses_gamma(&self) -> bool {
        matches!(
            self,
            LossKind::Sigmoid | LossKind::GenLogistic | LossKind::BetaBernoulli { .. }
        )
    }

    fn check(&self, gamma: f64) -> Result<()> {
        if self.uses_gamma() && !(gamma > 0.0 && gamma.is_finite()) {
            return Err(constraint(format!("gamma = {gamma} must be positive")));
        }
        if let LossKind::BetaBernoulli { plateau, .. } = self {
            plateau.validate()?;
        }
        Ok(())
    }
}

/// Probability floor used for the observed class of a Beta-Bernoulli loss.
fn bb_floor(plateau: &PlateauConstants, target: Target) -> f64 {
    match target {
        Target::Positive => plateau.a,
        Target::Negative => plateau.complement_floor(),
    }
}

pub fn eval_loss(kind: LossKind, z: f64, gamma: f64) -> Result<f64> {
    kind.check(gamma)?;
    Ok(match kind {
        LossKind::Logistic => softplus(-z),
        LossKind::Hinge => (1.0 - z).max(0.0),
        LossKind::ZeroOne => {
            if z <= 0.0 {
                1.0
            } else {
                0.0
            }
        }
        LossKind::Sigmoid => sigmoid(-gamma * z),
        LossKind::GenLogistic => softplus(gamma * (1.0 - z)) / gamma,
        LossKind::BetaBernoulli { plateau, target } => {
            -log_plateau(bb_floor(&plateau, target), plateau.b, gamma * z)
        }
    })
}

/// Derivative of [`eval_loss`] in `z`. Hinge and zero-one use the zero
/// subgradient at their kinks.
pub fn loss_grad(kind: LossKind, z: f64, gamma: f64) -> Result<f64> {
    kind.check(gamma)?;
    Ok(match kind {
        LossKind::Logistic => -sigmoid(-z),
        LossKind::Hinge => {
            if z < 1.0 {
                -1.0
            } else {
                0.0
            }
        }
        LossKind::ZeroOne => 0.0,
        LossKind::Sigmoid => {
            let m = gamma * z;
            -gamma * sigmoid(m) * sigmoid(-m)
        }
        LossKind::GenLogistic => -sigmoid(gamma * (1.0 - z)),
        LossKind::BetaBernoulli { plateau, target } => {
            -gamma * log_plateau_slope(bb_floor(&plateau, target), plateau.b, gamma * z)
        }
    })
}

/// Samples `(z, loss)` on `points` evenly spaced margins in `[z_min, z_max]`.
pub fn loss_curve(
    kind: LossKind,
    gamma: f64,
    z_min: f64,
    z_max: f64,
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if points < 2 || !(z_max > z_min) {
        return Err(constraint("loss curve needs at least two points and z_max > z_min"));
    }
    let step = (z_max - z_min) / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let z = z_min + step * i as f64;
            eval_loss(kind, z, gamma).map(|l| (z, l))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bb(a: f64, b: f64, target: Target) -> LossKind {
        LossKind::BetaBernoulli {
            plateau: PlateauConstants::new(a, b).unwrap(),
            target,
        }
    }

    fn central_diff(kind: LossKind, z: f64, gamma: f64, h: f64) -> f64 {
        (eval_loss(kind, z + h, gamma).unwrap() - eval_loss(kind, z - h, gamma).unwrap())
            / (2.0 * h)
    }

    #[test]
    fn reference_values() {
        let ln2 = 2f64.ln();
        assert_relative_eq!(eval_loss(LossKind::Logistic, 0.0, 1.0).unwrap(), ln2);
        assert_eq!(eval_loss(LossKind::Hinge, -1.0, 1.0).unwrap(), 2.0);
        assert_eq!(eval_loss(LossKind::ZeroOne, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(eval_loss(LossKind::ZeroOne, 0.1, 1.0).unwrap(), 0.0);
        for g in [0.5, 1.0, 7.0, 200.0] {
            assert_eq!(eval_loss(LossKind::Sigmoid, 0.0, g).unwrap(), 0.5);
        }
        let k = bb(0.25, 0.5, Target::Positive);
        assert_relative_eq!(eval_loss(k, 0.0, 3.0).unwrap(), ln2, epsilon = 1e-15);
        assert_relative_eq!(
            eval_loss(k, -1e6, 3.0).unwrap(),
            -(0.25f64).ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn reference_gradients() {
        assert_relative_eq!(loss_grad(LossKind::Logistic, 0.0, 1.0).unwrap(), -0.5);
        assert_relative_eq!(loss_grad(LossKind::Sigmoid, 0.0, 2.0).unwrap(), -0.5);
        assert_eq!(loss_grad(LossKind::Hinge, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(loss_grad(LossKind::ZeroOne, -3.0, 1.0).unwrap(), 0.0);

        let k = bb(0.0098, 0.9804, Target::Positive);
        let analytic = loss_grad(k, 0.3, 4.0).unwrap();
        let fd = central_diff(k, 0.3, 4.0, 1e-6);
        assert!(((analytic - fd) / fd).abs() < 1e-8, "{analytic} vs {fd}");
    }

    #[test]
    fn invalid_plateau_is_rejected() {
        assert!(PlateauConstants::new(0.1, 0.98).is_err());
        assert!(PlateauConstants::new(0.1, 0.0).is_err());
        let bad = LossKind::BetaBernoulli {
            plateau: PlateauConstants { a: 0.5, b: 0.9 },
            target: Target::Positive,
        };
        assert!(eval_loss(bad, 0.0, 1.0).is_err());
        assert!(eval_loss(LossKind::Sigmoid, 0.0, 0.0).is_err());
    }

    #[test]
    fn stable_for_large_sharpness() {
        let k = bb(0.0, 1.0, Target::Positive);
        let v = eval_loss(k, -50.0, 200.0).unwrap();
        assert_relative_eq!(v, 1e4, max_relative = 1e-12);
        for kind in [
            LossKind::Logistic,
            LossKind::Sigmoid,
            LossKind::GenLogistic,
            bb(0.01, 0.98, Target::Negative),
        ] {
            for z in [-100.0, -1.0, 1.0, 100.0] {
                assert!(eval_loss(kind, z, 100.0).unwrap().is_finite());
                assert!(loss_grad(kind, z, 100.0).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn gen_logistic_gap_shrinks_as_gamma_doubles() {
        for &z in &[-2.0, -0.5, 0.0, 0.7, 1.0, 1.3, 3.0] {
            let hinge = eval_loss(LossKind::Hinge, z, 1.0).unwrap();
            let mut prev = f64::INFINITY;
            let mut g = 2.0;
            while g <= 256.0 {
                let gap = eval_loss(LossKind::GenLogistic, z, g).unwrap() - hinge;
                assert!(gap >= 0.0);
                assert!(gap < prev || gap == 0.0, "z={z} gamma={g}");
                prev = gap;
                g *= 2.0;
            }
        }
    }

    proptest! {
        #[test]
        fn sigmoid_loss_bounded_and_decreasing(z in -3.0f64..3.0, dz in 0.01f64..2.0, g in 0.1f64..8.0) {
            let l1 = eval_loss(LossKind::Sigmoid, z, g).unwrap();
            let l2 = eval_loss(LossKind::Sigmoid, z + dz, g).unwrap();
            prop_assert!(l1 > 0.0 && l1 < 1.0);
            prop_assert!(l2 < l1);
            let far = eval_loss(LossKind::Sigmoid, 40.0 * z, 40.0 * g).unwrap();
            prop_assert!((0.0..=1.0).contains(&far));
        }

        #[test]
        fn bb_reduces_to_logistic(z in -40.0f64..40.0) {
            let k = bb(0.0, 1.0, Target::Positive);
            let a = eval_loss(k, z, 1.0).unwrap();
            let b = eval_loss(LossKind::Logistic, z, 1.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }

        #[test]
        fn bb_within_plateaus_and_decreasing(
            a in 0.001f64..0.3, frac in 0.1f64..1.0, z in -30.0f64..30.0, dz in 0.01f64..3.0, g in 0.5f64..32.0
        ) {
            let b = (1.0 - a) * frac;
            let k = bb(a, b, Target::Positive);
            let l = eval_loss(k, z, g).unwrap();
            let lo = -(a + b).ln();
            let hi = -a.ln();
            prop_assert!(l >= lo - 1e-12 && l <= hi + 1e-12);
            prop_assert!(eval_loss(k, z + dz, g).unwrap() <= l);
        }

        #[test]
        fn gradients_match_finite_differences(z in -4.0f64..4.0, g in 0.25f64..16.0, a in 0.0f64..0.2, t in any::<bool>()) {
            let target = if t { Target::Positive } else { Target::Negative };
            for kind in [LossKind::Logistic, LossKind::Sigmoid, LossKind::GenLogistic, bb(a, 0.7, target)] {
                let h = 1e-5 / g;
                let fd = central_diff(kind, z, g, h);
                let an = loss_grad(kind, z, g).unwrap();
                let scale = an.abs().max(1e-3);
                prop_assert!((fd - an).abs() / scale < 1e-6, "{:?} z={} g={} an={} fd={}", kind, z, g, an, fd);
            }
        }
    }
}
