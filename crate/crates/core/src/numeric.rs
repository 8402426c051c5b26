//! Overflow-free scalar helpers shared by the losses, the model and the priors.

/// Logistic sigmoid `1 / (1 + exp(-x))`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `log sigmoid(x) = -softplus(-x)`.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// `sigmoid(x) * (1 - sigmoid(x))`, the derivative of the sigmoid.
#[inline]
pub fn sigmoid_slope(x: f64) -> f64 {
    let s = sigmoid(x);
    let c = sigmoid(-x);
    s * c
}

/// `log(floor + span * sigmoid(m))` with `floor >= 0`, `span > 0`.
///
/// This is the log-probability of the observed class under the plateau
/// model: `floor` is the smallest probability the model can assign to the
/// class and `floor + span` the largest.
#[inline]
pub fn log_plateau(floor: f64, span: f64, m: f64) -> f64 {
    if floor == 0.0 {
        return span.ln() + log_sigmoid(m);
    }
    let p = floor + span * sigmoid(m);
    p.max(1e-300).ln()
}

/// Derivative of [`log_plateau`] in `m`.
///
/// Evaluated as `span (1 - sigmoid(m)) / (floor (1 + exp(-m)) + span)`, which
/// stays finite when `exp(-m)` overflows.
#[inline]
pub fn log_plateau_slope(floor: f64, span: f64, m: f64) -> f64 {
    if span == 0.0 {
        return 0.0;
    }
    let tail = sigmoid(-m);
    if floor == 0.0 {
        return tail;
    }
    let denom = floor * (1.0 + (-m).exp()) + span;
    if denom.is_infinite() {
        0.0
    } else {
        span * tail / denom
    }
}

/// `log(exp(x) + exp(y))`, tolerating `-inf` arguments.
#[inline]
pub fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_symmetric_and_saturates() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(3.0) + sigmoid(-3.0) - 1.0).abs() < 1e-15);
        assert_eq!(sigmoid(1e4), 1.0);
        assert_eq!(sigmoid(-1e4), 0.0);
    }

    #[test]
    fn softplus_large_arguments() {
        assert_eq!(softplus(1e4), 1e4);
        assert_eq!(softplus(-1e4), 0.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn plateau_slope_stays_finite() {
        for &m in &[-1e4, -800.0, -30.0, 0.0, 30.0, 800.0, 1e4] {
            let g = log_plateau_slope(0.01, 0.98, m);
            assert!(g.is_finite() && g >= 0.0, "m={m} g={g}");
            let v = log_plateau(0.01, 0.98, m);
            assert!(v.is_finite(), "m={m}");
        }
        assert_eq!(log_plateau_slope(0.0, 1.0, -1e4), 1.0);
    }

    #[test]
    fn log_add_exp_handles_neg_infinity() {
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 1.5), 1.5);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, f64::NEG_INFINITY), f64::NEG_INFINITY);
        assert!((log_add_exp(0.0, 0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
