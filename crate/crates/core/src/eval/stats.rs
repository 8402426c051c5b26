use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Discordant counts of a paired comparison of classifiers A and B.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyPair {
    /// A wrong, B right.
    pub n01: usize,
    /// A right, B wrong.
    pub n10: usize,
}

impl ContingencyPair {
    pub fn new(n01: usize, n10: usize) -> Self {
        Self { n01, n10 }
    }

    /// Counts from two prediction vectors against shared labels.
    pub fn from_predictions(a: &[u8], b: &[u8], labels: &[u8]) -> Result<Self> {
        if a.len() != labels.len() || b.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: if a.len() != labels.len() { a.len() } else { b.len() },
            });
        }
        let mut pair = Self::default();
        for ((&pa, &pb), &y) in a.iter().zip(b).zip(labels) {
            match (pa == y, pb == y) {
                (false, true) => pair.n01 += 1,
                (true, false) => pair.n10 += 1,
                _ => {}
            }
        }
        Ok(pair)
    }

    pub fn discordant(&self) -> usize {
        self.n01 + self.n10
    }
}

impl std::ops::Add for ContingencyPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.n01 + o.n01, self.n10 + o.n10)
    }
}

/// Critical value of the normal approximation, one-sided at the 1% level.
pub const Z_CRITICAL: f64 = 2.32;
pub const SIGNIFICANCE_LEVEL: f64 = 0.01;
/// Up to this many discordant pairs the decision uses the exact binomial
/// tail instead of the normal approximation.
pub const EXACT_MAX_DISCORDANT: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McNemar {
    pub pair: ContingencyPair,
    /// Continuity-corrected statistic `(|n01 - n10| - 1) / sqrt(n01 + n10)`.
    pub z: f64,
    /// False when both counts are zero; `z` is then reported as 0.
    pub defined: bool,
    /// Exact one-sided binomial tail, when the sample is small enough to use it.
    pub exact_p: Option<f64>,
    pub significant: bool,
}

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
pub fn binomial_upper_tail(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    // C(n, i) / 2^n accumulated in log space to stay finite for large n
    let ln2 = std::f64::consts::LN_2;
    let mut ln_c = 0.0f64;
    let mut terms = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            terms.push(ln_c - n as f64 * ln2);
        }
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()).exp().min(1.0)
}

pub fn mcnemar_z(pair: ContingencyPair) -> McNemar {
    let n = pair.discordant();
    if n == 0 {
        return McNemar {
            pair,
            z: 0.0,
            defined: false,
            exact_p: None,
            significant: false,
        };
    }
    let diff = pair.n01.abs_diff(pair.n10) as f64;
    let z = (diff - 1.0) / (n as f64).sqrt();
    let (exact_p, significant) = if n <= EXACT_MAX_DISCORDANT {
        let p = binomial_upper_tail(n, pair.n01.max(pair.n10));
        // a tied split is never evidence for either side
        (Some(p), pair.n01 != pair.n10 && p <= SIGNIFICANCE_LEVEL)
    } else {
        (None, z >= Z_CRITICAL)
    };
    McNemar {
        pair,
        z,
        defined: true,
        exact_p,
        significant,
    }
}

/// Sums the discordant counts of independent splits, then tests once.
pub fn pooled_mcnemar(pairs: &[ContingencyPair]) -> Result<McNemar> {
    if pairs.is_empty() {
        return Err(Error::Data("pooled McNemar test of no splits".into()));
    }
    Ok(mcnemar_z(pairs.iter().fold(ContingencyPair::default(), |a, &b| a + b)))
}
