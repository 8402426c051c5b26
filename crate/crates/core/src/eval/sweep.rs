use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cv::{cross_validate_many, CvOptions, CvReport};
use super::methods::{fit_methods, Method, MethodSettings};
use crate::data::{Dataset, Scaler, SplitPlan};
use crate::error::{constraint, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub sparse_support: usize,
    pub l2_support: usize,
}

impl SweepPoint {
    pub fn sparse_ratio(&self) -> f64 {
        self.sparse_support as f64 / self.n as f64
    }
}

/// Support counts of the L2 and sparse kernel models trained on nested
/// random subsets of the given sizes.
pub fn sparsity_sweep(data: &Dataset, sizes: &[usize], settings: &MethodSettings, seed: u64) -> Result<Vec<SweepPoint>> {
    if let Some(&n) = sizes.iter().find(|&&n| n > data.len() || n < 4) {
        return Err(constraint(format!("sweep size {n} outside 4..={}", data.len())));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let sub = data.subset(&order[..n]);
        let sub = Scaler::fit(&sub)?.transform(&sub)?;
        let mut fits = fit_methods(&[Method::Kbblr, Method::SparseKbblr], &sub, settings, seed).into_iter();
        let l2 = fits.next().expect("two fits")?;
        let sparse = fits.next().expect("two fits")?;
        out.push(SweepPoint {
            n,
            sparse_support: sparse.support_count().unwrap_or(0),
            l2_support: l2.support_count().unwrap_or(0),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub rate: f64,
    pub reports: Vec<CvReport>,
}

/// Cross-validation of `methods` at each training-label flip rate, on the
/// same splits.
pub fn noise_sweep(
    data: &Dataset,
    rates: &[f64],
    methods: &[Method],
    plan: &SplitPlan,
    settings: &MethodSettings,
) -> Result<Vec<NoisePoint>> {
    rates
        .iter()
        .map(|&rate| {
            let opts = CvOptions {
                noise_rate: (rate > 0.0).then_some(rate),
                standardize: true,
            };
            Ok(NoisePoint {
                rate,
                reports: cross_validate_many(data, plan, methods, settings, &opts)?,
            })
        })
        .collect()
}
