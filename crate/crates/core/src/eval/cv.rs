use serde::{Deserialize, Serialize};

use super::methods::{fit_methods, Method, MethodSettings, Trained};
use super::metrics::{error_percent, zero_one_total};
use super::stats::{pooled_mcnemar, ContingencyPair, McNemar};
use crate::data::{inject_label_noise, make_splits, standardize, Dataset, Fold, SplitPlan};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvOptions {
    /// Share of training labels flipped in every fold; test labels are kept.
    pub noise_rate: Option<f64>,
    /// Standardize features with statistics of the training part.
    pub standardize: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            noise_rate: None,
            standardize: true,
        }
    }
}

/// Identifies a fold to a fitting callback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoldContext {
    pub repetition: usize,
    pub index: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repetition: usize,
    pub index: usize,
    /// Row indices into the full dataset, aligned with `predictions`.
    pub test_rows: Vec<usize>,
    pub predictions: Vec<u8>,
    pub errors: usize,
    pub error_percent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_count: Option<usize>,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldFailure {
    pub repetition: usize,
    pub index: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub method: String,
    pub repetitions: usize,
    pub folds: Vec<FoldRecord>,
    pub failures: Vec<FoldFailure>,
}

impl CvReport {
    /// Mean of the per-fold error percentages.
    pub fn mean_error_percent(&self) -> Option<f64> {
        if self.folds.is_empty() {
            return None;
        }
        Some(self.folds.iter().map(|f| f.error_percent).sum::<f64>() / self.folds.len() as f64)
    }

    /// Test errors summed over the folds of a repetition, averaged over
    /// repetitions.
    pub fn mean_zero_one(&self) -> Option<f64> {
        if self.folds.is_empty() {
            return None;
        }
        Some(self.folds.iter().map(|f| f.errors).sum::<usize>() as f64 / self.repetitions.max(1) as f64)
    }

    pub fn mean_support(&self) -> Option<f64> {
        let s: Vec<usize> = self.folds.iter().filter_map(|f| f.support_count).collect();
        if s.is_empty() {
            return None;
        }
        Some(s.iter().sum::<usize>() as f64 / s.len() as f64)
    }
}

/// Seed of a fold's own randomness (inner validation splits, label noise),
/// distinct per fold and reproducible from the plan seed.
pub fn fold_seed(seed: u64, repetition: usize, index: usize) -> u64 {
    let mut z = seed ^ ((repetition as u64) << 32 | index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

type FoldResult = (Fold, Result<Vec<Result<(Vec<u8>, Trained)>>>);

fn run_fold<F>(data: &Dataset, fold: Fold, opts: &CvOptions, plan_seed: u64, fit: &F) -> FoldResult
where
    F: Fn(&FoldContext, &Dataset) -> Vec<Result<Trained>> + Sync,
{
    let ctx = FoldContext {
        repetition: fold.repetition,
        index: fold.index,
        seed: fold_seed(plan_seed, fold.repetition, fold.index),
    };
    let run = || -> Result<Vec<Result<(Vec<u8>, Trained)>>> {
        let mut train = data.subset(&fold.train);
        let mut test = data.subset(&fold.test);
        if let Some(rate) = opts.noise_rate {
            train = inject_label_noise(&train, rate, ctx.seed ^ 0x6E6F_6973_65)?;
        }
        if opts.standardize {
            let (a, b, _) = standardize(&train, &test)?;
            train = a;
            test = b;
        }
        Ok(fit(&ctx, &train)
            .into_iter()
            .map(|r| r.and_then(|t| Ok((t.predict(&test)?, t))))
            .collect())
    };
    let r = run();
    (fold, r)
}

/// Cross-validation with a caller-supplied fitter, which sees only the
/// (possibly noisy, standardized) training part of each fold and returns one
/// model per name. Failures are recorded per fold and method.
pub fn cross_validate_with<F>(data: &Dataset, plan: &SplitPlan, opts: &CvOptions, names: &[String], fit: F) -> Result<Vec<CvReport>>
where
    F: Fn(&FoldContext, &Dataset) -> Vec<Result<Trained>> + Sync,
{
    let folds = make_splits(data, plan)?;
    let repetitions = folds.iter().map(|f| f.repetition + 1).max().unwrap_or(0);

    #[cfg(feature = "parallel")]
    let results: Vec<FoldResult> = {
        use rayon::prelude::*;
        folds.into_par_iter().map(|f| run_fold(data, f, opts, plan.seed, &fit)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<FoldResult> = folds.into_iter().map(|f| run_fold(data, f, opts, plan.seed, &fit)).collect();

    let mut reports: Vec<CvReport> = names
        .iter()
        .map(|n| CvReport {
            method: n.clone(),
            repetitions,
            folds: Vec::new(),
            failures: Vec::new(),
        })
        .collect();
    for (fold, outcome) in results {
        let fail = |r: &mut CvReport, msg: String| {
            r.failures.push(FoldFailure {
                repetition: fold.repetition,
                index: fold.index,
                message: msg,
            })
        };
        match outcome {
            Err(e) => reports.iter_mut().for_each(|r| fail(r, e.to_string())),
            Ok(per_method) => {
                if per_method.len() != names.len() {
                    return Err(Error::DimensionMismatch {
                        expected: names.len(),
                        got: per_method.len(),
                    });
                }
                for (r, m) in reports.iter_mut().zip(per_method) {
                    match m {
                        Err(e) => fail(r, e.to_string()),
                        Ok((pred, trained)) => {
                            let labels: Vec<u8> = fold.test.iter().map(|&i| data.label(i)).collect();
                            r.folds.push(FoldRecord {
                                repetition: fold.repetition,
                                index: fold.index,
                                errors: zero_one_total(&pred, &labels)?,
                                error_percent: error_percent(&pred, &labels)?,
                                test_rows: fold.test.clone(),
                                predictions: pred,
                                support_count: trained.support_count(),
                                lambda: trained.lambda(),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(reports)
}

/// Cross-validates several methods on identical splits.
pub fn cross_validate_many(
    data: &Dataset,
    plan: &SplitPlan,
    methods: &[Method],
    settings: &MethodSettings,
    opts: &CvOptions,
) -> Result<Vec<CvReport>> {
    settings.validate()?;
    let names: Vec<String> = methods.iter().map(|m| m.name().to_string()).collect();
    cross_validate_with(data, plan, opts, &names, |ctx, train| fit_methods(methods, train, settings, ctx.seed))
}

pub fn cross_validate(data: &Dataset, plan: &SplitPlan, method: Method, settings: &MethodSettings, opts: &CvOptions) -> Result<CvReport> {
    Ok(cross_validate_many(data, plan, &[method], settings, opts)?.remove(0))
}

/// Per-fold discordant counts of `a` against `b` over folds both completed.
/// The reports must come from the same splits.
pub fn paired_contingency(a: &CvReport, b: &CvReport, data: &Dataset) -> Result<Vec<ContingencyPair>> {
    let mut pairs = Vec::new();
    for fa in &a.folds {
        let Some(fb) = b.folds.iter().find(|f| f.repetition == fa.repetition && f.index == fa.index) else {
            continue;
        };
        if fa.test_rows != fb.test_rows {
            return Err(Error::Data(format!(
                "fold {}/{} has different test rows in the two reports",
                fa.repetition, fa.index
            )));
        }
        let labels: Vec<u8> = fa.test_rows.iter().map(|&i| data.label(i)).collect();
        pairs.push(ContingencyPair::from_predictions(&fa.predictions, &fb.predictions, &labels)?);
    }
    Ok(pairs)
}

/// Pooled test of `reference` (A) against `other` (B); a large statistic
/// with `n01 > n10` favors `other`.
pub fn pooled_against(reference: &CvReport, other: &CvReport, data: &Dataset) -> Result<McNemar> {
    pooled_mcnemar(&paired_contingency(reference, other, data)?)
}
