use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{constraint, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SplitScheme {
    /// Repeated k-fold cross-validation.
    KFold { k: usize, repetitions: usize },
    /// A single train/test split holding out `test_fraction` of the rows.
    Holdout { test_fraction: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub scheme: SplitScheme,
    #[serde(default = "yes")]
    pub stratified: bool,
}

fn yes() -> bool {
    true
}

impl SplitPlan {
    pub fn kfold(k: usize, seed: u64) -> Self {
        Self {
            seed,
            scheme: SplitScheme::KFold { k, repetitions: 1 },
            stratified: true,
        }
    }
}

/// Row indices of one resampling round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub repetition: usize,
    pub index: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Assigns each row a bucket in `0..k`. Stratified plans shuffle each class
/// separately and deal rows round-robin so class ratios match across buckets.
fn assign(data: &Dataset, k: usize, stratified: bool, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut bucket = vec![0; data.len()];
    let groups: Vec<Vec<usize>> = if stratified {
        (0..2u8)
            .map(|c| (0..data.len()).filter(|&i| data.label(i) == c).collect())
            .collect()
    } else {
        vec![(0..data.len()).collect()]
    };
    let mut next = 0;
    for mut g in groups {
        g.shuffle(rng);
        for i in g {
            bucket[i] = next % k;
            next += 1;
        }
    }
    bucket
}

/// Deterministic splits for `plan`. Identical plans give identical folds.
pub fn make_splits(data: &Dataset, plan: &SplitPlan) -> Result<Vec<Fold>> {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    match plan.scheme {
        SplitScheme::KFold { k, repetitions } => {
            if k < 2 || k > data.len() {
                return Err(constraint(format!("k = {k} folds for {} rows", data.len())));
            }
            if repetitions == 0 {
                return Err(constraint("at least one repetition"));
            }
            let mut folds = Vec::with_capacity(k * repetitions);
            for r in 0..repetitions {
                let bucket = assign(data, k, plan.stratified, &mut rng);
                for f in 0..k {
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        (0..data.len()).partition(|&i| bucket[i] == f);
                    folds.push(Fold {
                        repetition: r,
                        index: f,
                        train,
                        test,
                    });
                }
            }
            Ok(folds)
        }
        SplitScheme::Holdout { test_fraction } => {
            if !(test_fraction > 0.0 && test_fraction < 1.0) {
                return Err(constraint(format!("test fraction {test_fraction} outside (0, 1)")));
            }
            let k = (1.0 / test_fraction).round().max(2.0) as usize;
            let bucket = assign(data, k, plan.stratified, &mut rng);
            let (test, train) = (0..data.len()).partition(|&i| bucket[i] == 0);
            Ok(vec![Fold {
                repetition: 0,
                index: 0,
                train,
                test,
            }])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
        Dataset::from_rows(&rows, (0..n).map(|i| (i % 4 == 0) as u8).collect()).unwrap()
    }

    #[test]
    fn folds_partition_rows() {
        let d = toy(103);
        let plan = SplitPlan {
            seed: 9,
            scheme: SplitScheme::KFold { k: 10, repetitions: 2 },
            stratified: true,
        };
        let folds = make_splits(&d, &plan).unwrap();
        assert_eq!(folds.len(), 20);
        for r in 0..2 {
            let mut seen = vec![0; d.len()];
            for f in folds.iter().filter(|f| f.repetition == r) {
                assert_eq!(f.train.len() + f.test.len(), d.len());
                f.test.iter().for_each(|&i| seen[i] += 1);
                let pos = f.test.iter().filter(|&&i| d.label(i) == 1).count();
                assert!((2..=3).contains(&pos), "positives per fold {pos}");
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
        assert_eq!(folds, make_splits(&d, &plan).unwrap());
        assert_ne!(folds, make_splits(&d, &SplitPlan { seed: 10, ..plan }).unwrap());
    }

    #[test]
    fn bad_plans() {
        assert!(make_splits(&toy(5), &SplitPlan::kfold(1, 0)).is_err());
        assert!(make_splits(&toy(5), &SplitPlan::kfold(6, 0)).is_err());
    }

    #[test]
    fn holdout_fraction() {
        let plan = SplitPlan {
            seed: 1,
            scheme: SplitScheme::Holdout { test_fraction: 0.25 },
            stratified: true,
        };
        let f = &make_splits(&toy(100), &plan).unwrap()[0];
        assert_eq!(f.test.len(), 25);
    }
}
