mod common;

use std::collections::HashSet;
use std::sync::Mutex;

use bblr::data::{Dataset, SplitPlan, SplitScheme};
use bblr::eval::{
    cross_validate_with, pooled_against, CvOptions, CvReport, Trained, EXACT_MAX_DISCORDANT,
};
use bblr::logistic::{lr_gradient, lr_log_likelihood};
use bblr::model::{grad_weights, log_likelihood};
use bblr::optim::{grad_desc_in_range, vanilla_grad_desc, FnObjective, SlaConfig};
use bblr::{BBHyper, LinearModel};

/// Rows whose single feature is the row index, so a fitter can tell which
/// rows it was shown.
fn indexed(n: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
    let labels = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
    Dataset::from_rows(&rows, labels).unwrap()
}

fn repeated(seed: u64, repetitions: usize) -> SplitPlan {
    SplitPlan {
        scheme: SplitScheme::KFold { k: 5, repetitions },
        ..SplitPlan::kfold(5, seed)
    }
}

fn constant(label: u8) -> Trained {
    Trained::Linear {
        model: LinearModel::new(vec![0.0, if label == 1 { 1.0 } else { -1.0 }]).unwrap(),
        hyper: None,
        lambda: 0.0,
        report: None,
    }
}

/// Predicts 1 for rows whose index exceeds `cut`.
fn threshold(cut: f64) -> Trained {
    Trained::Linear {
        model: LinearModel::new(vec![1.0, -cut]).unwrap(),
        hyper: None,
        lambda: 0.0,
        report: None,
    }
}

#[test]
fn fitter_never_sees_test_rows() {
    let data = indexed(47);
    let plan = repeated(3, 3);
    let opts = CvOptions { noise_rate: None, standardize: false };
    let seen = Mutex::new(Vec::new());
    let names = vec!["probe".to_string()];
    let reports = cross_validate_with(&data, &plan, &opts, &names, |ctx, train| {
        let rows: HashSet<usize> = (0..train.len()).map(|i| train.dense_row(i)[0] as usize).collect();
        seen.lock().unwrap().push((ctx.repetition, ctx.index, rows));
        vec![Ok(constant(1))]
    })
    .unwrap();
    let r = &reports[0];
    assert_eq!(r.folds.len(), 15);
    assert!(r.failures.is_empty());
    for (rep, idx, rows) in seen.into_inner().unwrap() {
        let fold = r.folds.iter().find(|f| f.repetition == rep && f.index == idx).unwrap();
        assert!(fold.test_rows.iter().all(|t| !rows.contains(t)), "fold {rep}/{idx} leaked");
        assert_eq!(rows.len() + fold.test_rows.len(), data.len());
    }
    for rep in 0..3 {
        let mut all: Vec<usize> = r.folds.iter().filter(|f| f.repetition == rep).flat_map(|f| f.test_rows.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..47).collect::<Vec<_>>());
    }
}

#[test]
fn noise_touches_training_labels_only() {
    let data = indexed(60);
    let plan = SplitPlan::kfold(5, 9);
    let opts = CvOptions { noise_rate: Some(0.2), standardize: false };
    let flipped = Mutex::new(0usize);
    let names = vec!["const".to_string()];
    let reports = cross_validate_with(&data, &plan, &opts, &names, |_, train| {
        let n = (0..train.len())
            .filter(|&i| train.label(i) != data.label(train.dense_row(i)[0] as usize))
            .count();
        *flipped.lock().unwrap() += n;
        vec![Ok(constant(0))]
    })
    .unwrap();
    // floor(0.2 * 48) per training part
    assert_eq!(flipped.into_inner().unwrap(), 5 * 9);
    // test errors are scored against the clean labels
    let errors: usize = reports[0].folds.iter().map(|f| f.errors).sum();
    assert_eq!(errors, data.labels().iter().filter(|&&y| y == 1).count());
}

fn recompute(r: &CvReport, data: &Dataset) -> (f64, f64) {
    let mut pct = Vec::new();
    let mut total = 0usize;
    for f in &r.folds {
        let wrong = f.test_rows.iter().zip(&f.predictions).filter(|(&i, &p)| data.label(i) != p).count();
        total += wrong;
        pct.push(100.0 * wrong as f64 / f.test_rows.len() as f64);
    }
    (pct.iter().sum::<f64>() / pct.len() as f64, total as f64 / r.repetitions as f64)
}

#[test]
fn aggregates_match_recomputation() {
    let data = indexed(53);
    let plan = repeated(1, 4);
    let opts = CvOptions { noise_rate: None, standardize: false };
    let names = vec!["low".to_string(), "high".to_string()];
    let reports = cross_validate_with(&data, &plan, &opts, &names, |ctx, _| {
        let cut = 10.0 + 7.0 * ctx.index as f64 + ctx.repetition as f64;
        vec![Ok(threshold(cut)), Ok(threshold(cut + 20.0))]
    })
    .unwrap();
    for r in &reports {
        let (pct, zo) = recompute(r, &data);
        assert!((r.mean_error_percent().unwrap() - pct).abs() < 1e-12);
        assert!((r.mean_zero_one().unwrap() - zo).abs() < 1e-12);
        for f in &r.folds {
            assert!((f.error_percent - 100.0 * f.errors as f64 / f.test_rows.len() as f64).abs() < 1e-12);
        }
    }

    // pooled counts summed by hand
    let (mut n01, mut n10) = (0, 0);
    for fa in &reports[0].folds {
        let fb = reports[1].folds.iter().find(|f| f.repetition == fa.repetition && f.index == fa.index).unwrap();
        for (k, &i) in fa.test_rows.iter().enumerate() {
            let (a_ok, b_ok) = (fa.predictions[k] == data.label(i), fb.predictions[k] == data.label(i));
            n01 += usize::from(!a_ok && b_ok);
            n10 += usize::from(a_ok && !b_ok);
        }
    }
    let t = pooled_against(&reports[0], &reports[1], &data).unwrap();
    assert_eq!((t.pair.n01, t.pair.n10), (n01, n10));
}

#[test]
fn exact_binomial_against_integer_arithmetic() {
    let worst = common::binomial_tail_error(120);
    assert!(worst <= 1e-12, "{worst:e}");
    let bad = common::mcnemar_decision_mismatches(EXACT_MAX_DISCORDANT as u32);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn zero_prior_weight_is_logistic_regression() {
    let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).sin() * 3.0, (i as f64 * 0.11).cos()]).collect();
    let labels: Vec<u8> = (0..30).map(|i| u8::from((i * 7) % 5 < 2)).collect();
    let data = Dataset::from_rows(&rows, labels).unwrap();
    let model = LinearModel::new(vec![0.8, -1.3, 0.4]).unwrap();
    let counts = BBHyper::from_mixing(0.0, 0.3, 10.0, 1.0).unwrap();
    assert_eq!((counts.alpha(), counts.beta()), (0.0, 0.0));
    for h in [counts, BBHyper::logistic(1.0)] {
        for l2 in [0.0, 0.1] {
            let a = log_likelihood(&data, &model, &h, l2).unwrap();
            let b = lr_log_likelihood(&data, &model, l2).unwrap();
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "{a} vs {b}");
            let ga = grad_weights(&data, &model, &h, l2).unwrap();
            let gb = lr_gradient(&data, &model, l2).unwrap();
            for (x, y) in ga.iter().zip(&gb) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn probing_escapes_the_shallow_well() {
    // maxima near -1 (lower) and +1 (higher), separated by a valley at 0
    let obj = FnObjective {
        dim: 1,
        f: |v: &[f64]| -(v[0] * v[0] - 1.0).powi(2) + 0.3 * v[0],
        g: |v: &[f64]| vec![-4.0 * v[0] * (v[0] * v[0] - 1.0) + 0.3],
    };
    let cfg = SlaConfig {
        rg_max: 0.05,
        ..SlaConfig::default()
    };
    let gd = vanilla_grad_desc(&obj, &[-1.2], &cfg).unwrap();
    assert!(gd.coef[0] < 0.0, "plain descent should stay in the left well");
    let (v, stats) = grad_desc_in_range(&obj, &[-1.2], 3.0, 0.1, &cfg).unwrap();
    assert!(v[0] > 0.9 && v[0] < 1.1, "ended at {}", v[0]);
    assert!(stats.probes_accepted >= 1);
}
