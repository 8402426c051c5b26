use serde::{Deserialize, Serialize};

use super::config::SlaConfig;
use super::objective::{DataObjective, Design, Likelihood, Objective};
use super::sla::{find_sla_solution, vanilla_grad_desc, FitReport};
use crate::data::{make_splits, Dataset, SplitPlan};
use crate::error::{Error, Result};
use crate::kernel::Gram;
use crate::model::label_of;
use crate::prior::Prior;

/// What the coefficients multiply: augmented features or kernel columns.
#[derive(Clone, Copy)]
pub enum Basis<'a> {
    Linear(&'a Dataset),
    /// Gram matrix over the rows of the labels it is paired with.
    Kernel(&'a Gram),
}

impl Basis<'_> {
    pub fn len(&self) -> usize {
        match self {
            Basis::Linear(d) => d.len(),
            Basis::Kernel(g) => g.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Design over `train` rows, and the matrix scoring `eval` rows with
    /// coefficients fitted on `train`.
    pub fn designs(&self, train: &[usize], eval: &[usize]) -> (Design, Design) {
        match self {
            Basis::Linear(d) => (Design::linear(&d.subset(train)), Design::linear(&d.subset(eval))),
            Basis::Kernel(g) => (Design::kernel_block(g, train, train), Design::kernel_block(g, eval, train)),
        }
    }

    pub fn full_design(&self) -> Design {
        match self {
            Basis::Linear(d) => Design::linear(d),
            Basis::Kernel(g) => Design::kernel(g),
        }
    }
}

/// Number of correct sign predictions of `coef` on the rows of `eval`.
pub fn correct_count(eval: &Design, labels: &[u8], coef: &[f64]) -> usize {
    eval.scores(coef)
        .iter()
        .zip(labels)
        .filter(|(&s, &y)| label_of(s) == y)
        .count()
}

/// Candidate values searched by [`slam_tune`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SlamSpace {
    pub lambdas: Vec<f64>,
    pub gamma_inits: Vec<f64>,
    /// Tried in order; earlier entries win ties.
    pub r_gammas: Vec<f64>,
    pub gamma_max_cap: f64,
    /// Inner validation folds.
    pub folds: usize,
    /// Largest number of bracket moves of `gamma_min` in either direction.
    pub max_bracket_moves: usize,
}

impl Default for SlamSpace {
    fn default() -> Self {
        Self {
            lambdas: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2],
            gamma_inits: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            r_gammas: vec![10.0, 5.0, 2.0],
            gamma_max_cap: 2000.0,
            folds: 3,
            max_bracket_moves: 2,
        }
    }
}

/// Inner-fold context shared by all tuning steps.
struct Folds {
    /// (train design, eval design, train labels, eval labels)
    parts: Vec<(Design, Design, Vec<u8>, Vec<u8>)>,
    total: usize,
}

impl Folds {
    fn new(basis: Basis, labels: &[u8], k: usize, seed: u64) -> Result<Self> {
        let rows: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
        let proxy = Dataset::from_rows(&rows, labels.to_vec())?;
        let (neg, pos) = proxy.class_counts();
        if neg.min(pos) < k {
            return Err(Error::Data(format!(
                "cannot form {k} stratified validation folds from {neg} negatives and {pos} positives"
            )));
        }
        let mut parts = Vec::with_capacity(k);
        for f in make_splits(&proxy, &SplitPlan::kfold(k, seed))? {
            let (tr, ev) = basis.designs(&f.train, &f.test);
            let ytr = f.train.iter().map(|&i| labels[i]).collect();
            let yev = f.test.iter().map(|&i| labels[i]).collect();
            parts.push((tr, ev, ytr, yev));
        }
        Ok(Self {
            parts,
            total: labels.len(),
        })
    }

    fn accuracy(&self, correct: usize) -> f64 {
        correct as f64 / self.total as f64
    }
}

/// Winner of a validation grid over penalty and initial sharpness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridChoice {
    pub lambda: f64,
    pub gamma_init: f64,
    pub accuracy: f64,
}

fn grid(
    folds: &Folds,
    lik: Likelihood,
    lambdas: &[f64],
    gammas: &[f64],
    cfg: &SlaConfig,
) -> Result<(GridChoice, Vec<Vec<f64>>)> {
    let mut best: Option<(GridChoice, Vec<Vec<f64>>)> = None;
    for &lambda in lambdas {
        let prior = Prior::L2 { lambda };
        for &gamma in gammas {
            let mut correct = 0;
            let mut coefs = Vec::with_capacity(folds.parts.len());
            for (tr, ev, ytr, yev) in &folds.parts {
                let obj = DataObjective::new(tr, ytr, lik.with_gamma(gamma), &prior);
                let fit = vanilla_grad_desc(&obj, &vec![0.0; obj.dim()], cfg)?;
                correct += correct_count(ev, yev, &fit.coef);
                coefs.push(fit.coef);
            }
            let acc = folds.accuracy(correct);
            // grid order is ascending, so strict improvement keeps the smaller values on ties
            if best.as_ref().map_or(true, |(b, _)| acc > b.accuracy) {
                best = Some((
                    GridChoice {
                        lambda,
                        gamma_init: gamma,
                        accuracy: acc,
                    },
                    coefs,
                ));
            }
        }
    }
    best.ok_or_else(|| Error::Config("empty tuning grid".into()))
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Penalty chosen by inner cross-validation of a plain gradient-descent fit,
/// as used for the logistic-regression baseline.
pub fn tune_lambda(
    basis: Basis,
    labels: &[u8],
    lik: Likelihood,
    lambdas: &[f64],
    folds: usize,
    seed: u64,
    cfg: &SlaConfig,
) -> Result<GridChoice> {
    let f = Folds::new(basis, labels, folds, seed)?;
    Ok(grid(&f, lik, &sorted(lambdas), &[1.0], cfg)?.0)
}

/// Output of [`slam_tune`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlamResult {
    /// Gradient-descent fit on all training rows at the chosen penalty and
    /// initial sharpness; the start point of the annealed fit.
    pub model0: Vec<f64>,
    pub lambda: f64,
    pub gamma_init: f64,
    pub cfg: SlaConfig,
    pub validation_accuracy: f64,
}

/// Validation correct counts after each annealing stage, summed over folds.
fn stage_correct(folds: &Folds, lik: Likelihood, prior: &Prior, starts: &[Vec<f64>], cfg: &SlaConfig) -> Result<Vec<usize>> {
    let mut per_stage = vec![0usize; cfg.schedule().len()];
    for ((tr, ev, ytr, yev), start) in folds.parts.iter().zip(starts) {
        let rep: FitReport = find_sla_solution(tr, ytr, lik, prior, start, cfg)?;
        for (acc, st) in per_stage.iter_mut().zip(&rep.trajectory) {
            *acc += correct_count(ev, yev, &st.coef);
        }
    }
    Ok(per_stage)
}

/// Tunes the optimizer on training data only: penalty and initial sharpness
/// by a validation grid, then the growth factor `r_gamma` by grid, then the
/// schedule endpoints by bracket search. Ties go to the smaller penalty and
/// sharpness.
pub fn slam_tune(
    basis: Basis,
    labels: &[u8],
    lik: Likelihood,
    space: &SlamSpace,
    template: &SlaConfig,
    seed: u64,
) -> Result<SlamResult> {
    template.validate()?;
    let folds = Folds::new(basis, labels, space.folds, seed)?;
    let (choice, starts) = grid(&folds, lik, &sorted(&space.lambdas), &sorted(&space.gamma_inits), template)?;
    let prior = Prior::L2 { lambda: choice.lambda };

    let full = basis.full_design();
    let obj = DataObjective::new(&full, labels, lik.with_gamma(choice.gamma_init), &prior);
    let model0 = vanilla_grad_desc(&obj, &vec![0.0; obj.dim()], template)?.coef;

    let final_correct = |cfg: &SlaConfig| -> Result<usize> {
        Ok(*stage_correct(&folds, lik, &prior, &starts, cfg)?.last().unwrap_or(&0))
    };

    // growth factor, with the template's endpoints
    let mut best_r = template.r_gamma;
    let mut best_acc = None;
    for &r in &space.r_gammas {
        let cfg = SlaConfig {
            r_gamma: r,
            ..template.clone()
        };
        let c = final_correct(&cfg)?;
        if best_acc.map_or(true, |b| c > b) {
            best_acc = Some(c);
            best_r = r;
        }
    }
    let with_min = |g: f64| SlaConfig {
        r_gamma: best_r,
        gamma_min: g,
        gamma_max: g * best_r * best_r,
        ..template.clone()
    };

    // lower endpoint: move by factors of r_gamma while validation strictly improves
    let mut g_min = template.gamma_min;
    let mut cur = final_correct(&with_min(g_min))?;
    for dir in [1.0 / best_r, best_r] {
        let mut moved = false;
        for _ in 0..space.max_bracket_moves {
            let g = g_min * dir;
            if g * best_r * best_r > space.gamma_max_cap {
                break;
            }
            let c = final_correct(&with_min(g))?;
            if c > cur {
                cur = c;
                g_min = g;
                moved = true;
            } else {
                break;
            }
        }
        if moved {
            break;
        }
    }

    // upper endpoint: one long run, then stop at the first stage after which
    // validation accuracy no longer improves
    let long = SlaConfig {
        r_gamma: best_r,
        gamma_min: g_min,
        gamma_max: space.gamma_max_cap.max(g_min),
        ..template.clone()
    };
    let sched = long.schedule();
    let per_stage = stage_correct(&folds, lik, &prior, &starts, &long)?;
    let mut k = 2.min(sched.len() - 1);
    while k + 1 < sched.len() && per_stage[k + 1] > per_stage[k] {
        k += 1;
    }
    let cfg = SlaConfig {
        r_gamma: best_r,
        gamma_min: g_min,
        gamma_max: sched[k],
        ..template.clone()
    };
    Ok(SlamResult {
        model0,
        lambda: choice.lambda,
        gamma_init: choice.gamma_init,
        cfg,
        validation_accuracy: folds.accuracy(per_stage[k]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::BBHyper;
    use crate::model::PlateauLik;

    fn blobs() -> Dataset {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let c = if i % 2 == 0 { 1.0 } else { -1.0 };
                vec![c + 0.3 * ((i * 7 % 11) as f64 - 5.0) / 5.0, 0.2 * ((i * 3 % 5) as f64 - 2.0)]
            })
            .collect();
        let labels = (0..40).map(|i| u8::from(i % 2 == 0)).collect();
        Dataset::from_rows(&rows, labels).unwrap()
    }

    #[test]
    fn single_point_space() {
        let d = blobs();
        let h = BBHyper::new(1.0, 1.0, 100.0, 1.0).unwrap();
        let space = SlamSpace {
            lambdas: vec![0.1],
            gamma_inits: vec![1.0],
            r_gammas: vec![10.0],
            gamma_max_cap: 200.0,
            folds: 3,
            max_bracket_moves: 0,
        };
        let r = slam_tune(
            Basis::Linear(&d),
            d.labels(),
            Likelihood::Plateau(PlateauLik::new(&h)),
            &space,
            &SlaConfig::default(),
            1,
        )
        .unwrap();
        assert_eq!(r.lambda, 0.1);
        assert_eq!(r.gamma_init, 1.0);
        assert_eq!((r.cfg.gamma_min, r.cfg.gamma_max), (2.0, 200.0));
        assert_eq!(r.model0.len(), 3);
        assert!(r.validation_accuracy > 0.9);
    }
}
