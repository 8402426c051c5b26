use serde::{Deserialize, Serialize};

use super::config::SlaConfig;
use super::objective::{Design, Likelihood};
use super::sla::{find_sla_solution, FitReport};
use super::slam::{correct_count, slam_tune, Basis, SlamResult, SlamSpace};
use crate::data::{make_splits, Dataset, SplitPlan, SplitScheme};
use crate::error::Result;
use crate::hyper::BBHyper;
use crate::model::{asymptotic_init, grad_hyper, label_of, log_likelihood, LinearModel, PlateauLik};
use crate::prior::Prior;

/// A tuned annealed fit: the tuning outcome and the fit on all training rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunedFit {
    pub hyper: BBHyper,
    pub lambda: f64,
    pub cfg: SlaConfig,
    pub model0: Vec<f64>,
    pub report: FitReport,
}

/// Tunes the optimizer on `data` and fits the linear model with it.
pub fn fit_bblr3(data: &Dataset, hyper: &BBHyper, space: &SlamSpace, template: &SlaConfig, seed: u64) -> Result<TunedFit> {
    let lik = Likelihood::Plateau(PlateauLik::new(hyper));
    let slam: SlamResult = slam_tune(Basis::Linear(data), data.labels(), lik, space, template, seed)?;
    let report = find_sla_solution(
        &Design::linear(data),
        data.labels(),
        lik,
        &Prior::L2 { lambda: slam.lambda },
        &slam.model0,
        &slam.cfg,
    )?;
    Ok(TunedFit {
        hyper: *hyper,
        lambda: slam.lambda,
        cfg: slam.cfg,
        model0: slam.model0,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bblr4Options {
    pub max_alternations: usize,
    /// Share of the training rows held in for validation.
    pub validation_fraction: f64,
    pub hyper_steps: usize,
    pub hyper_rate: f64,
    /// Penalty probes are `lambda / f` and `lambda * f`.
    pub lambda_factor: f64,
    pub gamma_max_cap: f64,
}

impl Default for Bblr4Options {
    fn default() -> Self {
        Self {
            max_alternations: 5,
            validation_fraction: 0.25,
            hyper_steps: 50,
            hyper_rate: 0.1,
            lambda_factor: 2.0,
            gamma_max_cap: 2000.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bblr4Fit {
    pub fit: TunedFit,
    pub alternations: usize,
    /// False when no alternation beat the starting fit on validation, in
    /// which case `fit` is the starting fit unchanged.
    pub improved: bool,
    pub validation_accuracy: f64,
}

const MIX_LO: f64 = 1e-4;
const MIX_HI: f64 = 1.0 - 1e-4;

/// Clips the mixing view into `[1e-4, 1 - 1e-4]`.
pub fn project_mixing(w: f64, theta_b: f64) -> (f64, f64) {
    (w.clamp(MIX_LO, MIX_HI), theta_b.clamp(MIX_LO, MIX_HI))
}

/// Training true positive and true negative rates of the sign rule.
pub fn training_rates(data: &Dataset, weights: &[f64]) -> Result<(f64, f64)> {
    let m = LinearModel::new(weights.to_vec())?;
    let s = m.scores(data)?;
    let (mut tp, mut tn) = (0usize, 0usize);
    for (&si, &y) in s.iter().zip(data.labels()) {
        match (y, label_of(si)) {
            (1, 1) => tp += 1,
            (0, 0) => tn += 1,
            _ => {}
        }
    }
    let (neg, pos) = data.class_counts();
    Ok((tp as f64 / pos.max(1) as f64, tn as f64 / neg.max(1) as f64))
}

/// Projected gradient ascent of the unpenalized log-likelihood in
/// `(w, theta_B, log gamma)` with the weights held fixed.
fn hyper_ascent(data: &Dataset, weights: &[f64], hyper: BBHyper, opts: &Bblr4Options) -> Result<BBHyper> {
    let model = LinearModel::new(weights.to_vec())?;
    let n = data.len().max(1) as f64;
    let eval = |h: &BBHyper| log_likelihood(data, &model, h, 0.0).map(|v| v / n);
    let mut h = hyper;
    let mut cur = eval(&h)?;
    let mut rate = opts.hyper_rate;
    for _ in 0..opts.hyper_steps {
        let g = grad_hyper(data, &model, &h)?;
        let (gw, gt, glg) = (g.w / n, g.theta_b / n, g.gamma * h.gamma() / n);
        if gw.abs().max(gt.abs()).max(glg.abs()) < 1e-9 {
            break;
        }
        loop {
            let (w, t) = project_mixing(h.w() + rate * gw, h.theta_b() + rate * gt);
            let gamma = (h.gamma().ln() + rate * glg).exp().clamp(1e-3, opts.gamma_max_cap);
            let cand = BBHyper::from_mixing(w, t, h.n(), gamma)?;
            let val = eval(&cand)?;
            if val > cur {
                h = cand;
                cur = val;
                break;
            }
            rate *= 0.1;
            if rate < 1e-6 {
                return Ok(h);
            }
        }
    }
    Ok(h)
}

struct Candidate {
    hyper: BBHyper,
    lambda: f64,
    cfg: SlaConfig,
    correct: usize,
    coef: Vec<f64>,
}

/// Learns `(w, theta_B, gamma, lambda)` on top of a tuned fit. The mixing
/// weights start from the asymptotic values implied by the starting fit's
/// training rates; each alternation takes hyper-gradient steps, probes the
/// penalty up and down, re-selects the upper sharpness on a held-in split and
/// refits. The starting fit is kept unless validation accuracy improves.
pub fn fit_bblr4(data: &Dataset, base: &TunedFit, opts: &Bblr4Options, seed: u64) -> Result<Bblr4Fit> {
    let plan = SplitPlan {
        seed,
        scheme: SplitScheme::Holdout {
            test_fraction: opts.validation_fraction,
        },
        stratified: true,
    };
    let split = &make_splits(data, &plan)?[0];
    let fit_part = data.subset(&split.train);
    let val_part = data.subset(&split.test);
    let d_fit = Design::linear(&fit_part);
    let d_val = Design::linear(&val_part);

    let run = |h: &BBHyper, lambda: f64, cfg: &SlaConfig, start: &[f64]| {
        find_sla_solution(
            &d_fit,
            fit_part.labels(),
            Likelihood::Plateau(PlateauLik::new(h)),
            &Prior::L2 { lambda },
            start,
            cfg,
        )
    };

    let rep0 = run(&base.hyper, base.lambda, &base.cfg, &base.model0)?;
    let mut best = Candidate {
        hyper: base.hyper,
        lambda: base.lambda,
        cfg: base.cfg.clone(),
        correct: correct_count(&d_val, val_part.labels(), &rep0.coef),
        coef: rep0.coef,
    };
    let baseline_correct = best.correct;

    let (tpr, tnr) = training_rates(data, &base.report.coef)?;
    let (w0, t0) = asymptotic_init(tpr, tnr);
    let final_gamma = base.report.final_gamma().unwrap_or(base.cfg.gamma_max);
    let mut hyper = BBHyper::from_mixing(w0, t0, base.hyper.n(), final_gamma)?;
    let mut cfg = base.cfg.clone();
    let mut lambda = base.lambda;
    let mut coef = best.coef.clone();
    let mut alternations = 0;
    let mut improved = false;

    for _ in 0..opts.max_alternations {
        alternations += 1;
        let next = hyper_ascent(&fit_part, &coef, hyper, opts)?;
        // a learned final sharpness rescales the whole schedule
        let scale = next.gamma() / hyper.gamma();
        cfg.gamma_min *= scale;
        cfg.gamma_max *= scale;
        hyper = next;

        let mut round: Option<Candidate> = None;
        for lam in [lambda, lambda / opts.lambda_factor, lambda * opts.lambda_factor] {
            let long = SlaConfig {
                gamma_max: opts.gamma_max_cap.max(cfg.gamma_min),
                ..cfg.clone()
            };
            let rep = run(&hyper, lam, &long, &coef)?;
            for st in &rep.trajectory {
                let c = correct_count(&d_val, val_part.labels(), &st.coef);
                if round.as_ref().map_or(true, |r| c > r.correct) {
                    round = Some(Candidate {
                        hyper,
                        lambda: lam,
                        cfg: SlaConfig {
                            gamma_max: st.gamma,
                            ..cfg.clone()
                        },
                        correct: c,
                        coef: st.coef.clone(),
                    });
                }
            }
        }
        let Some(r) = round else { break };
        if r.correct <= best.correct {
            break;
        }
        lambda = r.lambda;
        cfg = r.cfg.clone();
        coef = r.coef.clone();
        best = r;
        improved = true;
    }

    let validation_accuracy = best.correct as f64 / val_part.len().max(1) as f64;
    if !improved || best.correct <= baseline_correct {
        return Ok(Bblr4Fit {
            fit: base.clone(),
            alternations,
            improved: false,
            validation_accuracy: baseline_correct as f64 / val_part.len().max(1) as f64,
        });
    }
    let report = find_sla_solution(
        &Design::linear(data),
        data.labels(),
        Likelihood::Plateau(PlateauLik::new(&best.hyper)),
        &Prior::L2 { lambda: best.lambda },
        &base.model0,
        &best.cfg,
    )?;
    Ok(Bblr4Fit {
        fit: TunedFit {
            hyper: best.hyper,
            lambda: best.lambda,
            cfg: best.cfg,
            model0: base.model0.clone(),
            report,
        },
        alternations,
        improved: true,
        validation_accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_clips() {
        assert_eq!(project_mixing(1.5, -0.2), (1.0 - 1e-4, 1e-4));
        assert_eq!(project_mixing(0.3, 0.6), (0.3, 0.6));
    }

    #[test]
    fn rates() {
        let d = Dataset::from_rows(&[vec![1.0], vec![-1.0], vec![2.0], vec![-3.0]], vec![1, 0, 0, 0]).unwrap();
        let (tpr, tnr) = training_rates(&d, &[1.0, 0.0]).unwrap();
        assert_eq!(tpr, 1.0);
        assert!((tnr - 2.0 / 3.0).abs() < 1e-15);
    }
}
