use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hyper::BBHyper;
use crate::kernel::{gram, median_pairwise_distance, support_count, Gram, KernelModel, KernelSpec, DEFAULT_SUPPORT_TAU};
use crate::model::{LinearModel, PlateauLik};
use crate::optim::{
    find_sla_solution, find_sla_solution_sparse, fit_bblr3, fit_bblr4, tune_lambda, vanilla_grad_desc, Basis,
    Bblr4Options, DataObjective, Design, FitReport, Likelihood, SlaConfig, SlamSpace, TunedFit,
};
use crate::prior::{MixturePrior, Prior};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// L2 logistic regression fitted by gradient descent.
    Lr,
    /// Sigmoid loss with the annealed optimizer.
    SlaSigmoid,
    /// Plateau loss with `alpha = beta = 1`, `n = 100`.
    Bblr1,
    /// Plateau loss with the training class counts.
    Bblr2,
    /// As `Bblr2` with the optimizer tuned on the training rows.
    Bblr3,
    /// As `Bblr3` with `w`, `theta_B`, `gamma` and `lambda` learned.
    Bblr4,
    /// RBF kernel model, L2 penalty.
    Kbblr,
    /// RBF kernel model under the Gauss-Laplace mixture prior.
    SparseKbblr,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Lr,
        Method::SlaSigmoid,
        Method::Bblr1,
        Method::Bblr2,
        Method::Bblr3,
        Method::Bblr4,
        Method::Kbblr,
        Method::SparseKbblr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lr => "lr",
            Method::SlaSigmoid => "sla-sigmoid",
            Method::Bblr1 => "bblr1",
            Method::Bblr2 => "bblr2",
            Method::Bblr3 => "bblr3",
            Method::Bblr4 => "bblr4",
            Method::Kbblr => "kbblr",
            Method::SparseKbblr => "sparse-kbblr",
        }
    }

    pub fn is_kernel(self) -> bool {
        matches!(self, Method::Kbblr | Method::SparseKbblr)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        if key == "sla" {
            return Ok(Method::SlaSigmoid);
        }
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

/// Kernel model search space and optimizer limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelSettings {
    /// RBF widths tried, as multiples of the median pairwise distance.
    pub sigma_factors: Vec<f64>,
    pub lambdas: Vec<f64>,
    /// Gradient-descent iteration cap per range call; each iteration costs a
    /// pass over the Gram matrix.
    pub max_gd_iters: usize,
    pub support_tau: f64,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self {
            sigma_factors: vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            lambdas: vec![1e-3, 1e-2, 1e-1, 1.0],
            max_gd_iters: 300,
            support_tau: DEFAULT_SUPPORT_TAU,
        }
    }
}

/// Everything a method needs beyond the training rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodSettings {
    pub sla: SlaConfig,
    pub slam: SlamSpace,
    pub bblr4: Bblr4Options,
    /// Penalties searched by inner validation for the untuned methods.
    pub lambdas: Vec<f64>,
    /// Skips the inner search and uses this penalty.
    pub fixed_lambda: Option<f64>,
    pub inner_folds: usize,
    pub kernel: KernelSettings,
}

impl Default for MethodSettings {
    fn default() -> Self {
        let slam = SlamSpace::default();
        Self {
            sla: SlaConfig::default(),
            lambdas: slam.lambdas.clone(),
            inner_folds: slam.folds,
            slam,
            bblr4: Bblr4Options::default(),
            fixed_lambda: None,
            kernel: KernelSettings::default(),
        }
    }
}

impl MethodSettings {
    pub fn validate(&self) -> Result<()> {
        self.sla.validate()?;
        if self.inner_folds < 2 {
            return Err(Error::Config("inner_folds must be at least 2".into()));
        }
        if self.fixed_lambda.is_none() && self.lambdas.is_empty() {
            return Err(Error::Config("no penalty candidates".into()));
        }
        if self.kernel.sigma_factors.iter().any(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::Config("kernel width factors must be positive".into()));
        }
        Ok(())
    }

    fn kernel_cfg(&self) -> SlaConfig {
        SlaConfig {
            max_gd_iters: self.kernel.max_gd_iters,
            ..self.sla.clone()
        }
    }
}

/// A fitted model of any method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trained {
    Linear {
        model: LinearModel,
        /// Absent for the sigmoid loss, which has no plateau parameters.
        hyper: Option<BBHyper>,
        lambda: f64,
        report: Option<FitReport>,
    },
    Kernel {
        model: KernelModel,
        hyper: BBHyper,
        lambda: f64,
        report: FitReport,
        mixture: Option<MixturePrior>,
        support: usize,
    },
}

impl Trained {
    pub fn predict(&self, data: &Dataset) -> Result<Vec<u8>> {
        match self {
            Trained::Linear { model, .. } => model.predict_labels(data),
            Trained::Kernel { model, .. } => {
                if data.dim() != model.inputs.first().map_or(data.dim(), Vec::len) {
                    return Err(Error::DimensionMismatch {
                        expected: model.inputs[0].len(),
                        got: data.dim(),
                    });
                }
                Ok(model.predict_labels(data))
            }
        }
    }

    pub fn support_count(&self) -> Option<usize> {
        match self {
            Trained::Linear { .. } => None,
            Trained::Kernel { support, .. } => Some(*support),
        }
    }

    pub fn lambda(&self) -> f64 {
        match self {
            Trained::Linear { lambda, .. } | Trained::Kernel { lambda, .. } => *lambda,
        }
    }
}

fn choose_lambda(train: &Dataset, lik: Likelihood, settings: &MethodSettings, seed: u64) -> Result<f64> {
    match settings.fixed_lambda {
        Some(l) => Ok(l),
        None => Ok(tune_lambda(
            Basis::Linear(train),
            train.labels(),
            lik,
            &settings.lambdas,
            settings.inner_folds,
            seed,
            &settings.sla,
        )?
        .lambda),
    }
}

fn empirical_hyper(train: &Dataset) -> Result<BBHyper> {
    let (neg, pos) = train.class_counts();
    BBHyper::from_class_counts(neg, pos, 1.0)
}

/// Gradient-descent logistic regression at penalty `lambda`, from zero.
pub fn fit_logistic(train: &Dataset, lambda: f64, cfg: &SlaConfig) -> Result<LinearModel> {
    let design = Design::linear(train);
    let prior = Prior::L2 { lambda };
    let obj = DataObjective::new(&design, train.labels(), Likelihood::Logistic, &prior);
    LinearModel::new(vanilla_grad_desc(&obj, &vec![0.0; design.p()], cfg)?.coef)
}

fn fit_untuned(train: &Dataset, lik: Likelihood, hyper: Option<BBHyper>, settings: &MethodSettings, seed: u64) -> Result<Trained> {
    let lambda = choose_lambda(train, lik, settings, seed)?;
    let design = Design::linear(train);
    let start = vec![0.0; design.p()];
    let report = find_sla_solution(&design, train.labels(), lik, &Prior::L2 { lambda }, &start, &settings.sla)?;
    let hyper = match (hyper, report.final_gamma()) {
        (Some(h), Some(g)) => Some(h.with_gamma(g)?),
        (h, _) => h,
    };
    Ok(Trained::Linear {
        model: LinearModel::new(report.coef.clone())?,
        hyper,
        lambda,
        report: Some(report),
    })
}

fn from_tuned(t: &TunedFit) -> Result<Trained> {
    let gamma = t.report.final_gamma().unwrap_or(t.hyper.gamma());
    Ok(Trained::Linear {
        model: LinearModel::new(t.report.coef.clone())?,
        hyper: Some(t.hyper.with_gamma(gamma)?),
        lambda: t.lambda,
        report: Some(t.report.clone()),
    })
}

struct KernelFit {
    spec: KernelSpec,
    gram: Gram,
    lambda: f64,
    hyper: BBHyper,
    report: FitReport,
}

/// Picks the RBF width and penalty by inner validation of gradient-descent
/// fits, then runs the annealed fit on all training rows.
fn fit_kernel_l2(train: &Dataset, settings: &MethodSettings, seed: u64) -> Result<KernelFit> {
    let cfg = settings.kernel_cfg();
    let hyper = empirical_hyper(train)?;
    let lik = Likelihood::Plateau(PlateauLik::new(&hyper));
    let median = median_pairwise_distance(train);
    let median = if median > 0.0 { median } else { 1.0 };

    let mut best: Option<(f64, KernelSpec, Gram, f64)> = None;
    for &factor in &settings.kernel.sigma_factors {
        let spec = KernelSpec::rbf(factor * median)?;
        let g = gram(train, &spec)?;
        let (lambda, acc) = match settings.fixed_lambda {
            Some(l) if settings.kernel.sigma_factors.len() == 1 => (l, 0.0),
            _ => {
                let c = tune_lambda(
                    Basis::Kernel(&g),
                    train.labels(),
                    lik,
                    &settings.kernel.lambdas,
                    settings.inner_folds,
                    seed,
                    &cfg,
                )?;
                (c.lambda, c.accuracy)
            }
        };
        if best.as_ref().map_or(true, |b| acc > b.0) {
            best = Some((acc, spec, g, lambda));
        }
    }
    let (_, spec, g, lambda) = best.ok_or_else(|| Error::Config("no kernel widths to try".into()))?;
    let design = Design::kernel(&g);
    let prior = Prior::L2 { lambda };
    let obj = DataObjective::new(&design, train.labels(), lik, &prior);
    let start = vanilla_grad_desc(&obj, &vec![0.0; design.p()], &cfg)?.coef;
    let report = find_sla_solution(&design, train.labels(), lik, &prior, &start, &cfg)?;
    Ok(KernelFit {
        spec,
        gram: g,
        lambda,
        hyper,
        report,
    })
}

fn kernel_trained(train: &Dataset, k: &KernelFit, report: FitReport, mixture: Option<MixturePrior>, tau: f64) -> Result<Trained> {
    let gamma = report.final_gamma().unwrap_or(1.0);
    Ok(Trained::Kernel {
        support: support_count(&report.coef, tau),
        model: KernelModel::from_dataset(report.coef.clone(), k.spec, train)?,
        hyper: k.hyper.with_gamma(gamma)?,
        lambda: k.lambda,
        report,
        mixture,
    })
}

fn shared<T>(slot: &mut Option<std::result::Result<T, String>>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    let r = slot.get_or_insert_with(|| f().map_err(|e| e.to_string()));
    r.as_ref().map_err(|e| Error::Numeric(e.clone()))
}

/// Fits several methods on the same training rows. `Bblr4` starts from the
/// `Bblr3` fit and `SparseKbblr` from the `Kbblr` fit, so requesting both
/// costs little more than the larger one.
pub fn fit_methods(methods: &[Method], train: &Dataset, settings: &MethodSettings, seed: u64) -> Vec<Result<Trained>> {
    if let Err(e) = settings.validate().and_then(|_| train.require_both_classes()) {
        let msg = e.to_string();
        return methods.iter().map(|_| Err(Error::Config(msg.clone()))).collect();
    }
    let mut bblr3: Option<std::result::Result<TunedFit, String>> = None;
    let mut kernel: Option<std::result::Result<KernelFit, String>> = None;
    let mut out = Vec::with_capacity(methods.len());
    for &m in methods {
        let r = match m {
            Method::Lr => choose_lambda(train, Likelihood::Logistic, settings, seed).and_then(|lambda| {
                Ok(Trained::Linear {
                    model: fit_logistic(train, lambda, &settings.sla)?,
                    hyper: Some(BBHyper::logistic(1.0)),
                    lambda,
                    report: None,
                })
            }),
            Method::SlaSigmoid => fit_untuned(train, Likelihood::Sigmoid { gamma: 1.0 }, None, settings, seed),
            Method::Bblr1 => BBHyper::new(1.0, 1.0, 100.0, 1.0)
                .and_then(|h| fit_untuned(train, Likelihood::Plateau(PlateauLik::new(&h)), Some(h), settings, seed)),
            Method::Bblr2 => empirical_hyper(train)
                .and_then(|h| fit_untuned(train, Likelihood::Plateau(PlateauLik::new(&h)), Some(h), settings, seed)),
            Method::Bblr3 => shared(&mut bblr3, || {
                fit_bblr3(train, &empirical_hyper(train)?, &settings.slam, &settings.sla, seed)
            })
            .and_then(from_tuned),
            Method::Bblr4 => shared(&mut bblr3, || {
                fit_bblr3(train, &empirical_hyper(train)?, &settings.slam, &settings.sla, seed)
            })
            .and_then(|base| fit_bblr4(train, base, &settings.bblr4, seed))
            .and_then(|f| from_tuned(&f.fit)),
            Method::Kbblr => shared(&mut kernel, || fit_kernel_l2(train, settings, seed))
                .and_then(|k| kernel_trained(train, k, k.report.clone(), None, settings.kernel.support_tau)),
            Method::SparseKbblr => shared(&mut kernel, || fit_kernel_l2(train, settings, seed)).and_then(|k| {
                let design = Design::kernel(&k.gram);
                let lik = Likelihood::Plateau(PlateauLik::new(&k.hyper));
                let (report, mix) =
                    find_sla_solution_sparse(&design, train.labels(), lik, &k.report.coef, None, &settings.kernel_cfg())?;
                kernel_trained(train, k, report, Some(mix), settings.kernel.support_tau)
            }),
        };
        out.push(r);
    }
    out
}

pub fn fit_method(method: Method, train: &Dataset, settings: &MethodSettings, seed: u64) -> Result<Trained> {
    fit_methods(&[method], train, settings, seed).pop().expect("one result per method")
}
