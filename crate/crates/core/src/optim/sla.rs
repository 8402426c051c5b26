use serde::{Deserialize, Serialize};

use super::config::SlaConfig;
use super::objective::{DataObjective, Design, Likelihood, Objective};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::hyper::BBHyper;
use crate::model::{LinearModel, PlateauLik};
use crate::prior::Prior;

#[derive(Clone, Debug, PartialEq)]
pub struct GdOutcome {
    pub coef: Vec<f64>,
    pub value: f64,
    pub iters: usize,
}

/// Fixed-step gradient ascent. The step starts at `rG_max` and shrinks by
/// `r_G` whenever a step fails to improve; descent stops when the step falls
/// below `rG_min`, the gradient is below `eps_G`, or a step gains less than
/// `eps_L`.
pub fn vanilla_grad_desc<O: Objective>(obj: &O, start: &[f64], cfg: &SlaConfig) -> Result<GdOutcome> {
    let mut v = start.to_vec();
    let mut cache = obj.prepare(&v);
    let mut cur = obj.value(&v, &cache);
    if !cur.is_finite() {
        return Err(Error::Numeric("objective is not finite at the start point".into()));
    }
    let mut rate = cfg.rg_max;
    let mut iters = 0;
    let mut cand = vec![0.0; v.len()];
    'outer: while iters < cfg.max_gd_iters {
        let g = obj.gradient(&v, &cache);
        if g.iter().fold(0.0f64, |m, x| m.max(x.abs())) < cfg.eps_g {
            break;
        }
        loop {
            for ((c, x), d) in cand.iter_mut().zip(&v).zip(&g) {
                *c = x + rate * d;
            }
            let cc = obj.prepare(&cand);
            let val = obj.value(&cand, &cc);
            iters += 1;
            if val > cur {
                let gain = val - cur;
                std::mem::swap(&mut v, &mut cand);
                cache = cc;
                cur = val;
                if gain < cfg.eps_l {
                    break 'outer;
                }
                break;
            }
            rate *= cfg.r_g;
            if rate < cfg.rg_min || iters >= cfg.max_gd_iters {
                break 'outer;
            }
        }
    }
    Ok(GdOutcome { coef: v, value: cur, iters })
}

/// Counters of one range optimization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RangeStats {
    pub gd_iters: usize,
    pub probes_tried: usize,
    pub probes_accepted: usize,
}

/// Probe offsets for one coordinate: `eps, -eps, 2 eps, -2 eps, ..., R, -R`.
pub fn probe_steps(radius: f64, spacing: f64) -> Vec<f64> {
    let k = (radius / spacing + 1e-9).floor().max(1.0) as usize;
    (1..=k).flat_map(|i| [i as f64 * spacing, -(i as f64) * spacing]).collect()
}

/// Coordinate probing from `v`. Coordinates are visited cyclically starting
/// at `*cursor`; the first offset that gains at least `eps_L` is applied and
/// the cursor left on that coordinate. Returns whether a probe was accepted;
/// `false` means a whole cycle of coordinates found nothing.
pub(crate) fn probe_pass<O: Objective>(
    obj: &O,
    v: &mut [f64],
    cache: &mut O::Cache,
    steps: &[f64],
    cfg: &SlaConfig,
    cursor: &mut usize,
    stats: &mut RangeStats,
) -> bool {
    let p = v.len();
    if p == 0 {
        return false;
    }
    let cur = obj.value(v, cache);
    for _ in 0..p {
        let j = *cursor;
        for &step in steps {
            stats.probes_tried += 1;
            if obj.probe(v, cache, j, step) - cur >= cfg.eps_l {
                obj.shift(v, cache, j, step);
                stats.probes_accepted += 1;
                return true;
            }
        }
        *cursor = (*cursor + 1) % p;
    }
    false
}

/// Gradient descent alternated with coordinate probing within `radius`:
/// every accepted probe restarts the descent, and the search ends when a full
/// cycle of probes finds no gain of at least `eps_L`.
pub fn grad_desc_in_range<O: Objective>(
    obj: &O,
    start: &[f64],
    radius: f64,
    spacing: f64,
    cfg: &SlaConfig,
) -> Result<(Vec<f64>, RangeStats)> {
    let steps = probe_steps(radius, spacing);
    let mut stats = RangeStats::default();
    let mut v = start.to_vec();
    let mut cursor = 0;
    loop {
        let gd = vanilla_grad_desc(obj, &v, cfg)?;
        stats.gd_iters += gd.iters;
        v = gd.coef;
        let mut cache = obj.prepare(&v);
        if !probe_pass(obj, &mut v, &mut cache, &steps, cfg, &mut cursor, &mut stats)
            || stats.probes_accepted >= cfg.max_probe_accepts
        {
            if stats.probes_accepted >= cfg.max_probe_accepts {
                let gd = vanilla_grad_desc(obj, &v, cfg)?;
                stats.gd_iters += gd.iters;
                v = gd.coef;
            }
            return Ok((v, stats));
        }
    }
}

/// One annealing stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub gamma: f64,
    pub radius: f64,
    pub spacing: f64,
    /// Mean penalized log-likelihood at the end of the stage.
    pub objective: f64,
    pub train_zero_one: usize,
    #[serde(flatten)]
    pub stats: RangeStats,
    /// Coefficients at the end of the stage.
    #[serde(skip)]
    pub coef: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub coef: Vec<f64>,
    pub trajectory: Vec<StageRecord>,
    pub probes_tried: usize,
    pub probes_accepted: usize,
    pub wall_clock_secs: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FitReport {
    pub fn final_gamma(&self) -> Option<f64> {
        self.trajectory.last().map(|s| s.gamma)
    }

    /// Report truncated after `stages` annealing stages.
    pub fn truncated(&self, stages: usize) -> FitReport {
        let trajectory: Vec<StageRecord> = self.trajectory.iter().take(stages).cloned().collect();
        let coef = trajectory.last().map_or_else(|| self.coef.clone(), |s| s.coef.clone());
        FitReport {
            coef,
            probes_tried: trajectory.iter().map(|s| s.stats.probes_tried).sum(),
            probes_accepted: trajectory.iter().map(|s| s.stats.probes_accepted).sum(),
            trajectory,
            wall_clock_secs: self.wall_clock_secs,
            seed: self.seed,
        }
    }
}

pub(crate) struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub(crate) fn secs(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.start.elapsed().as_secs_f64()
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

/// Runs `stage(gamma, coef, radius, spacing)` over the annealing schedule,
/// shrinking radius and spacing after each stage.
pub(crate) fn anneal(
    cfg: &SlaConfig,
    start: &[f64],
    mut stage: impl FnMut(f64, &[f64], f64, f64) -> Result<(Vec<f64>, RangeStats, f64, usize)>,
) -> Result<FitReport> {
    cfg.validate()?;
    let clock = Stopwatch::start();
    let mut coef = start.to_vec();
    let (mut radius, mut spacing) = (cfg.r0, cfg.eps_s0);
    let mut trajectory = Vec::new();
    for gamma in cfg.schedule() {
        let (next, stats, objective, train_zero_one) = stage(gamma, &coef, radius, spacing)?;
        if !objective.is_finite() {
            return Err(Error::NonFinite { gamma });
        }
        coef = next;
        trajectory.push(StageRecord {
            gamma,
            radius,
            spacing,
            objective,
            train_zero_one,
            stats,
            coef: coef.clone(),
        });
        radius *= cfg.r_r;
        spacing *= cfg.r_eps;
    }
    Ok(FitReport {
        coef,
        probes_tried: trajectory.iter().map(|s| s.stats.probes_tried).sum(),
        probes_accepted: trajectory.iter().map(|s| s.stats.probes_accepted).sum(),
        trajectory,
        wall_clock_secs: clock.secs(),
        seed: None,
    })
}

/// The annealed optimizer over a design matrix: range optimization at each
/// sharpness `gamma_min * r_gamma^k <= gamma_max`, with the probe radius and
/// spacing shrinking between stages.
pub fn find_sla_solution(
    design: &Design,
    labels: &[u8],
    lik: Likelihood,
    prior: &Prior,
    start: &[f64],
    cfg: &SlaConfig,
) -> Result<FitReport> {
    prior.validate()?;
    anneal(cfg, start, |gamma, coef, radius, spacing| {
        let obj = DataObjective::new(design, labels, lik.with_gamma(gamma), prior);
        let c0 = obj.prepare(coef);
        if !obj.value(coef, &c0).is_finite() {
            return Err(Error::NonFinite { gamma });
        }
        let (v, stats) = grad_desc_in_range(&obj, coef, radius, spacing, cfg)?;
        let c = obj.prepare(&v);
        Ok((v.clone(), stats, obj.value(&v, &c), obj.zero_one(&c.scores)))
    })
}

/// Linear Beta-Bernoulli fit with an L2 penalty; `hyper.gamma()` is ignored in
/// favour of the schedule.
pub fn fit_linear_sla(
    data: &Dataset,
    model0: &LinearModel,
    hyper: &BBHyper,
    l2: f64,
    cfg: &SlaConfig,
) -> Result<FitReport> {
    if model0.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            got: model0.dim(),
        });
    }
    let design = Design::linear(data);
    let prior = Prior::L2 { lambda: l2 };
    find_sla_solution(
        &design,
        data.labels(),
        Likelihood::Plateau(PlateauLik::new(hyper)),
        &prior,
        &model0.weights,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::objective::FnObjective;

    #[test]
    fn probe_order() {
        assert_eq!(probe_steps(0.6, 0.2).len(), 6);
        let s = probe_steps(0.6, 0.2);
        assert_eq!(s[0], 0.2);
        assert_eq!(s[1], -0.2);
        assert!((s[4] - 0.6).abs() < 1e-12 && (s[5] + 0.6).abs() < 1e-12);
    }

    #[test]
    fn quadratic_converges() {
        let target = [1.5, -2.0, 0.25];
        let obj = FnObjective {
            dim: 3,
            f: |v: &[f64]| -v.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            g: |v: &[f64]| v.iter().zip(&target).map(|(a, b)| -2.0 * (a - b)).collect(),
        };
        // the gain tolerance bounds the attainable accuracy to about sqrt(eps_L)
        let cfg = SlaConfig {
            eps_l: 1e-12,
            ..SlaConfig::default()
        };
        let out = vanilla_grad_desc(&obj, &[0.0; 3], &cfg).unwrap();
        for (a, b) in out.coef.iter().zip(&target) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_gradient_start_is_kept() {
        let obj = FnObjective {
            dim: 2,
            f: |_: &[f64]| 1.0,
            g: |_: &[f64]| vec![0.0, 0.0],
        };
        let out = vanilla_grad_desc(&obj, &[0.3, -0.2], &SlaConfig::default()).unwrap();
        assert_eq!(out.coef, vec![0.3, -0.2]);
    }

    #[test]
    fn first_improving_probe_wins() {
        // both +0.4 and -0.2 improve; -0.2 comes first in the enumeration
        let f = |v: &[f64]| {
            let x = v[0];
            if (x + 0.2).abs() < 1e-9 {
                1.0
            } else if (x - 0.4).abs() < 1e-9 {
                2.0
            } else {
                0.0
            }
        };
        let obj = FnObjective {
            dim: 1,
            f,
            g: |_: &[f64]| vec![0.0],
        };
        let cfg = SlaConfig::default();
        let mut v = vec![0.0];
        let mut cache = ();
        let mut stats = RangeStats::default();
        let mut cursor = 0;
        let steps = probe_steps(8.0, 0.2);
        assert!(probe_pass(&obj, &mut v, &mut cache, &steps, &cfg, &mut cursor, &mut stats));
        assert!((v[0] + 0.2).abs() < 1e-12);
    }
}
