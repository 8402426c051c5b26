use crate::data::Dataset;
use crate::kernel::Gram;
use crate::logistic;
use crate::model::{label_of, PlateauLik};
use crate::numeric::{sigmoid, sigmoid_slope};
use crate::prior::Prior;

/// A function to maximize. `Cache` holds whatever makes repeated evaluation
/// near a point cheap (for data objectives, the per-example scores).
pub trait Objective {
    type Cache: Clone;

    fn dim(&self) -> usize;
    fn prepare(&self, v: &[f64]) -> Self::Cache;
    fn value(&self, v: &[f64], cache: &Self::Cache) -> f64;
    fn gradient(&self, v: &[f64], cache: &Self::Cache) -> Vec<f64>;

    /// Value at `v` with coordinate `j` displaced by `step`.
    fn probe(&self, v: &[f64], _cache: &Self::Cache, j: usize, step: f64) -> f64 {
        let mut u = v.to_vec();
        u[j] += step;
        let c = self.prepare(&u);
        self.value(&u, &c)
    }

    /// Moves coordinate `j` by `step`, updating the cache.
    fn shift(&self, v: &mut [f64], cache: &mut Self::Cache, j: usize, step: f64) {
        v[j] += step;
        *cache = self.prepare(v);
    }
}

/// An objective given by plain value and gradient closures.
pub struct FnObjective<F, G> {
    pub dim: usize,
    pub f: F,
    pub g: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    type Cache = ();

    fn dim(&self) -> usize {
        self.dim
    }
    fn prepare(&self, _v: &[f64]) {}
    fn value(&self, v: &[f64], _: &()) -> f64 {
        (self.f)(v)
    }
    fn gradient(&self, v: &[f64], _: &()) -> Vec<f64> {
        (self.g)(v)
    }
}

/// Column-major `n x p` matrix mapping coefficients to per-example scores:
/// the feature matrix with a trailing column of ones for linear models, the
/// Gram matrix for kernel models.
#[derive(Clone, Debug, PartialEq)]
pub struct Design {
    n: usize,
    p: usize,
    cols: Vec<f64>,
}

impl Design {
    pub fn linear(data: &Dataset) -> Self {
        let n = data.len();
        let d = data.dim();
        let mut cols = vec![0.0; n * (d + 1)];
        for i in 0..n {
            data.for_each_in_row(i, |j, x| cols[j * n + i] = x);
        }
        cols[d * n..].iter_mut().for_each(|c| *c = 1.0);
        Self { n, p: d + 1, cols }
    }

    pub fn kernel(g: &Gram) -> Self {
        // symmetric: columns are rows
        Self {
            n: g.n(),
            p: g.n(),
            cols: g.values().to_vec(),
        }
    }

    /// Cross-kernel design: `rows x cols` block of a Gram matrix, for
    /// training on a subset while scoring another subset.
    pub fn kernel_block(g: &Gram, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &j in cols {
            let r = g.row(j);
            out.extend(rows.iter().map(|&i| r[i]));
        }
        Self {
            n: rows.len(),
            p: cols.len(),
            cols: out,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j * self.n..(j + 1) * self.n]
    }

    pub fn scores(&self, v: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                for (si, x) in s.iter_mut().zip(self.col(j)) {
                    *si += vj * x;
                }
            }
        }
        s
    }

    /// `Phi' r`
    pub fn transpose_dot(&self, r: &[f64]) -> Vec<f64> {
        (0..self.p)
            .map(|j| self.col(j).iter().zip(r).map(|(x, r)| x * r).sum())
            .collect()
    }
}

/// Per-example log-likelihood in the raw score, before summing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Likelihood {
    Plateau(PlateauLik),
    /// Reference logistic regression (no sharpness).
    Logistic,
    /// Negated sigmoid loss `-(1 + exp(gamma t s))^-1`.
    Sigmoid { gamma: f64 },
}

impl Likelihood {
    pub fn with_gamma(self, gamma: f64) -> Self {
        match self {
            Likelihood::Plateau(p) => Likelihood::Plateau(PlateauLik { gamma, ..p }),
            Likelihood::Logistic => Likelihood::Logistic,
            Likelihood::Sigmoid { .. } => Likelihood::Sigmoid { gamma },
        }
    }

    #[inline]
    pub fn ll(&self, y: u8, s: f64) -> f64 {
        match self {
            Likelihood::Plateau(p) => p.ll(y, s),
            Likelihood::Logistic => logistic::point_ll(y, s),
            Likelihood::Sigmoid { gamma } => {
                let t = if y == 1 { 1.0 } else { -1.0 };
                -sigmoid(-gamma * t * s)
            }
        }
    }

    #[inline]
    pub fn dll(&self, y: u8, s: f64) -> f64 {
        match self {
            Likelihood::Plateau(p) => p.dll(y, s),
            Likelihood::Logistic => logistic::point_dll(y, s),
            Likelihood::Sigmoid { gamma } => {
                let t = if y == 1 { 1.0 } else { -1.0 };
                gamma * t * sigmoid_slope(gamma * t * s)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScoreCache {
    pub scores: Vec<f64>,
    pub prior_sum: f64,
}

/// Mean penalized log-likelihood `(sum_i ll(y_i, s_i) + log prior(v)) / n`
/// with `s = Phi v`. Dividing by `n` keeps step sizes and tolerances
/// comparable across dataset sizes without moving the optimum.
pub struct DataObjective<'a> {
    pub design: &'a Design,
    pub labels: &'a [u8],
    pub lik: Likelihood,
    pub prior: &'a Prior,
}

impl<'a> DataObjective<'a> {
    pub fn new(design: &'a Design, labels: &'a [u8], lik: Likelihood, prior: &'a Prior) -> Self {
        debug_assert_eq!(design.n(), labels.len());
        Self {
            design,
            labels,
            lik,
            prior,
        }
    }

    fn inv_n(&self) -> f64 {
        1.0 / self.labels.len().max(1) as f64
    }

    pub fn data_ll(&self, scores: &[f64]) -> f64 {
        scores.iter().zip(self.labels).map(|(&s, &y)| self.lik.ll(y, s)).sum()
    }

    /// Gradient of the mean log-likelihood alone (no prior).
    pub fn data_gradient(&self, cache: &ScoreCache) -> Vec<f64> {
        let r: Vec<f64> = cache
            .scores
            .iter()
            .zip(self.labels)
            .map(|(&s, &y)| self.lik.dll(y, s))
            .collect();
        let mut g = self.design.transpose_dot(&r);
        let k = self.inv_n();
        g.iter_mut().for_each(|x| *x *= k);
        g
    }

    pub fn zero_one(&self, scores: &[f64]) -> usize {
        scores.iter().zip(self.labels).filter(|(&s, &y)| label_of(s) != y).count()
    }

    pub fn with_lik(&self, lik: Likelihood) -> DataObjective<'a> {
        DataObjective { lik, ..*self }
    }

    pub fn with_prior<'b>(&self, prior: &'b Prior) -> DataObjective<'b>
    where
        'a: 'b,
    {
        DataObjective {
            design: self.design,
            labels: self.labels,
            lik: self.lik,
            prior,
        }
    }
}

impl Objective for DataObjective<'_> {
    type Cache = ScoreCache;

    fn dim(&self) -> usize {
        self.design.p()
    }

    fn prepare(&self, v: &[f64]) -> ScoreCache {
        ScoreCache {
            scores: self.design.scores(v),
            prior_sum: v.iter().map(|&a| self.prior.coord(a)).sum(),
        }
    }

    fn value(&self, _v: &[f64], c: &ScoreCache) -> f64 {
        (self.data_ll(&c.scores) + c.prior_sum) * self.inv_n()
    }

    fn gradient(&self, v: &[f64], c: &ScoreCache) -> Vec<f64> {
        let mut g = self.data_gradient(c);
        let k = self.inv_n();
        for (gj, &vj) in g.iter_mut().zip(v) {
            *gj += self.prior.coord_grad(vj) * k;
        }
        g
    }

    fn probe(&self, v: &[f64], c: &ScoreCache, j: usize, step: f64) -> f64 {
        let col = self.design.col(j);
        let mut ll = 0.0;
        for ((&s, &x), &y) in c.scores.iter().zip(col).zip(self.labels) {
            ll += self.lik.ll(y, s + step * x);
        }
        let prior = c.prior_sum - self.prior.coord(v[j]) + self.prior.coord(v[j] + step);
        (ll + prior) * self.inv_n()
    }

    fn shift(&self, v: &mut [f64], c: &mut ScoreCache, j: usize, step: f64) {
        c.prior_sum += self.prior.coord(v[j] + step) - self.prior.coord(v[j]);
        v[j] += step;
        for (s, &x) in c.scores.iter_mut().zip(self.design.col(j)) {
            *s += step * x;
        }
    }
}
