// Test-side oracles shared by the integration suites and the acceptance
// harness. Nothing here calls into the code it checks except through the
// public functions under test.
#![allow(dead_code)]

use bblr::data::Dataset;
use bblr::eval::{binomial_upper_tail, mcnemar_z, ContingencyPair};
use bblr::kernel::{grad_alphas, gram, kernel_log_likelihood, KernelSpec};
use bblr::model::{grad_hyper, grad_weights, log_likelihood};
use bblr::prior::{grad_prior, log_prior};
use bblr::{BBHyper, LinearModel, MixturePrior, Prior};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fourth-order central difference.
pub fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-4 * x.abs().max(1.0);
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

fn fd_vec(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            fd(
                |v| {
                    let mut u = x.to_vec();
                    u[j] = v;
                    f(&u)
                },
                x[j],
            )
        })
        .collect()
}

/// `|num - ana| / max(|ana|, 1)` in the Euclidean norm.
pub fn rel_err(num: &[f64], ana: &[f64]) -> f64 {
    let diff: f64 = num.iter().zip(ana).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = ana.iter().map(|a| a * a).sum::<f64>().sqrt();
    diff / norm.max(1.0)
}

pub fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn random_data(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| gauss(rng)).collect()).collect();
    let mut labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    labels[0] = 0;
    labels[1] = 1;
    Dataset::from_rows(&rows, labels).unwrap()
}

/// Sharpness drawn log-uniformly from [1/4, 16].
pub fn random_hyper(rng: &mut ChaCha8Rng) -> BBHyper {
    let w = rng.gen_range(0.01..0.9);
    let t = rng.gen_range(0.05..0.95);
    let g = 2f64.powf(rng.gen_range(-2.0..=4.0));
    BBHyper::from_mixing(w, t, 50.0, g).unwrap()
}

/// Kept away from zero so the Laplace kink is never straddled.
fn away_from_zero(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    let a = rng.gen_range(0.05..1.0) * scale;
    if rng.gen() {
        a
    } else {
        -a
    }
}

fn random_mixture(rng: &mut ChaCha8Rng) -> MixturePrior {
    let sigma = rng.gen_range(0.2..3.0);
    let b = sigma * rng.gen_range(0.1..1.0);
    MixturePrior::new(rng.gen_range(0.05..0.95), sigma, b).unwrap()
}

pub fn worst_weight_gradient(seed: u64, instances: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let d = rng.gen_range(1..5);
        let n = rng.gen_range(5..40);
        let data = random_data(&mut rng, n, d);
        let hyper = random_hyper(&mut rng);
        let l2 = rng.gen_range(0.0..0.5);
        let w: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ana = grad_weights(&data, &LinearModel::new(w.clone()).unwrap(), &hyper, l2).unwrap();
        let num = fd_vec(|u| log_likelihood(&data, &LinearModel::new(u.to_vec()).unwrap(), &hyper, l2).unwrap(), &w);
        worst = worst.max(rel_err(&num, &ana));
    }
    worst
}

pub fn worst_hyper_gradient(seed: u64, instances: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let d = rng.gen_range(1..4);
        let n = rng.gen_range(5..40);
        let data = random_data(&mut rng, n, d);
        let h = random_hyper(&mut rng);
        let model = LinearModel::new((0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let ll = |h: &BBHyper| log_likelihood(&data, &model, h, 0.0).unwrap();
        let ana = grad_hyper(&data, &model, &h).unwrap();
        let num = [
            fd(|w| ll(&h.with_mixing(w, h.theta_b()).unwrap()), h.w()),
            fd(|t| ll(&h.with_mixing(h.w(), t).unwrap()), h.theta_b()),
            fd(|g| ll(&h.with_gamma(g).unwrap()), h.gamma()),
        ];
        worst = worst.max(rel_err(&num, &[ana.w, ana.theta_b, ana.gamma]));
    }
    worst
}

pub fn worst_mixture_prior_gradient(seed: u64, instances: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let prior = Prior::Mixture(random_mixture(&mut rng));
        let a: Vec<f64> = (0..rng.gen_range(1..10)).map(|_| away_from_zero(&mut rng, 3.0)).collect();
        let ana = grad_prior(&prior, &a).unwrap();
        let num = fd_vec(|u| log_prior(&prior, u).unwrap(), &a);
        worst = worst.max(rel_err(&num, &ana));
    }
    worst
}

pub fn worst_alpha_gradient(seed: u64, instances: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let n = rng.gen_range(3..25);
        let data = random_data(&mut rng, n, 2);
        let g = gram(&data, &KernelSpec::rbf(rng.gen_range(0.3..3.0)).unwrap()).unwrap();
        let hyper = random_hyper(&mut rng);
        let prior = match i % 3 {
            0 => Prior::None,
            1 => Prior::L2 { lambda: rng.gen_range(0.0..1.0) },
            _ => Prior::Mixture(random_mixture(&mut rng)),
        };
        let a: Vec<f64> = (0..data.len()).map(|_| away_from_zero(&mut rng, 0.5)).collect();
        let ana = grad_alphas(&g, data.labels(), &a, &hyper, &prior).unwrap();
        let num = fd_vec(|u| kernel_log_likelihood(&g, data.labels(), u, &hyper, &prior).unwrap(), &a);
        worst = worst.max(rel_err(&num, &ana));
    }
    worst
}

pub fn choose(n: u32, k: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * u128::from(n - i) / u128::from(i + 1);
    }
    c
}

/// Largest relative error of the floating-point binomial tail against exact
/// integer sums, over all `k <= n <= max_n` (`max_n <= 120`).
pub fn binomial_tail_error(max_n: u32) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=max_n {
        let total: u128 = 1 << n;
        for k in 0..=n {
            let tail: u128 = (k..=n).map(|i| choose(n, i)).sum();
            let want = tail as f64 / total as f64;
            let got = binomial_upper_tail(n as usize, k as usize);
            worst = worst.max((got - want).abs() / want);
        }
    }
    worst
}

/// Count pairs with `n01 + n10 <= max_n` whose significance decision differs
/// from the exact one-sided test at the 1% level (ties never significant),
/// decided in integers as `100 * tail <= 2^n`.
pub fn mcnemar_decision_mismatches(max_n: u32) -> Vec<(u32, u32)> {
    let mut bad = Vec::new();
    for n01 in 0..=max_n {
        for n10 in 0..=(max_n - n01) {
            let n = n01 + n10;
            let t = mcnemar_z(ContingencyPair::new(n01 as usize, n10 as usize));
            let expect = if n == 0 {
                false
            } else {
                let tail: u128 = (n01.max(n10)..=n).map(|i| choose(n, i)).sum();
                n01 != n10 && 100 * tail <= 1u128 << n
            };
            if t.significant != expect {
                bad.push((n01, n10));
            }
        }
    }
    bad
}
