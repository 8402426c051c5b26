//! Browser bindings: loss curves, the probability curve of the plateau model,
//! and training on a handful of 2-D points.

use wasm_bindgen::prelude::*;

use bblr::data::Dataset;
use bblr::losses::{loss_curve, LossKind, PlateauConstants, Target};
use bblr::model::PlateauLik;
use bblr::optim::{find_sla_solution, vanilla_grad_desc, DataObjective, Design, Likelihood, SlaConfig};
use bblr::{BBHyper, Prior};

fn kind_of(name: &str, a: f64, b: f64) -> bblr::Result<LossKind> {
    Ok(match name {
        "logistic" => LossKind::Logistic,
        "hinge" => LossKind::Hinge,
        "zero_one" => LossKind::ZeroOne,
        "sigmoid" => LossKind::Sigmoid,
        "gen_logistic" => LossKind::GenLogistic,
        "bbgamma" => LossKind::BetaBernoulli {
            plateau: PlateauConstants::new(a, b)?,
            target: Target::Positive,
        },
        other => return Err(bblr::Error::Config(format!("unknown loss '{other}'"))),
    })
}

/// Loss values for each sharpness in `gammas`, concatenated; each block has
/// `points` values on an even grid over `[z_min, z_max]`.
pub fn loss_curves_native(kind: &str, gammas: &[f64], a: f64, b: f64, z_min: f64, z_max: f64, points: usize) -> bblr::Result<Vec<f64>> {
    let kind = kind_of(kind, a, b)?;
    let mut out = Vec::with_capacity(gammas.len() * points);
    for &g in gammas {
        out.extend(loss_curve(kind, g, z_min, z_max, points)?.into_iter().map(|(_, l)| l));
    }
    Ok(out)
}

/// `mu(s) = w theta_B + (1 - w) sigmoid(gamma s)` on an even grid.
pub fn mu_curve_native(w: f64, theta_b: f64, gamma: f64, s_min: f64, s_max: f64, points: usize) -> bblr::Result<Vec<f64>> {
    let h = BBHyper::from_mixing(w, theta_b, 1.0, gamma)?;
    let lik = PlateauLik::new(&h);
    let step = (s_max - s_min) / (points.max(2) - 1) as f64;
    Ok((0..points).map(|i| lik.mu(s_min + step * i as f64)).collect())
}

/// Fits `[w1, w2, bias]` to 2-D points. `method` is `lr` (gradient descent)
/// or `bblr` (annealed fit with the empirical class-count prior, started from
/// zero).
pub fn train_points_native(xs: &[f64], ys: &[f64], labels: &[u8], method: &str, lambda: f64) -> bblr::Result<Vec<f64>> {
    let rows: Vec<Vec<f64>> = xs.iter().zip(ys).map(|(&x, &y)| vec![x, y]).collect();
    let data = Dataset::from_rows(&rows, labels.to_vec())?;
    data.require_both_classes()?;
    let design = Design::linear(&data);
    let prior = Prior::L2 { lambda };
    let cfg = SlaConfig::default();
    let start = vec![0.0; design.p()];
    match method {
        "lr" => {
            let obj = DataObjective::new(&design, data.labels(), Likelihood::Logistic, &prior);
            Ok(vanilla_grad_desc(&obj, &start, &cfg)?.coef)
        }
        "bblr" => {
            let (neg, pos) = data.class_counts();
            let h = BBHyper::from_class_counts(neg, pos, 1.0)?;
            let lik = Likelihood::Plateau(PlateauLik::new(&h));
            Ok(find_sla_solution(&design, data.labels(), lik, &prior, &start, &cfg)?.coef)
        }
        other => Err(bblr::Error::Config(format!("unknown method '{other}'"))),
    }
}

fn js(e: bblr::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn loss_curves(kind: &str, gammas: Vec<f64>, a: f64, b: f64, z_min: f64, z_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    loss_curves_native(kind, &gammas, a, b, z_min, z_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn mu_curve(w: f64, theta_b: f64, gamma: f64, s_min: f64, s_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    mu_curve_native(w, theta_b, gamma, s_min, s_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn train_points(xs: Vec<f64>, ys: Vec<f64>, labels: Vec<u8>, method: &str, lambda: f64) -> Result<Vec<f64>, JsError> {
    train_points_native(&xs, &ys, &labels, method, lambda).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_shapes() {
        let v = loss_curves_native("bbgamma", &[1.0, 8.0], 0.0098, 0.9804, -4.0, 4.0, 11).unwrap();
        assert_eq!(v.len(), 22);
        assert!(v.iter().all(|x| x.is_finite() && *x >= 0.0));
        assert!(loss_curves_native("nope", &[1.0], 0.0, 1.0, -1.0, 1.0, 3).is_err());
        let mu = mu_curve_native(0.2, 0.5, 4.0, -3.0, 3.0, 7).unwrap();
        assert!((mu[3] - 0.5).abs() < 1e-12);
        assert!(mu.iter().all(|m| (0.1..=0.9).contains(m)));
    }

    #[test]
    fn separable_points() {
        let xs = [-2.0, -1.5, -1.0, 1.0, 1.5, 2.0];
        let ys = [0.3, -0.2, 0.1, -0.1, 0.2, 0.0];
        let labels = [0, 0, 0, 1, 1, 1];
        for m in ["lr", "bblr"] {
            let w = train_points_native(&xs, &ys, &labels, m, 1e-2).unwrap();
            for i in 0..6 {
                let s = w[0] * xs[i] + w[1] * ys[i] + w[2];
                assert_eq!(u8::from(s >= 0.0), labels[i], "{m}");
            }
        }
    }
}
