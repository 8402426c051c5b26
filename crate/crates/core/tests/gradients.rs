// Analytic gradients against a fourth-order central difference on random
// problems with sharpness up to 16.

mod common;

const INSTANCES: usize = 120;
const TOL: f64 = 1e-6;

#[test]
fn weight_gradient() {
    let worst = common::worst_weight_gradient(11, INSTANCES);
    assert!(worst < TOL, "worst relative error {worst:e}");
}

#[test]
fn hyper_gradient() {
    let worst = common::worst_hyper_gradient(12, INSTANCES);
    assert!(worst < TOL, "worst relative error {worst:e}");
}

#[test]
fn mixture_prior_gradient() {
    let worst = common::worst_mixture_prior_gradient(13, INSTANCES);
    assert!(worst < TOL, "worst relative error {worst:e}");
}

#[test]
fn kernel_alpha_gradient() {
    let worst = common::worst_alpha_gradient(14, INSTANCES);
    assert!(worst < TOL, "worst relative error {worst:e}");
}
