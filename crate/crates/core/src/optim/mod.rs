//! Annealed non-convex optimization: gradient descent with coordinate probing
//! over a sharpness schedule, its sparse variant, validation-driven tuning of
//! its constants, and hyper-parameter learning.

mod bblr4;
mod config;
mod objective;
mod sla;
mod slam;
mod sparse;

pub use config::SlaConfig;
pub use objective::{DataObjective, Design, FnObjective, Likelihood, Objective, ScoreCache};
pub use sla::{
    find_sla_solution, fit_linear_sla, grad_desc_in_range, probe_steps, vanilla_grad_desc, FitReport,
    GdOutcome, RangeStats, StageRecord,
};
pub use slam::{correct_count, slam_tune, tune_lambda, Basis, GridChoice, SlamResult, SlamSpace};
pub use sparse::{find_sla_solution_sparse, grad_desc_in_range_sparse};
pub use bblr4::{fit_bblr3, fit_bblr4, project_mixing, training_rates, Bblr4Fit, Bblr4Options, TunedFit};
