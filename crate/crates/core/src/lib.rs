//! Beta-Bernoulli logistic classifiers: a smooth, bounded approximation of the
//! zero-one loss, linear and kernel models built on it, sparsity-inducing
//! priors, annealed non-convex optimizers and an evaluation harness.

pub mod data;
pub mod error;
pub mod eval;
pub mod hyper;
pub mod kernel;
pub mod logistic;
pub mod losses;
pub mod model;
pub mod numeric;
pub mod optim;
pub mod prior;

pub use error::{Error, Result};
pub use hyper::BBHyper;
pub use kernel::{KernelModel, KernelSpec};
pub use model::LinearModel;
pub use prior::{MixturePrior, Prior};
