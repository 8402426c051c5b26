//! Metrics, paired significance tests, the cross-validation harness and
//! reproduction of the benchmark tables.

mod cv;
mod methods;
mod metrics;
mod stats;
mod sweep;
pub mod tables;

pub use cv::{
    cross_validate, cross_validate_many, cross_validate_with, fold_seed, paired_contingency, pooled_against, CvOptions,
    CvReport, FoldContext, FoldFailure, FoldRecord,
};
pub use methods::{fit_logistic, fit_method, fit_methods, KernelSettings, Method, MethodSettings, Trained};
pub use metrics::{error_percent, zero_one_total};
pub use stats::{
    binomial_upper_tail, mcnemar_z, pooled_mcnemar, ContingencyPair, McNemar, EXACT_MAX_DISCORDANT, SIGNIFICANCE_LEVEL,
    Z_CRITICAL,
};
pub use sweep::{noise_sweep, sparsity_sweep, NoisePoint, SweepPoint};
pub use tables::{reproduce_table, reproduce_tables, Band, Column, Statistic, TableId, TableOptions, TableResult, UCI_DATASETS};

/// Runs `f` with fold and grid parallelism limited to `jobs` threads.
#[cfg(feature = "parallel")]
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Runs `f`; without the `parallel` feature everything is sequential.
#[cfg(not(feature = "parallel"))]
pub fn with_jobs<T: Send>(_jobs: usize, f: impl FnOnce() -> T + Send) -> crate::Result<T> {
    Ok(f())
}
