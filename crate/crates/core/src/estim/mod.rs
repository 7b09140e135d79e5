//! Likelihood, maximum likelihood fitting and likelihood ratio tests.

mod data;
mod fit;
mod likelihood;
mod lrt;
mod optim;

pub use data::{shrink, DataSummary, Dataset};
pub use fit::{
    default_init, default_starts, fit, fit_family, fit_from_starts, std_errors, wald_std_errors, FitOptions, FitResult,
    DELTA_BOUNDARY, DELTA_EPS, LOG_BOUND,
};
pub use likelihood::{hessian, log_likelihood, observed_info, score};
pub use lrt::{lr_test, LrTestResult};
