//! Generalized Kumaraswamy distribution: evaluation, simulation, series
//! properties and likelihood inference.

pub mod error;
pub mod estim;
pub mod dist;
pub mod oracle;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
pub use dist::{
    apply_submodel, cdf, lgkw_pdf, log_pdf, pdf, power_transform_params, quantile, sample, sf,
    ParamName, Params, SubModel,
};
