use gkw::estim::{FitResult, LrTestResult};
use gkw::{Params, SubModel};
use serde::{Deserialize, Serialize};

use crate::num::sig;

pub const SCHEMA: &str = "gkw-report/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: String,
    pub tool: String,
    pub seed: u64,
    pub data: DataBlock,
    pub fits: Vec<ModelFit>,
    pub lr_tests: Vec<LrRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DataBlock {
    pub source: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub variance: f64,
    pub percent: bool,
    pub shrink: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub se: Option<f64>,
    /// "value (se)".
    pub display: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: SubModel,
    pub theta_hat: Params,
    pub estimates: Vec<Estimate>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Absent when not finite.
    pub grad_norm: Option<f64>,
    pub boundary: bool,
    pub notes: Vec<String>,
}

impl ModelFit {
    pub fn from_fit(f: &FitResult) -> Self {
        let estimates = f
            .submodel
            .free_names()
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let value = f.theta_hat.get(p);
                let se = f.std_errors.as_ref().map(|s| s[k]);
                let shown = se.map_or("-".to_string(), |s| sig(s, 6));
                Estimate {
                    name: p.symbol().to_string(),
                    value,
                    se,
                    display: format!("{} ({})", sig(value, 6), shown),
                }
            })
            .collect();
        Self {
            model: f.submodel,
            theta_hat: f.theta_hat,
            estimates,
            loglik: f.loglik,
            converged: f.converged,
            iterations: f.iterations,
            grad_norm: f.grad_norm.is_finite().then_some(f.grad_norm),
            boundary: f.boundary,
            notes: f.notes.clone(),
        }
    }

    /// The parts of a [`FitResult`] an LR test needs.
    pub fn to_fit(&self) -> FitResult {
        FitResult {
            submodel: self.model,
            theta_hat: self.theta_hat,
            loglik: self.loglik,
            std_errors: None,
            converged: self.converged,
            iterations: self.iterations,
            grad_norm: self.grad_norm.unwrap_or(f64::INFINITY),
            boundary: self.boundary,
            start_index: 0,
            notes: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LrRow {
    pub null: SubModel,
    pub alt: SubModel,
    pub w: f64,
    pub df: usize,
    pub p_value: f64,
}

impl From<LrTestResult> for LrRow {
    fn from(r: LrTestResult) -> Self {
        Self {
            null: r.null_model,
            alt: r.alt_model,
            w: r.statistic_w,
            df: r.df,
            p_value: r.p_value,
        }
    }
}
