use serde::Serialize;

use super::fit::FitResult;
use crate::dist::SubModel;
use crate::error::{Error, Result};
use crate::specfun::chi_square_sf;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrTestResult {
    pub statistic_w: f64,
    pub df: usize,
    pub p_value: f64,
    pub null_model: SubModel,
    pub alt_model: SubModel,
}

/// Likelihood ratio test of `null_fit` against the larger `alt_fit`.
///
/// Two fits of the same constraint pattern (Mc and BP, or a model against
/// itself) give df = 0 and p = 1.
pub fn lr_test(null_fit: &FitResult, alt_fit: &FitResult) -> Result<LrTestResult> {
    let (null, alt) = (null_fit.submodel, alt_fit.submodel);
    if !null.nested_in(alt) {
        return Err(Error::NotNested(format!("{null} is not a special case of {alt}")));
    }
    let df = alt.free_count() - null.free_count();
    let w = (2.0 * (alt_fit.loglik - null_fit.loglik)).max(0.0);
    let p_value = if df == 0 { 1.0 } else { chi_square_sf(w, df as f64)? };
    Ok(LrTestResult {
        statistic_w: w,
        df,
        p_value,
        null_model: null,
        alt_model: alt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Params;

    fn fake(sub: SubModel, loglik: f64) -> FitResult {
        FitResult {
            submodel: sub,
            theta_hat: sub.project(&Params::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()),
            loglik,
            std_errors: None,
            converged: true,
            iterations: 0,
            grad_norm: 0.0,
            boundary: false,
            start_index: 0,
            notes: vec![],
        }
    }

    #[test]
    fn recipe() {
        let r = lr_test(&fake(SubModel::Beta, 10.0), &fake(SubModel::GKw, 10.0)).unwrap();
        assert_eq!((r.statistic_w, r.df, r.p_value), (0.0, 3, 1.0));
        let r = lr_test(&fake(SubModel::BKw, 0.0), &fake(SubModel::GKw, 3.841 / 2.0)).unwrap();
        assert_eq!(r.df, 1);
        assert!((r.p_value - 0.05).abs() < 1e-4, "{r:?}");
        let r = lr_test(&fake(SubModel::Kw, 5.0), &fake(SubModel::Kw, 5.0)).unwrap();
        assert_eq!((r.statistic_w, r.df, r.p_value), (0.0, 0, 1.0));
        // slightly negative gap from optimizer slack is clamped
        let r = lr_test(&fake(SubModel::Kw, 5.0), &fake(SubModel::EKw, 5.0 - 1e-9)).unwrap();
        assert_eq!(r.statistic_w, 0.0);
    }

    #[test]
    fn non_nested_rejected() {
        let r = lr_test(&fake(SubModel::Kw, 0.0), &fake(SubModel::Beta, 1.0));
        assert!(matches!(r, Err(Error::NotNested(_))));
        let r = lr_test(&fake(SubModel::GKw, 0.0), &fake(SubModel::Kw, 1.0));
        assert!(matches!(r, Err(Error::NotNested(_))));
    }
}
