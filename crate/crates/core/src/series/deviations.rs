use serde::Serialize;

use super::coeffs::{mixture_coeffs, PowerSeries};
use super::control::{SeriesControl, SeriesReport, SeriesValue, Summer};
use super::moments::{fallback_opts, moment};
use crate::dist::{cdf, pdf, quantile, Params};
use crate::error::{Error, Result};
use crate::oracle::quad_with;

fn j_quadrature(theta: &Params, a: f64, first: &SeriesReport) -> SeriesValue {
    let q = quad_with(|t| a * t * pdf(theta, a * t), &fallback_opts());
    let mut report = SeriesReport::quadrature(q.err_estimate * a, q.reliable, "series did not converge; value from quadrature");
    for w in &first.warnings {
        report.warnings.push(w.clone());
    }
    SeriesValue {
        value: a * q.value,
        report,
    }
}

/// J(a) = ∫₀ᵃ x f(x) dx from the power-series density.
pub fn j_integral(theta: &Params, a: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain { what: "J-integral limit", value: a });
    }
    if a == 0.0 {
        return Ok(SeriesValue::exact(0.0));
    }
    if a == 1.0 {
        return moment(theta, 1.0, ctl);
    }
    let table = mixture_coeffs(theta, ctl);
    let first = match &table.v_status {
        PowerSeries::Available { .. } => {
            let alpha = theta.alpha();
            let la = a.ln();
            let mut s = Summer::new(ctl);
            let mut started = false;
            for (i, vi) in table.v.iter().enumerate() {
                if *vi == 0.0 && !started {
                    continue;
                }
                started = true;
                let e = (i as f64 + 1.0) * alpha + 1.0;
                if s.push(vi * (e * la).exp() / e) {
                    break;
                }
            }
            let (value, report) = s.finish("J-integral power series");
            if report.converged {
                return Ok(SeriesValue { value, report });
            }
            report
        }
        PowerSeries::Unavailable { reason } => {
            let mut r = SeriesReport::exact();
            r.converged = false;
            r.warnings.push(format!("power-series density unavailable: {reason}"));
            r
        }
    };
    Ok(j_quadrature(theta, a, &first))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanDeviations {
    /// About the mean.
    pub delta1: f64,
    /// About the median.
    pub delta2: f64,
    pub report: SeriesReport,
}

pub fn mean_deviations(theta: &Params, ctl: &SeriesControl) -> Result<MeanDeviations> {
    let mu = moment(theta, 1.0, ctl)?;
    let med = quantile(theta, 0.5)?;
    let jm = j_integral(theta, mu.value, ctl)?;
    let jmed = j_integral(theta, med, ctl)?;
    let mut report = mu.report.clone();
    report.absorb(&jm.report, 2.0);
    report.absorb(&jmed.report, 2.0);
    Ok(MeanDeviations {
        delta1: 2.0 * (mu.value * cdf(theta, mu.value) - jm.value),
        delta2: mu.value - 2.0 * jmed.value,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BonferroniLorenz {
    pub bonferroni: f64,
    pub lorenz: f64,
    pub report: SeriesReport,
}

pub fn bonferroni_lorenz(theta: &Params, p: f64, ctl: &SeriesControl) -> Result<BonferroniLorenz> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { what: "probability", value: p });
    }
    let mu = moment(theta, 1.0, ctl)?;
    let q = quantile(theta, p)?;
    let j = j_integral(theta, q, ctl)?;
    let mut report = mu.report.clone();
    report.absorb(&j.report, 1.0 / mu.value);
    let lorenz = j.value / mu.value;
    Ok(BonferroniLorenz {
        bonferroni: lorenz / p,
        lorenz,
        report,
    })
}
