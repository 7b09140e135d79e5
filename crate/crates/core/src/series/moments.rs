use serde::Serialize;

use super::coeffs::{as_small_int, mixture_coeffs, omega_with_report, AltBinom, PowerSeries};
use super::control::{SeriesControl, SeriesReport, SeriesValue, Summer};
use crate::error::{Error, Result};
use crate::dist::{pdf, Params};
use crate::oracle::{quad_with, QuadOptions};
use crate::specfun::{lbeta, lgamma, reg_gamma_pq};

pub(crate) fn fallback_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    }
}

/// ∫₀¹ g(x) f(x; θ) dx by quadrature, packaged as a flagged fallback.
pub(crate) fn quad_fallback<G: Fn(f64) -> f64>(theta: &Params, g: G, first: &SeriesReport) -> SeriesValue {
    let q = quad_with(|x| g(x) * pdf(theta, x), &fallback_opts());
    let mut report = SeriesReport::quadrature(q.err_estimate, q.reliable, "series did not converge; value from quadrature");
    for w in &first.warnings {
        report.warnings.push(w.clone());
    }
    SeriesValue {
        value: q.value,
        report,
    }
}

pub(crate) fn snap(x: f64) -> f64 {
    as_small_int(x).map_or(x, |m| m as f64)
}

/// E_j - 1 for the exponentiated Kumaraswamy component with power `psi`,
/// by the binomial expansion of its cdf power. None when the alternating
/// terms cancel too badly to trust.
fn component_binomial(theta: &Params, r: f64, psi: f64, ctl: &SeriesControl) -> Option<(f64, SeriesReport)> {
    let (a, b) = (theta.alpha(), theta.beta());
    let phi = snap(psi - 1.0);
    let finite = as_small_int(phi).is_some_and(|m| m < ctl.max_terms);
    let mut s = Summer::new(ctl);
    let mut peak = 0.0f64;
    for (k, c) in AltBinom::new(phi).enumerate() {
        if c == 0.0 && finite {
            break;
        }
        let t = psi * b * c * lbeta(1.0 + r / a, (k as f64 + 1.0) * b).exp();
        peak = peak.max(t.abs());
        if s.push(t) {
            break;
        }
    }
    let (v, rep) = if finite { s.finish_finite() } else { s.finish("moment inner sum") };
    if !rep.converged || !v.is_finite() || peak > 1e4 * v.abs().max(1e-300) {
        return None;
    }
    Some((v - 1.0, rep))
}

/// E_j - 1 through x^r = (1 - (1 - x^α))^{r/α}; terms keep one sign
/// beyond m > r/α.
fn component_power(theta: &Params, r: f64, psi: f64, ctl: &SeriesControl) -> (f64, SeriesReport) {
    let (a, b) = (theta.alpha(), theta.beta());
    let sr = snap(r / a);
    let finite = as_small_int(sr).is_some_and(|m| m < ctl.max_terms);
    let mut s = Summer::new(ctl);
    for (m, c) in AltBinom::new(sr).enumerate().skip(1) {
        if c == 0.0 && finite {
            break;
        }
        let t = c * (psi.ln() + lbeta(psi, 1.0 + m as f64 / b)).exp();
        if s.push(t) {
            break;
        }
    }
    if finite {
        s.finish_finite()
    } else {
        s.finish("moment component sum")
    }
}

/// E_ψ[X^r] - 1 for the exponentiated Kumaraswamy component
/// ψ α β x^{α-1}(1-x^α)^{β-1} G(x)^{ψ-1}.
pub(crate) fn component_moment(theta: &Params, r: f64, psi: f64, ctl: &SeriesControl) -> (f64, SeriesReport) {
    if as_small_int(snap(r / theta.alpha())).is_some_and(|m| m < ctl.max_terms) {
        return component_power(theta, r, psi, ctl);
    }
    if as_small_int(snap(psi - 1.0)).is_some_and(|m| m < ctl.max_terms) {
        if let Some(v) = component_binomial(theta, r, psi, ctl) {
            return v;
        }
    }
    let p = component_power(theta, r, psi, ctl);
    if p.1.converged {
        return p;
    }
    component_binomial(theta, r, psi, ctl).unwrap_or(p)
}

/// Mixture over the cdf weights of the component moments:
/// μ'_r = 1 + Σ_j ω_j (E_j - 1), using Σ_j ω_j = 1.
fn moment_series(theta: &Params, r: f64, ctl: &SeriesControl) -> (f64, SeriesReport) {
    let (g, l) = (theta.gamma(), theta.lambda());
    let (omega, _) = omega_with_report(theta, ctl);
    let finite_outer = as_small_int(theta.delta()).is_some();
    let mut rep = SeriesReport::exact();
    let mut outer = Summer::new(ctl);
    outer.push(1.0);
    for (j, w) in omega.iter().enumerate() {
        let psi = l * (g + j as f64);
        let (e, irep) = component_moment(theta, r, psi, ctl);
        rep.absorb(&irep, *w);
        if outer.push(w * e) {
            break;
        }
    }
    let (v, orep) = if finite_outer {
        outer.finish_finite()
    } else {
        outer.finish("moment outer sum")
    };
    rep.absorb(&orep, 1.0);
    (v, rep)
}

/// r-th raw moment E[X^r], r > -α.
pub fn moment(theta: &Params, r: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    if !(r > -theta.alpha()) || !r.is_finite() {
        return Err(Error::Domain { what: "moment order", value: r });
    }
    if r == 0.0 {
        return Ok(SeriesValue::exact(1.0));
    }
    let (value, report) = moment_series(theta, r, ctl);
    if report.converged && value.is_finite() {
        return Ok(SeriesValue { value, report });
    }
    Ok(quad_fallback(theta, |x| x.powf(r), &report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralMoments {
    /// μ_1, ..., μ_s (μ_1 = 0).
    pub central: Vec<f64>,
    /// κ_1, ..., κ_s.
    pub cumulants: Vec<f64>,
    pub report: SeriesReport,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Cumulants from raw moments m[0] = 1, m[1], ..., m[6].
pub(crate) fn cumulants_from_raw(m: &[f64], up_to: usize) -> Vec<f64> {
    let g = |i: usize| m.get(i).copied().unwrap_or(f64::NAN);
    let (m1, m2, m3, m4, m5, m6) = (g(1), g(2), g(3), g(4), g(5), g(6));
    let all = [
        m1,
        m2 - m1 * m1,
        m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3),
        m4 - 4.0 * m3 * m1 - 3.0 * m2 * m2 + 12.0 * m2 * m1 * m1 - 6.0 * m1.powi(4),
        m5 - 5.0 * m4 * m1 - 10.0 * m3 * m2 + 20.0 * m3 * m1 * m1 + 30.0 * m2 * m2 * m1
            - 60.0 * m2 * m1.powi(3)
            + 24.0 * m1.powi(5),
        m6 - 6.0 * m5 * m1 - 15.0 * m4 * m2 + 30.0 * m4 * m1 * m1 - 10.0 * m3 * m3
            + 120.0 * m3 * m2 * m1
            - 120.0 * m3 * m1.powi(3)
            + 30.0 * m2.powi(3)
            - 270.0 * m2 * m2 * m1 * m1
            + 360.0 * m2 * m1.powi(4)
            - 120.0 * m1.powi(6),
    ];
    all[..up_to].to_vec()
}

pub(crate) fn central_from_raw(m: &[f64], up_to: usize) -> Vec<f64> {
    let m1 = m[1];
    (1..=up_to)
        .map(|s| {
            (0..=s)
                .map(|k| binom(s, k) * (-m1).powi(k as i32) * m[s - k])
                .sum()
        })
        .collect()
}

/// Central moments and cumulants up to order `up_to` (at most 6).
pub fn central_moments_and_cumulants(theta: &Params, up_to: usize, ctl: &SeriesControl) -> Result<CentralMoments> {
    if !(1..=6).contains(&up_to) {
        return Err(Error::Precondition(format!("up_to must be in 1..=6, got {up_to}")));
    }
    let mut report = SeriesReport::exact();
    let mut m = vec![1.0];
    for r in 1..=up_to {
        let v = moment(theta, r as f64, ctl)?;
        report.absorb(&v.report, 1.0);
        m.push(v.value);
    }
    Ok(CentralMoments {
        central: central_from_raw(&m, up_to),
        cumulants: cumulants_from_raw(&m, up_to),
        report,
    })
}

/// Signed Stirling numbers of the first kind s(r, 0..=r).
pub fn stirling_first(r: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for n in 0..r {
        let mut next = vec![0.0; n + 2];
        for k in 0..=n + 1 {
            let left = if k > 0 { row[k - 1] } else { 0.0 };
            let here = if k <= n { row[k] } else { 0.0 };
            next[k] = left - n as f64 * here;
        }
        row = next;
    }
    row
}

/// E[X(X-1)...(X-r+1)].
pub fn factorial_moment(theta: &Params, r: usize, ctl: &SeriesControl) -> Result<SeriesValue> {
    if r < 1 {
        return Err(Error::Precondition("factorial moment order must be >= 1".into()));
    }
    let s = stirling_first(r);
    let mut report = SeriesReport::exact();
    let mut value = s[0];
    for (m, sm) in s.iter().enumerate().skip(1) {
        if *sm == 0.0 {
            continue;
        }
        let mu = moment(theta, m as f64, ctl)?;
        report.absorb(&mu.report, *sm);
        value += sm * mu.value;
    }
    Ok(SeriesValue { value, report })
}

/// ∫₀¹ x^{a-1} e^{tx} dx.
pub(crate) fn exp_power_integral(a: f64, t: f64) -> f64 {
    if t < 0.0 {
        let s = -t;
        let (p, _) = reg_gamma_pq(a, s);
        p * (lgamma(a) - a * s.ln()).exp()
    } else {
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 0..500 {
            let term = fact / (a + k as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
            fact *= t / (k as f64 + 1.0);
        }
        sum
    }
}

/// Moment generating function E[e^{tX}].
pub fn mgf(theta: &Params, t: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    if !t.is_finite() {
        return Err(Error::Domain { what: "mgf argument", value: t });
    }
    if t == 0.0 {
        return Ok(SeriesValue::exact(1.0));
    }
    let table = mixture_coeffs(theta, ctl);
    let first = match &table.v_status {
        PowerSeries::Available { .. } => {
            let a = theta.alpha();
            let mut s = Summer::new(ctl);
            let mut started = false;
            for (i, vi) in table.v.iter().enumerate() {
                if *vi == 0.0 && !started {
                    continue;
                }
                started = true;
                if s.push(vi * exp_power_integral((i as f64 + 1.0) * a, t)) {
                    break;
                }
            }
            let (value, report) = s.finish("mgf power series");
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
    Ok(quad_fallback(theta, |x| (t * x).exp(), &first))
}
