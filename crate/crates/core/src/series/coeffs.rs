use serde::Serialize;

use super::control::{Method, SeriesControl, SeriesReport, SeriesValue, Summer};
use crate::error::{Error, Result};
use crate::dist::{log1mexp, Params};
use crate::specfun::lbeta;

pub(crate) fn as_small_int(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= 1e-12 * x.abs().max(1.0) && r >= 0.0 && r < 1e6).then_some(r as usize)
}

/// Sequence (-1)^j C(a, j), j = 0, 1, ... (generated lazily).
pub(crate) struct AltBinom {
    a: f64,
    j: usize,
    c: f64,
}

impl AltBinom {
    pub fn new(a: f64) -> Self {
        Self { a, j: 0, c: 1.0 }
    }
}

impl Iterator for AltBinom {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        let out = self.c;
        self.j += 1;
        self.c *= (self.j as f64 - 1.0 - self.a) / self.j as f64;
        Some(out)
    }
}

/// ω_j = (-1)^j C(δ, j) / [(γ + j) B(γ, δ + 1)].
pub fn omega_weights(theta: &Params, ctl: &SeriesControl) -> Vec<f64> {
    omega_with_report(theta, ctl).0
}

pub(crate) fn omega_with_report(theta: &Params, ctl: &SeriesControl) -> (Vec<f64>, SeriesReport) {
    let g = theta.gamma();
    let d = theta.delta();
    let inv_b = (-lbeta(g, d + 1.0)).exp();
    let weights = AltBinom::new(d).enumerate().map(|(j, c)| c * inv_b / (g + j as f64));
    if let Some(m) = as_small_int(d) {
        let w: Vec<f64> = weights.take(m + 1).collect();
        return (w, SeriesReport::exact());
    }
    let mut out = Vec::new();
    let mut s = Summer::new(ctl);
    for w in weights {
        out.push(w);
        if s.push(w.abs()) {
            break;
        }
    }
    let (_, mut rep) = s.finish("omega weights");
    // acceleration is meaningless for a coefficient list
    if rep.method == Method::Accelerated {
        rep.method = Method::Series;
        rep.converged = false;
        rep.warnings.push("omega weights truncated at max_terms".into());
    }
    (out, rep)
}

/// First `n` coefficients of (Σ a_j x^j)^p for real `p`, given a_0 != 0.
pub(crate) fn series_pow(a: &[f64], p: f64, n: usize) -> Vec<f64> {
    let a0 = a[0];
    let mut c = vec![0.0; n];
    if n == 0 {
        return c;
    }
    c[0] = if p.fract() == 0.0 && p.abs() < 1e9 {
        a0.powi(p as i32)
    } else {
        a0.powf(p)
    };
    for s in 1..n {
        let mut acc = 0.0;
        for j in 1..=s.min(a.len() - 1) {
            acc += ((j as f64) * p - s as f64 + j as f64) * a[j] * c[s - j];
        }
        c[s] = acc / (s as f64 * a0);
    }
    c
}

/// First `n` coefficients of the `p`-th power of the series with
/// coefficients `a` (a_0 must be nonzero).
pub fn power_series_power(a: &[f64], p: u32, n: usize) -> Result<Vec<f64>> {
    if a.is_empty() || a[0] == 0.0 {
        return Err(Error::Domain {
            what: "power_series_power (leading coefficient)",
            value: a.first().copied().unwrap_or(0.0),
        });
    }
    if p == 0 || n == 0 {
        return Err(Error::Precondition(format!(
            "power_series_power needs p >= 1 and n >= 1 (got p={p}, n={n})"
        )));
    }
    Ok(series_pow(a, p as f64, n))
}

pub(crate) fn cauchy(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n];
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            c[i + j] += ai * bj;
        }
    }
    c
}

/// Whether the power-of-x representation of the density exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum PowerSeries {
    Available {
        /// Root-test estimate of the radius of convergence in u = x^α.
        radius: f64,
    },
    Unavailable {
        reason: String,
    },
}

/// Expansion coefficients for one parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoeffTable {
    pub theta: Params,
    pub omega: Vec<f64>,
    pub omega_report: SeriesReport,
    pub p: Vec<f64>,
    pub p_report: SeriesReport,
    pub v: Vec<f64>,
    pub v_status: PowerSeries,
}

fn mixture_p(theta: &Params, omega: &[f64], omega_exact: bool, ctl: &SeriesControl) -> (Vec<f64>, SeriesReport) {
    let (g, l) = (theta.gamma(), theta.lambda());
    let mut rep = SeriesReport::exact();
    // per-j running values of (-1)^k C(φ_j, k)
    let phis: Vec<f64> = (0..omega.len()).map(|j| l * (g + j as f64) - 1.0).collect();
    let mut binoms: Vec<AltBinom> = phis.iter().map(|&phi| AltBinom::new(phi)).collect();
    let mut p = Vec::new();
    let mut outer = Summer::new(ctl);
    for k in 0..ctl.max_terms {
        let mut inner = Summer::new(ctl);
        let mut stopped = false;
        for (j, w) in omega.iter().enumerate() {
            let c = binoms[j].next().unwrap_or(0.0);
            if !stopped {
                stopped = inner.push(w * l * (g + j as f64) * c / (k as f64 + 1.0));
            }
        }
        let (pk, r) = if omega_exact {
            inner.finish_finite()
        } else if stopped {
            inner.finish(&format!("p_{k} inner sum"))
        } else {
            let (v, mut r) = inner.finish_finite();
            r.converged = false;
            r.warnings.push("p_k inner sums limited by truncated weights".into());
            (v, r)
        };
        rep.absorb(&r, 1.0);
        p.push(pk);
        if outer.push(pk.abs()) {
            break;
        }
    }
    let (_, orep) = outer.finish("mixture weights p_k");
    if orep.method == Method::Accelerated || !orep.converged {
        rep.converged = false;
        rep.warnings.push("mixture weights p_k truncated at max_terms".into());
    }
    rep.terms = p.len();
    rep.method = Method::Series;
    (p, rep)
}

/// Coefficients of the density as a power series in u = x^α, if it exists.
fn power_coeffs(theta: &Params, n: usize) -> std::result::Result<Vec<f64>, String> {
    let (a, b, g, d, l) = (theta.alpha(), theta.beta(), theta.gamma(), theta.delta(), theta.lambda());
    let m0 = as_small_int(g * l - 1.0)
        .ok_or_else(|| format!("gamma*lambda = {} is not a positive integer", g * l))?;
    let lam_int = as_small_int(l);
    if d > 0.0 && lam_int.is_none() {
        return Err(format!("lambda = {l} is not an integer while delta > 0"));
    }
    if m0 >= n {
        return Ok(vec![0.0; n]);
    }
    let len = n - m0;
    // (1-u)^(β-1), (1-u)^β
    let pw: Vec<f64> = AltBinom::new(b - 1.0).take(len).collect();
    let w: Vec<f64> = AltBinom::new(b).take(len + 1).collect();
    let q: Vec<f64> = w[1..].iter().map(|c| -c).collect();
    let mut gser = if m0 > 0 {
        cauchy(&pw, &series_pow(&q, m0 as f64, len), len)
    } else {
        pw
    };
    if d > 0.0 {
        let lam = lam_int.expect("checked above");
        let ql = series_pow(&q, lam as f64, len);
        let mut s = vec![0.0; len];
        s[0] = 1.0;
        for i in lam..len {
            s[i] -= ql[i - lam];
        }
        let r = series_pow(&s, d, len);
        gser = cauchy(&gser, &r, len);
    }
    let scale = (a.ln() + b.ln() + l.ln() - lbeta(g, d + 1.0)).exp();
    let mut v = vec![0.0; m0];
    v.extend(gser.into_iter().map(|c| c * scale));
    Ok(v)
}

fn radius_estimate(v: &[f64]) -> f64 {
    let nz: Vec<(usize, f64)> = v
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| (i, c.abs()))
        .collect();
    if nz.len() < 10 {
        return f64::INFINITY;
    }
    let (i1, c1) = nz[nz.len() - 1];
    let (i0, c0) = nz[nz.len() - 1 - nz.len() / 4];
    if i1 == i0 {
        return f64::INFINITY;
    }
    let rate = (c1.ln() - c0.ln()) / (i1 - i0) as f64;
    (-rate).exp()
}

/// ω_j, the Kumaraswamy-mixture weights p_k and the power-series
/// coefficients v_i.
pub fn mixture_coeffs(theta: &Params, ctl: &SeriesControl) -> CoeffTable {
    let (omega, omega_report) = omega_with_report(theta, ctl);
    let exact = as_small_int(theta.delta()).is_some();
    let (p, mut p_report) = mixture_p(theta, &omega, exact, ctl);
    if !exact {
        p_report.warnings.push(
            "delta is not an integer: the inner sums defining p_k diverge once k >= delta".into(),
        );
    }
    let (v, v_status) = match power_coeffs(theta, ctl.max_terms) {
        Ok(v) => {
            let radius = radius_estimate(&v);
            (v, PowerSeries::Available { radius })
        }
        Err(reason) => (Vec::new(), PowerSeries::Unavailable { reason }),
    };
    CoeffTable {
        theta: *theta,
        omega,
        omega_report,
        p,
        p_report,
        v,
        v_status,
    }
}

/// ln y with y = 1 - (1 - x^α)^β.
fn ln_g1(theta: &Params, x: f64) -> f64 {
    log1mexp(theta.beta() * log1mexp(theta.alpha() * x.ln()))
}

/// Σ_j ω_j G₁(x)^{λ(γ+j)}.
pub fn cdf_expansion(theta: &Params, x: f64, ctl: &SeriesControl) -> SeriesValue {
    if x <= 0.0 {
        return SeriesValue::exact(0.0);
    }
    if x >= 1.0 {
        return SeriesValue::exact(1.0);
    }
    let (omega, orep) = omega_with_report(theta, ctl);
    let ly = ln_g1(theta, x);
    let mut s = Summer::new(ctl);
    for (j, w) in omega.iter().enumerate() {
        let t = w * (theta.lambda() * (theta.gamma() + j as f64) * ly).exp();
        if s.push(t) {
            break;
        }
    }
    // G₁ ≤ 1, so the omitted weights bound the omitted terms
    let (value, report) = if orep.terms == 0 && orep.converged {
        s.finish_finite()
    } else if !s.is_stopped() {
        s.finish_exhausted(&orep)
    } else {
        s.finish("cdf expansion")
    };
    SeriesValue { value, report }
}

/// Σ_k p_k · Kw(α, (k+1)β) density at x.
pub fn density_from_mixture(table: &CoeffTable, x: f64, ctl: &SeriesControl) -> SeriesValue {
    let th = &table.theta;
    if !(x > 0.0 && x < 1.0) {
        return SeriesValue::exact(0.0);
    }
    let (a, b) = (th.alpha(), th.beta());
    let t = x.ln();
    let l1 = log1mexp(a * t);
    let mut s = Summer::new(ctl);
    for (k, pk) in table.p.iter().enumerate() {
        let bk = (k as f64 + 1.0) * b;
        let kw = (a.ln() + bk.ln() + (a - 1.0) * t + (bk - 1.0) * l1).exp();
        if s.push(pk * kw) {
            break;
        }
    }
    let (value, mut report) = s.finish("mixture density");
    report.absorb(&table.p_report, 0.0);
    SeriesValue { value, report }
}

/// Σ_i v_i x^{(i+1)α-1}.
pub fn density_from_power_series(table: &CoeffTable, x: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    if let PowerSeries::Unavailable { reason } = &table.v_status {
        return Err(Error::Precondition(format!("power-series density unavailable: {reason}")));
    }
    if !(x > 0.0 && x < 1.0) {
        return Ok(SeriesValue::exact(0.0));
    }
    let a = table.theta.alpha();
    let lu = a * x.ln();
    let mut s = Summer::new(ctl);
    let mut nonzero = false;
    for (i, vi) in table.v.iter().enumerate() {
        if *vi == 0.0 && !nonzero {
            continue;
        }
        nonzero = true;
        let t = vi * ((i as f64 + 1.0) * lu - x.ln()).exp();
        if s.push(t) {
            break;
        }
    }
    let (value, report) = s.finish("power-series density");
    Ok(SeriesValue { value, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{cdf, pdf};

    fn th(a: f64, b: f64, g: f64, d: f64, l: f64) -> Params {
        Params::new(a, b, g, d, l).unwrap()
    }

    #[test]
    fn omega_examples() {
        let ctl = SeriesControl::default();
        assert_eq!(omega_weights(&th(2.0, 3.0, 1.0, 0.0, 1.5), &ctl), vec![1.0]);
        let w = omega_weights(&th(1.0, 1.0, 2.0, 1.0, 1.0), &ctl);
        assert_eq!(w.len(), 2);
        assert!((w[0] - 3.0).abs() < 1e-12 && (w[1] + 2.0).abs() < 1e-12);
        let f = |x: f64| w[0] * x * x + w[1] * x * x * x;
        assert!((f(0.4) - cdf(&th(1.0, 1.0, 2.0, 1.0, 1.0), 0.4)).abs() < 1e-12);
        assert_eq!(omega_weights(&th(1.0, 1.0, 2.0, 3.0, 1.0), &ctl).len(), 4);
    }

    #[test]
    fn omega_non_integer_delta_reconstructs_cdf() {
        let ctl = SeriesControl::default();
        let t = th(1.5, 2.0, 1.2, 2.5, 0.8);
        let s = cdf_expansion(&t, 0.5, &ctl);
        assert!(s.report.converged, "{:?}", s.report);
        assert!((s.value - cdf(&t, 0.5)).abs() <= 1e-9 + s.report.tail_bound);
    }

    #[test]
    fn power_of_series() {
        assert_eq!(power_series_power(&[1.0, 1.0], 2, 3).unwrap(), vec![1.0, 2.0, 1.0]);
        assert_eq!(
            power_series_power(&[1.0, 2.0, 3.0], 2, 5).unwrap(),
            vec![1.0, 4.0, 10.0, 12.0, 9.0]
        );
        let a = [0.3, -1.2, 2.5, 0.7];
        let one = power_series_power(&a, 1, 4).unwrap();
        for (x, y) in one.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(power_series_power(&[0.0, 1.0], 2, 3).is_err());
        assert!(power_series_power(&[1.0], 0, 3).is_err());
    }

    #[test]
    fn kw_is_its_own_mixture() {
        let ctl = SeriesControl::default();
        let t = th(2.0, 3.0, 1.0, 0.0, 1.0);
        let c = mixture_coeffs(&t, &ctl);
        assert_eq!(c.p[0], 1.0);
        assert!(c.p[1..].iter().all(|&p| p == 0.0));
        assert!(c.p_report.converged);
    }

    #[test]
    fn uniform_power_series() {
        let ctl = SeriesControl::default();
        let c = mixture_coeffs(&th(1.0, 1.0, 1.0, 0.0, 1.0), &ctl);
        assert_eq!(c.v[0], 1.0);
        assert!(c.v[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn kw_power_coefficients_match_binomial_form() {
        // v_i = αβ (-1)^i C(β-1, i) for the Kumaraswamy density
        let ctl = SeriesControl::default();
        let (a, b) = (2.0, 2.5);
        let c = mixture_coeffs(&th(a, b, 1.0, 0.0, 1.0), &ctl);
        for (i, cb) in AltBinom::new(b - 1.0).take(30).enumerate() {
            assert!((c.v[i] - a * b * cb).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_power_series_near_zero() {
        let ctl = SeriesControl::default();
        let t = th(2.0, 3.0, 1.5, 0.5, 2.0);
        let c = mixture_coeffs(&t, &ctl);
        for &x in &[0.2, 0.4] {
            let s = density_from_power_series(&c, x, &ctl).unwrap();
            assert!(s.report.converged);
            assert!((s.value - pdf(&t, x)).abs() < 1e-6);
        }
        // outside the radius of convergence the sum must not claim success
        let s = density_from_power_series(&c, 0.8, &ctl).unwrap();
        assert!(!s.report.converged);
    }

    #[test]
    fn power_series_unavailable_is_reported() {
        let ctl = SeriesControl::default();
        let c = mixture_coeffs(&th(2.0, 3.0, 1.3, 0.5, 2.0), &ctl);
        assert!(matches!(c.v_status, PowerSeries::Unavailable { .. }));
        assert!(density_from_power_series(&c, 0.5, &ctl).is_err());
    }

    #[test]
    fn integer_delta_mixture_matches_pdf() {
        let ctl = SeriesControl::default();
        let t = th(1.5, 2.0, 1.7, 2.0, 1.3);
        let c = mixture_coeffs(&t, &ctl);
        for &x in &[0.1, 0.5, 0.9] {
            let s = density_from_mixture(&c, x, &ctl);
            assert!((s.value - pdf(&t, x)).abs() < 1e-6 + s.report.tail_bound, "{x}: {s:?}");
        }
    }
}
