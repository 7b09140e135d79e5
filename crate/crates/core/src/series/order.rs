use serde::Serialize;

use super::coeffs::{as_small_int, cauchy, mixture_coeffs, omega_with_report, power_series_power, AltBinom, PowerSeries};
use super::control::{SeriesControl, SeriesReport, SeriesValue, Summer};
use super::moments::{component_moment, fallback_opts, moment, snap};
use crate::dist::{cdf, pdf, sf, Params};
use crate::error::{Error, Result};
use crate::oracle::quad_with;
use crate::specfun::lbeta;

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_indices(i: usize, n: usize) -> Result<()> {
    if i < 1 || i > n {
        return Err(Error::Precondition(format!("order statistic needs 1 <= i <= n, got i={i}, n={n}")));
    }
    Ok(())
}

fn order_quadrature(theta: &Params, i: usize, n: usize, r: f64, first: &SeriesReport) -> SeriesValue {
    let lb = lbeta(i as f64, (n - i + 1) as f64);
    let q = quad_with(
        |x| {
            let f = pdf(theta, x);
            if f == 0.0 {
                return 0.0;
            }
            let lf = f.ln() + (i - 1) as f64 * cdf(theta, x).ln() + (n - i) as f64 * sf(theta, x).ln() - lb;
            x.powf(r) * lf.exp()
        },
        &fallback_opts(),
    );
    let mut report = SeriesReport::quadrature(q.err_estimate, q.reliable, "series did not converge; value from quadrature");
    for w in &first.warnings {
        report.warnings.push(w.clone());
    }
    SeriesValue { value: q.value, report }
}

/// E[X_{i:n}^r] from the power-series density: f F^{i-1}(1-F)^{n-i}
/// expanded binomially, with F^q built by the power-series power identity.
pub fn order_stat_moment_series(theta: &Params, i: usize, n: usize, r: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    check_indices(i, n)?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain { what: "moment order", value: r });
    }
    let table = mixture_coeffs(theta, ctl);
    let first = match &table.v_status {
        PowerSeries::Available { .. } => match order_series_sum(theta, &table.v, i, n, r, ctl) {
            Ok((value, report)) if report.converged && value.is_finite() => {
                return Ok(SeriesValue { value, report });
            }
            Ok((_, report)) => report,
            Err(e) => {
                let mut rep = SeriesReport::exact();
                rep.converged = false;
                rep.warnings.push(e.to_string());
                rep
            }
        },
        PowerSeries::Unavailable { reason } => {
            let mut rep = SeriesReport::exact();
            rep.converged = false;
            rep.warnings.push(format!("power-series density unavailable: {reason}"));
            rep
        }
    };
    Ok(order_quadrature(theta, i, n, r, &first))
}

fn order_series_sum(theta: &Params, v: &[f64], i: usize, n: usize, r: f64, ctl: &SeriesControl) -> Result<(f64, SeriesReport)> {
    let a = theta.alpha();
    let Some(m0) = v.iter().position(|c| *c != 0.0) else {
        return Err(Error::Precondition("power-series density has no nonzero coefficient".into()));
    };
    let len = v.len();
    // F = u^{m0+1} Σ w_s u^s
    let w: Vec<f64> = (m0..len).map(|s| v[s] / ((s as f64 + 1.0) * a)).collect();
    let scale = (-lbeta(i as f64, (n - i + 1) as f64)).exp();
    let mut total = 0.0;
    let mut report = SeriesReport::exact();
    for j in 0..=(n - i) {
        let q = i + j - 1;
        let (e, shift) = if q == 0 {
            (vec![1.0], 0)
        } else {
            (power_series_power(&w, q as u32, w.len())?, q * (m0 + 1))
        };
        let h = cauchy(v, &e, len);
        let mut s = Summer::new(ctl);
        for (k, hk) in h.iter().enumerate().skip(m0) {
            let denom = r + (k + 1 + shift) as f64 * a;
            if s.push(hk / denom) {
                break;
            }
        }
        let (sum, rep) = s.finish("order-statistic power series");
        let c = binom(n - i, j) * if j % 2 == 0 { 1.0 } else { -1.0 } * scale;
        report.absorb(&rep, c);
        total += c * sum;
    }
    Ok((total, report))
}

/// K(ψ) = ∫₀¹ x^{r-1} G(x)^ψ dx, by the binomial w-series when its terms do
/// not cancel badly, otherwise as (1 - E_ψ[X^r]) / r.
fn k_component(theta: &Params, r: f64, psi: f64, ctl: &SeriesControl) -> (f64, SeriesReport) {
    let (a, b) = (theta.alpha(), theta.beta());
    let ps = snap(psi);
    let finite = as_small_int(ps).is_some_and(|m| m < ctl.max_terms);
    if finite {
        let mut s = Summer::new(ctl);
        let mut peak = 0.0f64;
        for (w, c) in AltBinom::new(ps).enumerate() {
            if c == 0.0 {
                break;
            }
            let t = c * lbeta(r / a, w as f64 * b + 1.0).exp() / a;
            peak = peak.max(t.abs());
            s.push(t);
        }
        let (v, rep) = s.finish_finite();
        if v.is_finite() && peak <= 1e4 * v.abs() {
            return (v, rep);
        }
    }
    let (em1, rep) = component_moment(theta, r, psi, ctl);
    (-em1 / r, rep)
}

/// E[X_{i:n}^r] by the Barakat–Abdelkader representation through
/// I_m(r) = ∫ x^{r-1} (1-F)^m dx.
pub fn order_stat_moment_barakat(theta: &Params, i: usize, n: usize, r: u32, ctl: &SeriesControl) -> Result<SeriesValue> {
    check_indices(i, n)?;
    if r == 0 {
        return Err(Error::Precondition("moment order must be a positive integer".into()));
    }
    let rf = r as f64;
    let (g, l) = (theta.gamma(), theta.lambda());
    let (omega, _) = omega_with_report(theta, ctl);
    let finite_outer = as_small_int(theta.delta()).is_some();
    let mut report = SeriesReport::exact();

    // K_p = ∫ x^{r-1} F^p dx for p = 0..=n
    let mut k = vec![1.0 / rf];
    for p in 1..=n {
        let len = if finite_outer { p * (omega.len() - 1) + 1 } else { omega.len() };
        let c = power_series_power(&omega, p as u32, len)?;
        let mut s = Summer::new(ctl);
        for (j, cj) in c.iter().enumerate() {
            let psi = l * (g * p as f64 + j as f64);
            let (kj, rep) = k_component(theta, rf, psi, ctl);
            report.absorb(&rep, *cj);
            if s.push(cj * kj) {
                break;
            }
        }
        let (kp, rep) = if finite_outer {
            s.finish_finite()
        } else {
            s.finish("order-statistic mixture sum")
        };
        report.absorb(&rep, 1.0);
        k.push(kp);
    }

    let mut total = 0.0;
    for m in (n - i + 1)..=n {
        let im: f64 = (0..=m)
            .map(|p| binom(m, p) * if p % 2 == 0 { 1.0 } else { -1.0 } * k[p])
            .sum();
        let sign = if (m + i - 1 - n) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom(m - 1, n - i) * binom(n, m) * im;
    }
    let value = rf * total;
    if report.converged && value.is_finite() {
        return Ok(SeriesValue { value, report });
    }
    Ok(order_quadrature(theta, i, n, rf, &report))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LMoments {
    pub values: Vec<f64>,
    pub report: SeriesReport,
}

/// λ_1..λ_{up_to} from order-statistic means.
pub fn l_moments(theta: &Params, up_to: usize, ctl: &SeriesControl) -> Result<LMoments> {
    if !(1..=4).contains(&up_to) {
        return Err(Error::Precondition(format!("L-moments available up to order 4, got {up_to}")));
    }
    let mut report = SeriesReport::exact();
    let mut values = Vec::with_capacity(up_to);
    let mu = moment(theta, 1.0, ctl)?;
    report.absorb(&mu.report, 1.0);
    values.push(mu.value);
    for rr in 1..up_to {
        let mut acc = 0.0;
        for kk in 0..=rr {
            let e = order_stat_moment_barakat(theta, rr + 1 - kk, rr + 1, 1, ctl)?;
            let c = binom(rr, kk) * if kk % 2 == 0 { 1.0 } else { -1.0 };
            report.absorb(&e.report, c);
            acc += c * e.value;
        }
        values.push(acc / (rr + 1) as f64);
    }
    Ok(LMoments { values, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Method;

    fn th(a: f64, b: f64, g: f64, d: f64, l: f64) -> Params {
        Params::new(a, b, g, d, l).unwrap()
    }

    #[test]
    fn uniform_order_means() {
        let ctl = SeriesControl::default();
        let u = th(1.0, 1.0, 1.0, 0.0, 1.0);
        for &(i, n) in &[(1usize, 1usize), (1, 2), (2, 3), (3, 3), (2, 4)] {
            let want = i as f64 / (n as f64 + 1.0);
            let s = order_stat_moment_series(&u, i, n, 1.0, &ctl).unwrap();
            let b = order_stat_moment_barakat(&u, i, n, 1, &ctl).unwrap();
            assert!((s.value - want).abs() < 1e-12, "{i} {n} {s:?}");
            assert!((b.value - want).abs() < 1e-12, "{i} {n} {b:?}");
            assert_eq!(s.report.method, Method::Series);
        }
    }

    #[test]
    fn single_draw_is_moment() {
        let ctl = SeriesControl::default();
        for t in [th(2.0, 3.0, 1.5, 0.5, 2.0), th(1.5, 1.5, 2.0, 1.0, 1.0)] {
            let m = moment(&t, 2.0, &ctl).unwrap().value;
            let b = order_stat_moment_barakat(&t, 1, 1, 2, &ctl).unwrap();
            let s = order_stat_moment_series(&t, 1, 1, 2.0, &ctl).unwrap();
            assert!((b.value - m).abs() < 1e-8 * m, "{b:?} {m}");
            assert!((s.value - m).abs() < 1e-8 * m, "{s:?} {m}");
        }
    }

    #[test]
    fn routes_agree() {
        let ctl = SeriesControl::default();
        for t in [th(2.0, 2.5, 1.0, 0.0, 1.0), th(1.5, 1.5, 2.0, 1.0, 1.0), th(2.0, 3.0, 1.5, 0.5, 2.0)] {
            for &(i, n) in &[(1usize, 2usize), (2, 3), (3, 3)] {
                let s = order_stat_moment_series(&t, i, n, 1.0, &ctl).unwrap();
                let b = order_stat_moment_barakat(&t, i, n, 1, &ctl).unwrap();
                assert!((s.value - b.value).abs() < 1e-4 * b.value, "{t} {i} {n}: {s:?} {b:?}");
            }
        }
    }

    #[test]
    fn kw_minimum_closed_form() {
        // the minimum of two Kw(a,b) draws is Kw(a, 2b)
        let ctl = SeriesControl::default();
        let t = th(2.0, 2.0, 1.0, 0.0, 1.0);
        let want = 4.0 * lbeta(1.5, 4.0).exp();
        let b = order_stat_moment_barakat(&t, 1, 2, 1, &ctl).unwrap();
        let s = order_stat_moment_series(&t, 1, 2, 1.0, &ctl).unwrap();
        assert!((b.value - want).abs() < 1e-12, "{b:?} {want}");
        assert!((s.value - want).abs() < 1e-10, "{s:?} {want}");
    }

    #[test]
    fn preconditions() {
        let ctl = SeriesControl::default();
        let u = th(1.0, 1.0, 1.0, 0.0, 1.0);
        assert!(order_stat_moment_series(&u, 0, 2, 1.0, &ctl).is_err());
        assert!(order_stat_moment_barakat(&u, 3, 2, 1, &ctl).is_err());
        assert!(l_moments(&u, 5, &ctl).is_err());
    }

    #[test]
    fn uniform_l_moments() {
        let ctl = SeriesControl::default();
        let l = l_moments(&th(1.0, 1.0, 1.0, 0.0, 1.0), 4, &ctl).unwrap().values;
        assert!((l[0] - 0.5).abs() < 1e-12 && (l[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!(l[2].abs() < 1e-12 && l[3].abs() < 1e-12);
    }
}
