use super::coeffs::{as_small_int, mixture_coeffs, power_series_power, AltBinom, PowerSeries};
use super::control::{SeriesControl, SeriesReport, SeriesValue, Summer};
use super::moments::fallback_opts;
use crate::dist::{Params, Point};
use crate::error::{Error, Result};
use crate::oracle::quad_with;

/// Exponents of f^ρ at x → 0 and x → 1.
fn endpoint_exponents(theta: &Params, rho: f64) -> (f64, f64) {
    let (a, b, g, d, l) = (theta.alpha(), theta.beta(), theta.gamma(), theta.delta(), theta.lambda());
    (rho * (a * g * l - 1.0), rho * (b * (d + 1.0) - 1.0))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// T_r = ∫ f^r from the power-series density, for integer r ≥ 1.
fn density_power_integral(theta: &Params, w: &[f64], m0: usize, r: usize, ctl: &SeriesControl) -> std::result::Result<(f64, SeriesReport), String> {
    let a = theta.alpha();
    let rf = r as f64;
    let base = (r * (m0 + 1)) as f64 * a - rf + 1.0;
    if base <= 0.0 {
        return Err(format!("integral of f^{r} diverges at zero"));
    }
    let d = power_series_power(w, r as u32, w.len()).map_err(|e| e.to_string())?;
    let mut s = Summer::new(ctl);
    for (k, dk) in d.iter().enumerate() {
        if s.push(dk / (base + k as f64 * a)) {
            break;
        }
    }
    let (v, rep) = s.finish("density power series");
    if !rep.converged {
        return Err(rep.warnings.join("; "));
    }
    Ok((v, rep))
}

/// ∫ f^ρ by the binomial expansion of f^ρ = (1 - (1 - f))^ρ.
fn series_integral(theta: &Params, rho: f64, ctl: &SeriesControl) -> std::result::Result<(f64, SeriesReport), String> {
    let table = mixture_coeffs(theta, ctl);
    if let PowerSeries::Unavailable { reason } = &table.v_status {
        return Err(format!("power-series density unavailable: {reason}"));
    }
    let m0 = table.v.iter().position(|c| *c != 0.0).ok_or("power-series density is zero")?;
    let w = &table.v[m0..];
    let finite = as_small_int(rho).is_some();
    let jmax = if finite { rho.round() as usize } else { ctl.max_terms.min(200) };

    let mut t = vec![1.0];
    let mut t_err = vec![0.0];
    let mut report = SeriesReport::exact();
    let mut outer = Summer::new(ctl);
    let mut budget = 0.0;
    for (j, cj) in AltBinom::new(rho).enumerate().take(jmax + 1) {
        if t.len() <= j {
            let (v, rep) = density_power_integral(theta, w, m0, j, ctl)?;
            t.push(v);
            t_err.push(rep.tail_bound + f64::EPSILON * v.abs());
            report.absorb(&rep, 0.0);
        }
        let mut aj = 0.0;
        let mut ej = 0.0;
        for r in 0..=j {
            let c = binom(j, r) * if r % 2 == 0 { 1.0 } else { -1.0 };
            aj += c * t[r];
            ej += c.abs() * (t_err[r] + f64::EPSILON * t[r].abs());
        }
        budget += cj.abs() * ej;
        if budget > 100.0 * ctl.tail_tol {
            return Err(format!("cancellation in the binomial expansion exceeds tolerance at j = {j}"));
        }
        if outer.push(cj * aj) {
            break;
        }
    }
    let (v, rep) = if finite { outer.finish_finite() } else { outer.finish("entropy binomial series") };
    report.absorb(&rep, 1.0);
    report.tail_bound += budget;
    if !report.converged {
        return Err(rep.warnings.join("; "));
    }
    Ok((v, report))
}

/// ∫ f^ρ by quadrature after the substitutions x = s^{m0} on (0, 1/2] and
/// 1 - x = s^{m1} on [1/2, 1), which flatten the endpoint powers.
fn quadrature_integral(theta: &Params, rho: f64) -> (f64, f64, bool) {
    let (e0, e1) = endpoint_exponents(theta, rho);
    let m0 = if e0 < 0.0 { 1.0 / (e0 + 1.0) } else { 1.0 };
    let m1 = if e1 < 0.0 { 1.0 / (e1 + 1.0) } else { 1.0 };
    let opts = fallback_opts();
    let half = 0.5f64.ln();
    // left: x = s^{m0}, s in (0, S0]
    let s0 = (half / m0).exp();
    let left = quad_with(
        |tau| {
            let s = s0 * tau;
            if s <= 0.0 {
                return 0.0;
            }
            let ls = s.ln();
            let p = Point::from_log_x(theta, m0 * ls);
            (rho * p.log_density(theta) + m0.ln() + (m0 - 1.0) * ls).exp() * s0
        },
        &opts,
    );
    // right: 1 - x = s^{m1}
    let s1 = (half / m1).exp();
    let right = quad_with(
        |tau| {
            let s = s1 * tau;
            if s <= 0.0 {
                return 0.0;
            }
            let ls = s.ln();
            let p = Point::from_log_x(theta, (-(m1 * ls).exp()).ln_1p());
            (rho * p.log_density(theta) + m1.ln() + (m1 - 1.0) * ls).exp() * s1
        },
        &opts,
    );
    (
        left.value + right.value,
        left.err_estimate + right.err_estimate,
        left.reliable && right.reliable,
    )
}

/// Rényi entropy (1 - ρ)^{-1} ln ∫ f^ρ.
pub fn renyi_entropy(theta: &Params, rho: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    if !(rho > 0.0) || rho == 1.0 || !rho.is_finite() {
        return Err(Error::Domain { what: "Renyi order", value: rho });
    }
    let (e0, e1) = endpoint_exponents(theta, rho);
    if e0 <= -1.0 || e1 <= -1.0 {
        let at = if e0 <= -1.0 { "zero" } else { "one" };
        return Err(Error::Divergent {
            what: "Renyi entropy integral",
            detail: format!("f^{rho} is not integrable at {at}"),
        });
    }
    let scale = 1.0 / (1.0 - rho);
    match series_integral(theta, rho, ctl) {
        Ok((v, mut report)) if v > 0.0 => {
            report.tail_bound = (report.tail_bound / v * scale).abs();
            Ok(SeriesValue { value: scale * v.ln(), report })
        }
        other => {
            let why = match other {
                Err(e) => e,
                Ok((v, _)) => format!("binomial expansion gave non-positive integral {v}"),
            };
            let (v, err, reliable) = quadrature_integral(theta, rho);
            let mut report = SeriesReport::quadrature((err / v * scale).abs(), reliable, "series did not converge; value from quadrature");
            report.warnings.push(why);
            Ok(SeriesValue { value: scale * v.ln(), report })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Method;

    fn th(a: f64, b: f64, g: f64, d: f64, l: f64) -> Params {
        Params::new(a, b, g, d, l).unwrap()
    }

    #[test]
    fn uniform_is_zero() {
        let ctl = SeriesControl::default();
        for rho in [0.5, 2.0, 3.7] {
            let e = renyi_entropy(&th(1.0, 1.0, 1.0, 0.0, 1.0), rho, &ctl).unwrap();
            assert!(e.value.abs() <= 1e-12, "{rho} {e:?}");
            assert_eq!(e.report.method, Method::Series);
        }
    }

    #[test]
    fn beta_two_one() {
        let ctl = SeriesControl::default();
        let e = renyi_entropy(&th(1.0, 1.0, 2.0, 0.0, 1.0), 2.0, &ctl).unwrap();
        assert!((e.value - (0.75f64).ln()).abs() < 1e-12, "{e:?}");
        assert_eq!(e.report.method, Method::Series);
        // closed form (1/(1-ρ)) ln(2^ρ/(ρ+1)) also for non-integer ρ
        let rho = 0.5f64;
        let want = (2f64.powf(rho) / (rho + 1.0)).ln() / (1.0 - rho);
        let e = renyi_entropy(&th(1.0, 1.0, 2.0, 0.0, 1.0), rho, &ctl).unwrap();
        assert!((e.value - want).abs() < 1e-8, "{e:?} {want}");
    }

    #[test]
    fn generic_half() {
        // ∫ sqrt(f) by mpmath tanh-sinh quadrature
        let ctl = SeriesControl::default();
        let e = renyi_entropy(&th(2.0, 3.0, 1.5, 0.5, 2.0), 0.5, &ctl).unwrap();
        let want = 2.0 * 0.804_567_104_442_435_97f64.ln();
        assert!((e.value - want).abs() < 1e-8, "{e:?} {want}");
    }

    #[test]
    fn divergence_is_signalled() {
        let ctl = SeriesControl::default();
        let r = renyi_entropy(&th(0.5, 0.7, 0.1, 3.0, 4.0), 2.0, &ctl);
        assert!(matches!(r, Err(Error::Divergent { .. })), "{r:?}");
        assert!(renyi_entropy(&th(1.0, 1.0, 1.0, 0.0, 1.0), 1.0, &ctl).is_err());
    }
}
