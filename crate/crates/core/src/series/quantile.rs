use crate::dist::Params;
use crate::error::{Error, Result};
use crate::specfun::ln_beta;

/// Coefficients a_0, ..., a_{n-1} of the beta quantile z = Q_B(u) as a
/// power series in v = [γ u B(γ, δ+1)]^{1/γ}.
///
/// a_2 and a_3 use their closed forms; a_4 onward come from the cubic
/// recursion with second shape b = δ + 1.
pub fn quantile_series_coeffs(theta: &Params, n_coeffs: usize) -> Result<Vec<f64>> {
    if n_coeffs < 2 {
        return Err(Error::Precondition(format!("need at least 2 quantile coefficients, got {n_coeffs}")));
    }
    let g = theta.gamma();
    let d = theta.delta();
    let b = d + 1.0;
    let mut a = vec![0.0, 1.0];
    if n_coeffs > 2 {
        a.push(d / (g + 1.0));
    }
    if n_coeffs > 3 {
        a.push(d * (g * g + 3.0 * b * g - g + 5.0 * d + 1.0) / (2.0 * (g + 1.0).powi(2) * (g + 2.0)));
    }
    for i in a.len()..n_coeffs {
        let mut s1 = 0.0;
        for r in 2..i {
            let (rf, ii) = (r as f64, i as f64);
            s1 += a[r] * a[i + 1 - r] * (rf * (1.0 - g) * (ii - rf) - rf * (rf - 1.0));
        }
        let mut s2 = 0.0;
        for r in 1..i {
            for s in 1..=(i - r) {
                let (rf, sf) = (r as f64, s as f64);
                let t = (i + 1 - r - s) as f64;
                s2 += a[r] * a[s] * a[i + 1 - r - s] * (rf * (rf - g) + sf * (g + b - 2.0) * t);
            }
        }
        let ii = i as f64;
        a.push((s1 + s2) / (ii * ii + (g - 2.0) * ii + 1.0 - g));
    }
    Ok(a)
}

/// v = [γ u B(γ, δ+1)]^{1/γ}.
pub fn quantile_series_argument(theta: &Params, u: f64) -> f64 {
    let g = theta.gamma();
    let lb = ln_beta(g, theta.delta() + 1.0).unwrap_or(f64::NAN);
    ((g.ln() + u.ln() + lb) / g).exp()
}

/// GKw quantile from the truncated series for Q_B, mapped through
/// x = {1 - [1 - z^{1/λ}]^{1/β}}^{1/α}.
pub fn quantile_from_series(theta: &Params, u: f64, coeffs: &[f64]) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain { what: "probability", value: u });
    }
    let v = quantile_series_argument(theta, u);
    let z = coeffs.iter().rev().fold(0.0, |acc, c| acc * v + c);
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain { what: "series quantile outside (0,1)", value: z });
    }
    let x = (1.0 - (1.0 - z.powf(1.0 / theta.lambda())).powf(1.0 / theta.beta())).powf(1.0 / theta.alpha());
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::quantile;
    use crate::specfun::inv_reg_inc_beta;

    fn th(a: f64, b: f64, g: f64, d: f64, l: f64) -> Params {
        Params::new(a, b, g, d, l).unwrap()
    }

    #[test]
    fn precondition() {
        assert!(quantile_series_coeffs(&th(1.0, 1.0, 1.0, 1.0, 1.0), 1).is_err());
        assert_eq!(quantile_series_coeffs(&th(1.0, 1.0, 1.0, 1.0, 1.0), 2).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn delta_zero_is_exact_power() {
        for &g in &[0.3, 1.0, 2.7] {
            let a = quantile_series_coeffs(&th(1.0, 1.0, g, 0.0, 1.0), 9).unwrap();
            assert!(a[2..].iter().all(|&c| c == 0.0), "{a:?}");
            let x = quantile_from_series(&th(1.0, 1.0, g, 0.0, 1.0), 0.37, &a).unwrap();
            assert!((x - 0.37f64.powf(1.0 / g)).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_symbolic_reversion() {
        // exact reversion of the incomplete beta series (rational arithmetic)
        let a = quantile_series_coeffs(&th(1.0, 1.0, 2.0, 1.5, 1.0), 8).unwrap();
        let want = [0.0, 1.0, 0.5, 0.53125, 0.70625, 1.04951171875, 1.667857142857143, 2.7724329485212054];
        for (x, y) in a.iter().zip(want) {
            assert!((x - y).abs() < 1e-13 * y.max(1.0), "{a:?}");
        }
        let a = quantile_series_coeffs(&th(1.0, 1.0, 1.0, 1.0, 1.0), 8).unwrap();
        let want = [0.0, 1.0, 0.5, 0.5, 0.625, 0.875, 1.3125, 2.0625];
        for (x, y) in a.iter().zip(want) {
            assert!((x - y).abs() < 1e-13 * y.max(1.0), "{a:?}");
        }
    }

    #[test]
    fn four_terms_track_inverse() {
        let t = th(1.0, 1.0, 2.0, 1.5, 1.0);
        let a = quantile_series_coeffs(&t, 5).unwrap();
        let mut last = f64::INFINITY;
        for &u in &[0.3, 0.1, 0.03, 0.01, 0.001] {
            let z = inv_reg_inc_beta(u, 2.0, 2.5).unwrap();
            let s = quantile_from_series(&t, u, &a).unwrap();
            let v = quantile_series_argument(&t, u);
            let err = (s - z).abs();
            assert!(err < 5.0 * v.powi(5), "u={u}: {err} vs {}", v.powi(5));
            assert!(err < last);
            last = err;
        }
    }

    #[test]
    fn maps_to_gkw_quantile() {
        let t = th(2.0, 3.0, 1.5, 0.5, 2.0);
        let a = quantile_series_coeffs(&t, 12).unwrap();
        let u = 0.01;
        let x = quantile_from_series(&t, u, &a).unwrap();
        assert!((x - quantile(&t, u).unwrap()).abs() < 1e-8);
    }
}
