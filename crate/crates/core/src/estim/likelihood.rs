use nalgebra::DMatrix;

use super::data::Dataset;
use crate::dist::{Params, Point};
use crate::specfun::{psi, psi1};

/// ℓ(θ) = Σ ln f(x_i; θ).
pub fn log_likelihood(theta: &Params, data: &Dataset) -> f64 {
    let mut s = 0.0;
    for &x in data.values() {
        s += Point::new(theta, x).log_density(theta);
    }
    s
}

/// Per-observation first and second derivative pieces of the log chain.
struct Pieces {
    t: f64,
    l1: f64,
    ly: f64,
    lz1: f64,
    l1_a: f64,
    l1_aa: f64,
    g_a: f64,
    g_b: f64,
    g_aa: f64,
    g_ab: f64,
    g_bb: f64,
    s: f64,
}

impl Pieces {
    fn new(theta: &Params, x: f64) -> Self {
        let (a, b, l) = (theta.alpha(), theta.beta(), theta.lambda());
        let p = Point::new(theta, x);
        let t = p.t;
        // r = u/(1-u), m = w/y, s = z/(1-z)
        let r = (a * t - p.l1).exp();
        let m = (b * p.l1 - p.ly).exp();
        let s = (l * p.ly - p.lz1).exp();
        let l1_a = -r * t;
        let l1_aa = -t * t * r * (1.0 + r);
        let g_a = -m * b * l1_a;
        let g_b = -m * p.l1;
        let g_aa = -b * (m * (1.0 + m) * b * l1_a * l1_a + m * l1_aa);
        let g_ab = -l1_a * m * (1.0 + b * (1.0 + m) * p.l1);
        let g_bb = -m * (1.0 + m) * p.l1 * p.l1;
        Self {
            t,
            l1: p.l1,
            ly: p.ly,
            lz1: p.lz1,
            l1_a,
            l1_aa,
            g_a,
            g_b,
            g_aa,
            g_ab,
            g_bb,
            s,
        }
    }
}

/// Analytic gradient (U_α, U_β, U_γ, U_δ, U_λ).
pub fn score(theta: &Params, data: &Dataset) -> [f64; 5] {
    let (a, b, g, d, l) = (theta.alpha(), theta.beta(), theta.gamma(), theta.delta(), theta.lambda());
    let n = data.n() as f64;
    let mut u = [0.0; 5];
    for &x in data.values() {
        let p = Pieces::new(theta, x);
        let lz_a = -p.s * l * p.g_a;
        let lz_b = -p.s * l * p.g_b;
        let lz_l = -p.s * p.ly;
        u[0] += p.t + (b - 1.0) * p.l1_a + (g * l - 1.0) * p.g_a + d * lz_a;
        u[1] += p.l1 + (g * l - 1.0) * p.g_b + d * lz_b;
        u[2] += l * p.ly;
        u[3] += p.lz1;
        u[4] += g * p.ly + d * lz_l;
    }
    let dg = psi(g + d + 1.0);
    u[0] += n / a;
    u[1] += n / b;
    u[2] += n * (dg - psi(g));
    u[3] += n * (dg - psi(d + 1.0));
    u[4] += n / l;
    u
}

/// Hessian of ℓ in the order (α, β, γ, δ, λ).
pub fn hessian(theta: &Params, data: &Dataset) -> DMatrix<f64> {
    let (a, b, g, d, l) = (theta.alpha(), theta.beta(), theta.gamma(), theta.delta(), theta.lambda());
    let n = data.n() as f64;
    let mut h = [[0.0; 5]; 5];
    for &x in data.values() {
        let p = Pieces::new(theta, x);
        let s = p.s;
        let s2 = s * (1.0 + s);
        // q = λ ly and its derivatives
        let (q_a, q_b, q_l) = (l * p.g_a, l * p.g_b, p.ly);
        let lz = |qi: f64, qj: f64, qij: f64| -s2 * qi * qj - s * qij;
        let lz_a = -s * q_a;
        let lz_b = -s * q_b;
        let lz_l = -s * q_l;
        let gl1 = g * l - 1.0;
        h[0][0] += (b - 1.0) * p.l1_aa + gl1 * p.g_aa + d * lz(q_a, q_a, l * p.g_aa);
        h[0][1] += p.l1_a + gl1 * p.g_ab + d * lz(q_a, q_b, l * p.g_ab);
        h[0][2] += l * p.g_a;
        h[0][3] += lz_a;
        h[0][4] += g * p.g_a + d * lz(q_a, q_l, p.g_a);
        h[1][1] += gl1 * p.g_bb + d * lz(q_b, q_b, l * p.g_bb);
        h[1][2] += l * p.g_b;
        h[1][3] += lz_b;
        h[1][4] += g * p.g_b + d * lz(q_b, q_l, p.g_b);
        h[2][4] += p.ly;
        h[3][4] += lz_l;
        h[4][4] += d * lz(q_l, q_l, 0.0);
    }
    let tg = psi1(g + d + 1.0);
    h[0][0] -= n / (a * a);
    h[1][1] -= n / (b * b);
    h[2][2] = n * (tg - psi1(g));
    h[2][3] = n * tg;
    h[3][3] = n * (tg - psi1(d + 1.0));
    h[4][4] -= n / (l * l);
    DMatrix::from_fn(5, 5, |i, j| if i <= j { h[i][j] } else { h[j][i] })
}

/// Observed information J(θ) = -∇²ℓ(θ).
pub fn observed_info(theta: &Params, data: &Dataset) -> DMatrix<f64> {
    -hessian(theta, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::log_pdf;
    use crate::oracle::{fd_grad, fd_hess};

    fn data5() -> Dataset {
        Dataset::new(vec![0.12, 0.35, 0.41, 0.66, 0.93], "fixed").unwrap()
    }

    fn ll_at(data: &Dataset) -> impl Fn(&[f64]) -> f64 + '_ {
        move |v: &[f64]| match Params::new(v[0], v[1], v[2], v[3], v[4]) {
            Ok(t) => log_likelihood(&t, data),
            Err(_) => f64::NAN,
        }
    }

    #[test]
    fn likelihood_identities() {
        let d = data5();
        assert!(log_likelihood(&Params::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap(), &d).abs() < 1e-14);
        let t = Params::new(2.0, 3.0, 1.5, 0.5, 2.0).unwrap();
        let direct: f64 = d.values().iter().map(|&x| log_pdf(&t, x).unwrap()).sum();
        assert!((log_likelihood(&t, &d) - direct).abs() < 1e-12);
    }

    #[test]
    fn score_matches_fd() {
        let d = data5();
        let t = Params::new(2.0, 3.0, 1.5, 0.5, 2.0).unwrap();
        let u = score(&t, &d);
        let fd = fd_grad(ll_at(&d), &t.as_array(), 1e-6).unwrap();
        for k in 0..5 {
            assert!((u[k] - fd[k]).abs() <= 1e-6 * u[k].abs().max(1.0), "{k}: {u:?} {fd:?}");
        }
    }

    #[test]
    fn gamma_score_printed_form() {
        let d = data5();
        let t = Params::new(2.0, 3.0, 1.5, 0.5, 2.0).unwrap();
        let n = 5.0;
        let ly: f64 = d.values().iter().map(|x| (1.0 - (1.0 - x * x).powi(3)).ln()).sum();
        let want = -n * (psi(1.5) - psi(3.0)) + 2.0 * ly;
        assert!((score(&t, &d)[2] - want).abs() < 1e-12);
    }

    #[test]
    fn info_matches_fd() {
        let d = data5();
        let t = Params::new(2.0, 3.0, 1.5, 0.5, 2.0).unwrap();
        let j = observed_info(&t, &d);
        let fd = fd_hess(ll_at(&d), &t.as_array(), 1e-4).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let (x, y) = (j[(a, b)], -fd[(a, b)]);
                assert!((x - y).abs() <= 1e-4 * x.abs().max(1.0), "({a},{b}) {x} {y}");
            }
        }
        assert_eq!(j, j.transpose());
        // J_γγ and J_γδ depend on the data only through n
        assert!((j[(2, 2)] - 5.0 * (psi1(1.5) - psi1(3.0))).abs() < 1e-12);
        assert!((j[(2, 3)] + 5.0 * psi1(3.0)).abs() < 1e-12);
    }

    #[test]
    fn alpha_and_lambda_scores_coincide_on_beta() {
        // GKw is not locally identified at a beta point: the α and λ
        // directions give the same score, so J is singular there
        let t = Params::new(1.0, 1.0, 2.0, 0.7, 1.0).unwrap();
        let u = score(&t, &data5());
        assert!((u[0] - u[4]).abs() < 1e-12 * u[0].abs().max(1.0), "{u:?}");
    }
}
