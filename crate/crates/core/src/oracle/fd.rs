use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn eval<G: Fn(&[f64]) -> f64>(g: &G, x: &[f64], coordinate: usize) -> Result<f64> {
    let v = g(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { coordinate })
    }
}

fn step(x: f64, h_rel: f64) -> f64 {
    h_rel * x.abs().max(1.0)
}

/// Central-difference gradient with per-coordinate step `h_rel·max(1, |x_i|)`.
pub fn fd_grad<G: Fn(&[f64]) -> f64>(g: G, x: &[f64], h_rel: f64) -> Result<Vec<f64>> {
    let mut p = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = step(x[i], h_rel);
        p[i] = x[i] + h;
        let fp = eval(&g, &p, i)?;
        p[i] = x[i] - h;
        let fm = eval(&g, &p, i)?;
        p[i] = x[i];
        out.push((fp - fm) / (2.0 * h));
    }
    Ok(out)
}

/// Central second differences, symmetrized.
pub fn fd_hess<G: Fn(&[f64]) -> f64>(g: G, x: &[f64], h_rel: f64) -> Result<DMatrix<f64>> {
    let k = x.len();
    let mut h = DMatrix::zeros(k, k);
    let f0 = eval(&g, x, 0)?;
    let mut p = x.to_vec();
    for i in 0..k {
        let hi = step(x[i], h_rel);
        p[i] = x[i] + hi;
        let fp = eval(&g, &p, i)?;
        p[i] = x[i] - hi;
        let fm = eval(&g, &p, i)?;
        p[i] = x[i];
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in 0..i {
            let hj = step(x[j], h_rel);
            let mut corner = |si: f64, sj: f64| {
                p[i] = x[i] + si * hi;
                p[j] = x[j] + sj * hj;
                let v = eval(&g, &p, i);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)? + corner(-1.0, -1.0)?)
                / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}
