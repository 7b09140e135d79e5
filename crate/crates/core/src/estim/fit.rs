use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::data::Dataset;
use super::likelihood::{hessian, log_likelihood, observed_info, score};
use super::optim::{bfgs, Objective};
use crate::dist::{ParamName, Params, SubModel};
use crate::error::{Error, Result};

/// Offset in the δ transform z = ln(δ + ε).
pub const DELTA_EPS: f64 = 1e-10;
/// δ below this is reported as exactly zero.
pub const DELTA_BOUNDARY: f64 = 1e-8;
/// Search box |ln θ_i| ≤ LOG_BOUND for the positive parameters.
pub const LOG_BOUND: f64 = 15.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Relative tolerance on the sup-norm of the score.
    pub grad_tol: f64,
    /// Per-coordinate multipliers of the optimizer's internal variables.
    pub coord_scale: [f64; 5],
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-6,
            coord_scale: [1.0; 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub submodel: SubModel,
    pub theta_hat: Params,
    pub loglik: f64,
    /// Per free parameter, in [`SubModel::free_names`] order.
    pub std_errors: Option<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    /// δ̂ hit its lower bound and is reported as 0.
    pub boundary: bool,
    /// Index of the winning start point.
    pub start_index: usize,
    pub notes: Vec<String>,
}

struct Problem<'a> {
    data: &'a Dataset,
    sub: SubModel,
    free: Vec<usize>,
    scale: Vec<f64>,
    base: [f64; 5],
    tol: f64,
}

impl Problem<'_> {
    fn eps(&self, k: usize) -> f64 {
        if self.free[k] == ParamName::Delta.index() {
            DELTA_EPS
        } else {
            0.0
        }
    }

    fn lower(&self, k: usize) -> f64 {
        if self.eps(k) > 0.0 {
            self.eps(k).ln()
        } else {
            -LOG_BOUND
        }
    }

    /// Free coordinates sitting on the upper or (non-δ) lower search bound.
    fn on_bound(&self, theta: &Params) -> Vec<ParamName> {
        let a = theta.as_array();
        self.free
            .iter()
            .enumerate()
            .filter(|&(k, &i)| {
                let z = (a[i] + self.eps(k)).ln();
                z > LOG_BOUND - 1e-3 || (self.eps(k) == 0.0 && z < -LOG_BOUND + 1e-3)
            })
            .map(|(_, &i)| ParamName::ALL[i])
            .collect()
    }

    fn theta(&self, x: &DVector<f64>) -> Option<Params> {
        let mut a = self.base;
        for (k, &i) in self.free.iter().enumerate() {
            let z = x[k] / self.scale[k];
            if z > LOG_BOUND || z < self.lower(k) {
                return None;
            }
            a[i] = z.exp() - self.eps(k);
            if i == ParamName::Delta.index() {
                a[i] = a[i].max(0.0);
            }
        }
        Params::from_array(a).ok()
    }

    fn encode(&self, theta: &Params) -> DVector<f64> {
        let a = theta.as_array();
        DVector::from_iterator(
            self.free.len(),
            self.free.iter().enumerate().map(|(k, &i)| (a[i] + self.eps(k)).ln() * self.scale[k]),
        )
    }

    /// dθ_i/dx_k for each free coordinate.
    fn jac(&self, x: &DVector<f64>) -> Vec<f64> {
        (0..self.free.len()).map(|k| (x[k] / self.scale[k]).exp() / self.scale[k]).collect()
    }

    fn n(&self) -> f64 {
        self.data.n() as f64
    }

    /// δ sits on its bound with the score pushing it further down.
    fn at_boundary(&self, theta: &Params, u_delta: f64) -> bool {
        !self.sub.is_fixed(ParamName::Delta) && theta.delta() < DELTA_BOUNDARY && u_delta <= 0.0
    }

    fn grad_norm(&self, theta: &Params, u: &[f64; 5]) -> f64 {
        let boundary = self.at_boundary(theta, u[ParamName::Delta.index()]);
        self.free
            .iter()
            .filter(|&&i| !(boundary && i == ParamName::Delta.index()))
            .map(|&i| u[i].abs())
            .fold(0.0, f64::max)
    }
}

impl Objective for Problem<'_> {
    fn value(&self, x: &DVector<f64>) -> f64 {
        match self.theta(x) {
            Some(t) => {
                let v = -log_likelihood(&t, self.data) / self.n();
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            }
            None => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let t = self.theta(x).expect("gradient requested at a valid point");
        let u = score(&t, self.data);
        let d = self.jac(x);
        DVector::from_iterator(self.free.len(), self.free.iter().enumerate().map(|(k, &i)| -u[i] * d[k] / self.n()))
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let Some(t) = self.theta(x) else {
            return DMatrix::from_element(self.free.len(), self.free.len(), f64::NAN);
        };
        let u = score(&t, self.data);
        let h = hessian(&t, self.data);
        let d = self.jac(x);
        let m = self.free.len();
        DMatrix::from_fn(m, m, |a, b| {
            let (i, j) = (self.free[a], self.free[b]);
            let mut v = h[(i, j)] * d[a] * d[b];
            if a == b {
                v += u[i] * d[a] / self.scale[a];
            }
            -v / self.n()
        })
    }

    fn done(&self, x: &DVector<f64>, g: &DVector<f64>) -> bool {
        let Some(t) = self.theta(x) else { return false };
        let d = self.jac(x);
        let mut u = [0.0; 5];
        for (k, &i) in self.free.iter().enumerate() {
            u[i] = -g[k] * self.n() / d[k];
        }
        let ll = self.value(x) * -self.n();
        self.grad_norm(&t, &u) < self.tol * ll.abs().max(1.0)
    }
}

/// Moment-matched beta start projected onto the pattern of `sub`.
pub fn default_init(data: &Dataset, sub: SubModel) -> Result<Params> {
    if data.n() < 2 {
        return Err(Error::Precondition("default_init needs at least two observations".into()));
    }
    let s = data.summary();
    if !(s.variance > 0.0) {
        return Err(Error::Estimation("sample variance is zero".into()));
    }
    let k = (s.mean * (1.0 - s.mean) / s.variance - 1.0).max(0.1);
    let gamma = s.mean * k;
    let delta = ((1.0 - s.mean) * k - 1.0).max(0.01);
    Ok(sub.project(&Params::new(1.0, 1.0, gamma, delta, 1.0)?))
}

/// The default start scaled jointly by 1, 1/2 and 2 over the free parameters.
pub fn default_starts(data: &Dataset, sub: SubModel) -> Result<Vec<Params>> {
    let base = default_init(data, sub)?;
    let free = sub.free_indices();
    [1.0, 0.5, 2.0]
        .iter()
        .map(|&c| {
            let mut a = base.as_array();
            for &i in &free {
                a[i] *= c;
            }
            Params::from_array(a)
        })
        .collect()
}

/// Square roots of the diagonal of the inverse information, or `None` when
/// the matrix is not positive definite.
pub fn wald_std_errors(info: &DMatrix<f64>) -> Option<Vec<f64>> {
    if !info.iter().all(|v| v.is_finite()) {
        return None;
    }
    let inv = info.clone().cholesky()?.inverse();
    let d: Vec<f64> = inv.diagonal().iter().map(|v| v.sqrt()).collect();
    d.iter().all(|v| v.is_finite() && *v > 0.0).then_some(d)
}

/// Standard errors from the observed information restricted to the free
/// coordinates of the fit.
pub fn std_errors(fit: &FitResult, data: &Dataset) -> Option<Vec<f64>> {
    let j = observed_info(&fit.theta_hat, data);
    let free = fit.submodel.free_indices();
    let m = free.len();
    wald_std_errors(&DMatrix::from_fn(m, m, |a, b| j[(free[a], free[b])]))
}

fn check_fit_data(data: &Dataset, sub: SubModel) -> Result<()> {
    if data.n() < sub.free_count() + 1 {
        return Err(Error::Precondition(format!(
            "{sub} has {} free parameters but only {} observations",
            sub.free_count(),
            data.n()
        )));
    }
    let v = data.values();
    if v.iter().all(|x| *x == v[0]) {
        return Err(Error::Estimation("all observations are equal".into()));
    }
    Ok(())
}

fn fit_one(data: &Dataset, sub: SubModel, start: &Params, opts: &FitOptions) -> (Params, f64, usize, Vec<ParamName>) {
    let free = sub.free_indices();
    let problem = Problem {
        data,
        sub,
        scale: free.iter().map(|&i| opts.coord_scale[i]).collect(),
        free,
        base: sub.project(start).as_array(),
        tol: opts.grad_tol,
    };
    let mut x0 = problem.encode(&sub.project(start));
    for k in 0..x0.len() {
        x0[k] = x0[k].clamp(problem.lower(k) * problem.scale[k], LOG_BOUND * problem.scale[k]);
    }
    let m = bfgs(&problem, x0, opts.max_iter);
    let theta = problem.theta(&m.x).expect("minimizer stays in the domain");
    let bound = problem.on_bound(&theta);
    (theta, -m.fx * problem.n(), m.iterations, bound)
}

/// Maximum likelihood fit over the best of several starts.
pub fn fit_from_starts(data: &Dataset, sub: SubModel, starts: &[Params], opts: &FitOptions) -> Result<FitResult> {
    check_fit_data(data, sub)?;
    if starts.is_empty() {
        return Err(Error::Precondition("no start points".into()));
    }
    let mut best: Option<(usize, Params, f64, usize, Vec<ParamName>)> = None;
    let mut total_iter = 0;
    for (k, s) in starts.iter().enumerate() {
        let (theta, ll, it, bound) = fit_one(data, sub, s, opts);
        total_iter += it;
        let better = match &best {
            None => ll.is_finite(),
            Some((_, _, bl, _, _)) => ll > *bl,
        };
        if better {
            best = Some((k, theta, ll, it, bound));
        }
    }
    let Some((start_index, mut theta, _, iterations, bound)) = best else {
        return Err(Error::Estimation("log-likelihood is not finite at any start".into()));
    };
    let mut notes = Vec::new();
    let u0 = score(&theta, data);
    let boundary = !sub.is_fixed(ParamName::Delta) && theta.delta() < DELTA_BOUNDARY && u0[3] <= 0.0;
    if boundary {
        let mut a = theta.as_array();
        a[3] = 0.0;
        theta = Params::from_array(a)?;
        notes.push("delta at its lower bound; reported as 0 and excluded from the gradient test".into());
    }
    let loglik = log_likelihood(&theta, data);
    let u = score(&theta, data);
    let grad_norm = sub
        .free_indices()
        .into_iter()
        .filter(|&i| !(boundary && i == 3))
        .map(|i| u[i].abs())
        .fold(0.0, f64::max);
    let converged = bound.is_empty() && grad_norm < opts.grad_tol * loglik.abs().max(1.0);
    if !bound.is_empty() {
        let names: Vec<&str> = bound.iter().map(|p| p.symbol()).collect();
        notes.push(format!(
            "{} reached the search bound |ln theta| = {LOG_BOUND}; the likelihood increases toward a limit of the family",
            names.join(", ")
        ));
    }
    if !converged {
        notes.push(format!("optimizer stopped with score sup-norm {grad_norm:.3e} after {total_iter} iterations over all starts"));
    }
    let mut fit = FitResult {
        submodel: sub,
        theta_hat: theta,
        loglik,
        std_errors: None,
        converged,
        iterations,
        grad_norm,
        boundary,
        start_index,
        notes,
    };
    fit.std_errors = std_errors(&fit, data);
    if fit.std_errors.is_none() {
        fit.notes.push("observed information is not positive definite; standard errors withheld".into());
    }
    Ok(fit)
}

/// Maximum likelihood fit of `sub`; multi-start from [`default_starts`] when
/// `init` is absent.
pub fn fit(data: &Dataset, sub: SubModel, init: Option<Params>, opts: &FitOptions) -> Result<FitResult> {
    check_fit_data(data, sub)?;
    let starts = match init {
        Some(t) => vec![sub.project(&t)],
        None => default_starts(data, sub)?,
    };
    fit_from_starts(data, sub, &starts, opts)
}

/// Fits several models, smallest first, seeding each with the estimates of
/// the models nested in it. Results come back in the requested order.
pub fn fit_family(data: &Dataset, models: &[SubModel], opts: &FitOptions) -> Result<Vec<FitResult>> {
    let mut order: Vec<usize> = (0..models.len()).collect();
    order.sort_by_key(|&k| models[k].free_count());
    let mut done: Vec<Option<FitResult>> = vec![None; models.len()];
    for &k in &order {
        let sub = models[k];
        let mut starts = default_starts(data, sub)?;
        for f in done.iter().flatten() {
            if f.submodel.nested_in(sub) {
                starts.push(f.theta_hat);
            }
        }
        done[k] = Some(fit_from_starts(data, sub, &starts, opts)?);
    }
    Ok(done.into_iter().map(|f| f.expect("every model fitted")).collect())
}
