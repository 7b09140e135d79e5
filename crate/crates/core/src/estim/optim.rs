use nalgebra::{DMatrix, DVector};

/// A smooth objective to minimize.
pub(crate) trait Objective {
    /// Objective value; non-finite means "outside the domain".
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Exact Hessian, used to seed and reset the inverse-Hessian estimate.
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Problem-specific stopping test.
    fn done(&self, x: &DVector<f64>, g: &DVector<f64>) -> bool;
}

#[derive(Debug, Clone)]
pub(crate) struct Minimum {
    pub x: DVector<f64>,
    pub fx: f64,
    pub iterations: usize,
}

const MAX_STEP: f64 = 3.0;
const ARMIJO: f64 = 1e-4;
/// Give up when this many iterations lower the objective by less than
/// STALL_DROP in total.
const STALL_WINDOW: usize = 50;
const STALL_DROP: f64 = 1e-9;

/// Inverse of the Hessian when it is positive definite, otherwise a scaled
/// identity.
fn initial_inverse<O: Objective>(obj: &O, x: &DVector<f64>, g: &DVector<f64>) -> DMatrix<f64> {
    let h = obj.hessian(x);
    if h.iter().all(|v| v.is_finite()) {
        if let Some(ch) = h.clone().cholesky() {
            return ch.inverse();
        }
    }
    let n = x.len();
    let scale = 1.0 / g.amax().max(1.0);
    DMatrix::identity(n, n) * scale
}

/// BFGS with backtracking line search.
pub(crate) fn bfgs<O: Objective>(obj: &O, x0: DVector<f64>, max_iter: usize) -> Minimum {
    let mut x = x0;
    let mut fx = obj.value(&x);
    let mut g = obj.gradient(&x);
    let mut hinv = initial_inverse(obj, &x, &g);
    let mut fresh = true;
    let mut it = 0;
    let mut history = vec![fx];
    while it < max_iter {
        if obj.done(&x, &g) {
            return Minimum { x, fx, iterations: it };
        }
        if history.len() > STALL_WINDOW && history[history.len() - 1 - STALL_WINDOW] - fx < STALL_DROP {
            break;
        }
        it += 1;
        let mut p = -(&hinv * &g);
        let mut slope = p.dot(&g);
        if !(slope < 0.0) {
            p = -g.clone();
            slope = -g.norm_squared();
        }
        let big = p.amax();
        if big > MAX_STEP {
            p *= MAX_STEP / big;
            slope *= MAX_STEP / big;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &p * t;
            let fnew = obj.value(&xn);
            if fnew.is_finite() && fnew <= fx + ARMIJO * t * slope {
                accepted = Some((xn, fnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            if fresh {
                break;
            }
            hinv = initial_inverse(obj, &x, &g);
            fresh = true;
            continue;
        };
        let gn = obj.gradient(&xn);
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        x = xn;
        fx = fnew;
        g = gn;
        history.push(fx);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let hy = &hinv * &y;
            let yhy = y.dot(&hy);
            hinv += (&s * s.transpose()) * (rho * (1.0 + rho * yhy)) - (&hy * s.transpose() + &s * hy.transpose()) * rho;
            fresh = false;
        } else {
            hinv = initial_inverse(obj, &x, &g);
            fresh = true;
        }
    }
    Minimum { x, fx, iterations: it }
}
