use serde::Serialize;

/// Truncation policy for every infinite sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub tail_tol: f64,
    pub report: bool,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 400,
            tail_tol: 1e-10,
            report: true,
        }
    }
}

impl SeriesControl {
    pub fn new(max_terms: usize, tail_tol: f64) -> crate::Result<Self> {
        if max_terms == 0 || !(tail_tol > 0.0) {
            return Err(crate::Error::Precondition(format!(
                "series control needs max_terms >= 1 and tail_tol > 0 (got {max_terms}, {tail_tol})"
            )));
        }
        Ok(Self {
            max_terms,
            tail_tol,
            report: true,
        })
    }
}

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Plain truncated series.
    Series,
    /// Series whose tail was summed by a Levin u-transform.
    Accelerated,
    /// Series failed; value from adaptive quadrature.
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub terms: usize,
    pub tail_bound: f64,
    pub converged: bool,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl SeriesReport {
    pub fn exact() -> Self {
        Self {
            terms: 0,
            tail_bound: 0.0,
            converged: true,
            method: Method::Series,
            warnings: Vec::new(),
        }
    }

    pub fn quadrature(err: f64, reliable: bool, why: impl Into<String>) -> Self {
        let mut warnings = vec![why.into()];
        if !reliable {
            warnings.push("quadrature did not reach its tolerance".into());
        }
        Self {
            terms: 0,
            tail_bound: err,
            converged: reliable,
            method: Method::Quadrature,
            warnings,
        }
    }

    /// Folds `other` into `self`, scaling its tail bound by `weight`.
    pub fn absorb(&mut self, other: &SeriesReport, weight: f64) {
        self.terms += other.terms;
        self.tail_bound += weight.abs() * other.tail_bound;
        self.converged &= other.converged;
        self.method = match (self.method, other.method) {
            (Method::Quadrature, _) | (_, Method::Quadrature) => Method::Quadrature,
            (Method::Accelerated, _) | (_, Method::Accelerated) => Method::Accelerated,
            _ => Method::Series,
        };
        for w in &other.warnings {
            if !self.warnings.contains(w) {
                self.warnings.push(w.clone());
            }
        }
    }

    pub fn is_quadrature(&self) -> bool {
        self.method == Method::Quadrature
    }
}

/// A value together with the account of how it was summed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub report: SeriesReport,
}

impl SeriesValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            report: SeriesReport::exact(),
        }
    }
}

/// Incremental summation with the three-small-terms stopping rule.
pub(crate) struct Summer {
    tail_tol: f64,
    max_terms: usize,
    sum: f64,
    comp: f64,
    run: usize,
    terms: Vec<f64>,
    stopped: bool,
}

impl Summer {
    pub fn new(ctl: &SeriesControl) -> Self {
        Self {
            tail_tol: ctl.tail_tol,
            max_terms: ctl.max_terms,
            sum: 0.0,
            comp: 0.0,
            run: 0,
            terms: Vec::new(),
            stopped: false,
        }
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }

    /// True once the stopping rule or the term budget ended the sum.
    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    /// Finish a sum whose terms ran out before the stopping rule fired,
    /// because the coefficient list feeding it was itself truncated.
    /// `coeff` accounts for the missing coefficients.
    pub fn finish_exhausted(self, coeff: &SeriesReport) -> (f64, SeriesReport) {
        let v = self.sum();
        let mut rep = SeriesReport {
            terms: self.terms.len(),
            tail_bound: 0.0,
            converged: v.is_finite(),
            method: Method::Series,
            warnings: vec![],
        };
        rep.absorb(coeff, 1.0);
        (v, rep)
    }

    /// Adds a term; returns true once summation should stop.
    pub fn push(&mut self, t: f64) -> bool {
        if self.stopped {
            return true;
        }
        // Neumaier compensated addition
        let s = self.sum + t;
        if self.sum.abs() >= t.abs() {
            self.comp += (self.sum - s) + t;
        } else {
            self.comp += (t - s) + self.sum;
        }
        self.sum = s;
        self.terms.push(t);
        if !t.is_finite() {
            self.stopped = true;
            return true;
        }
        if t.abs() <= self.tail_tol * self.sum().abs() {
            self.run += 1;
        } else {
            self.run = 0;
        }
        if self.run >= 3 || self.terms.len() >= self.max_terms {
            self.stopped = true;
        }
        self.stopped
    }

    /// Finish a series that ended on its own (all remaining terms are zero).
    pub fn finish_finite(self) -> (f64, SeriesReport) {
        let v = self.sum();
        let ok = v.is_finite();
        (
            v,
            SeriesReport {
                terms: self.terms.len(),
                tail_bound: 0.0,
                converged: ok,
                method: Method::Series,
                warnings: if ok { vec![] } else { vec!["non-finite term".into()] },
            },
        )
    }

    /// Finish an infinite series, trying acceleration if the stopping rule
    /// was not met within the term budget.
    pub fn finish(self, what: &str) -> (f64, SeriesReport) {
        let n = self.terms.len();
        let v = self.sum();
        if !v.is_finite() {
            return (
                v,
                SeriesReport {
                    terms: n,
                    tail_bound: f64::INFINITY,
                    converged: false,
                    method: Method::Series,
                    warnings: vec![format!("{what}: non-finite term")],
                },
            );
        }
        if self.run >= 3 {
            return (
                v,
                SeriesReport {
                    terms: n,
                    tail_bound: ratio_tail(&self.terms),
                    converged: true,
                    method: Method::Series,
                    warnings: vec![],
                },
            );
        }
        if let Some((acc, err)) = decaying(&self.terms).then(|| levin_best(&self.terms)).flatten() {
            if err <= 100.0 * self.tail_tol * acc.abs().max(1.0) {
                return (
                    acc,
                    SeriesReport {
                        terms: n,
                        tail_bound: err,
                        converged: true,
                        method: Method::Accelerated,
                        warnings: vec![],
                    },
                );
            }
        }
        (
            v,
            SeriesReport {
                terms: n,
                tail_bound: ratio_tail(&self.terms).max(self.tail_tol * v.abs()),
                converged: false,
                method: Method::Series,
                warnings: vec![format!("{what}: stopping rule not met within {n} terms")],
            },
        )
    }
}

/// Acceleration is only trusted on tails that visibly shrink.
fn decaying(terms: &[f64]) -> bool {
    let n = terms.len();
    if n < 8 {
        return false;
    }
    let peak = |s: &[f64]| s.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    peak(&terms[3 * n / 4..]) < 0.66 * peak(&terms[n / 2..3 * n / 4])
}

/// Tail estimate from the last few terms: the larger of a geometric fit
/// and an algebraic fit |t_m| ~ m^{-p}, which the geometric fit understates
/// when the ratios creep towards one.
fn ratio_tail(terms: &[f64]) -> f64 {
    let n = terms.len();
    if n == 0 {
        return 0.0;
    }
    let last = terms[n - 1].abs();
    if last == 0.0 {
        return 0.0;
    }
    let mut rho: f64 = 0.0;
    let mut p = f64::INFINITY;
    let first = n.saturating_sub(4);
    for (k, w) in terms[first..].windows(2).enumerate() {
        if w[0] != 0.0 {
            let r = (w[1] / w[0]).abs();
            rho = rho.max(r);
            let m = (first + k + 2) as f64;
            p = p.min(-r.ln() / (m / (m - 1.0)).ln());
        } else {
            rho = 0.999;
        }
    }
    let rho = rho.min(0.999);
    let geometric = last * rho / (1.0 - rho);
    let algebraic = if p > 1.0 { last * n as f64 / (p - 1.0) } else { f64::INFINITY };
    geometric.max(algebraic.min(last * 1e3 * n as f64))
}

/// Levin u-transform L_k^{(n)} of the series with the given terms.
pub(crate) fn levin_u(terms: &[f64], n: usize, k: usize) -> Option<f64> {
    if n + k >= terms.len() {
        return None;
    }
    let beta = 1.0;
    let mut partial = terms[..n].iter().sum::<f64>();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut binom = 1.0;
    let base = beta + (n + k) as f64;
    for j in 0..=k {
        let m = n + j;
        partial += terms[m];
        let a = terms[m];
        if a == 0.0 {
            return None;
        }
        let omega = (beta + m as f64) * a;
        let w = binom * ((beta + m as f64) / base).powi(k as i32 - 1) / omega;
        let w = if j % 2 == 0 { w } else { -w };
        num += w * partial;
        den += w;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let v = num / den;
    v.is_finite().then_some(v)
}

/// Scans transforms of increasing order and returns the value whose
/// neighbouring orders agree best, with that disagreement as error.
pub(crate) fn levin_best(terms: &[f64]) -> Option<(f64, f64)> {
    if terms.len() < 8 {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    // early terms of long series are often far from the asymptotic regime
    let starts: &[usize] = if terms.len() >= 32 {
        &[terms.len() / 4, terms.len() / 2]
    } else {
        &[1]
    };
    for &n in starts {
        let kmax = 40.min(terms.len().saturating_sub(n + 1));
        let mut prev: Option<f64> = None;
        for k in 2..=kmax {
            let Some(v) = levin_u(terms, n, k) else {
                prev = None;
                continue;
            };
            if let Some(p) = prev {
                let err = (v - p).abs();
                if best.map_or(true, |(_, e)| err < e) {
                    best = Some((v, err));
                }
            }
            prev = Some(v);
        }
    }
    best
}
