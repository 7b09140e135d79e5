//! The five-parameter distribution: parameters, sub-model patterns, density,
//! distribution function, quantile function and sampler.

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, Accuracy};

/// θ = (α, β, γ, δ, λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    lambda: f64,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        Params::new(r.alpha, r.beta, r.gamma, r.delta, r.lambda)
    }
}

impl Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Result<Self> {
        let pos = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive and finite, got {v}")))
            }
        };
        pos("alpha", alpha)?;
        pos("beta", beta)?;
        pos("gamma", gamma)?;
        pos("lambda", lambda)?;
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delta must be nonnegative and finite, got {delta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
            lambda,
        })
    }

    pub fn from_array(v: [f64; 5]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4])
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.alpha, self.beta, self.gamma, self.delta, self.lambda]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn get(&self, name: ParamName) -> f64 {
        self.as_array()[name.index()]
    }

    /// ln B(γ, δ + 1).
    pub(crate) fn log_norm(&self) -> f64 {
        specfun::lbeta(self.gamma, self.delta + 1.0)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.alpha, self.beta, self.gamma, self.delta, self.lambda
        )
    }
}

impl FromStr for Params {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParams(format!("cannot parse {s:?}: {e}")))?;
        if vals.len() != 5 {
            return Err(Error::InvalidParams(format!(
                "expected 5 comma-separated values, got {}",
                vals.len()
            )));
        }
        Self::new(vals[0], vals[1], vals[2], vals[3], vals[4])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamName {
    Alpha,
    Beta,
    Gamma,
    Delta,
    Lambda,
}

impl ParamName {
    pub const ALL: [ParamName; 5] = [
        ParamName::Alpha,
        ParamName::Beta,
        ParamName::Gamma,
        ParamName::Delta,
        ParamName::Lambda,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ParamName::Alpha => "alpha",
            ParamName::Beta => "beta",
            ParamName::Gamma => "gamma",
            ParamName::Delta => "delta",
            ParamName::Lambda => "lambda",
        }
    }
}

/// A named constraint pattern over [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubModel {
    GKw,
    BKw,
    KwKw,
    EKw,
    Mc,
    Beta,
    BP,
    Kw,
}

use ParamName::{Alpha as A, Beta as B, Delta as D, Gamma as G, Lambda as L};

impl SubModel {
    pub const ALL: [SubModel; 8] = [
        SubModel::GKw,
        SubModel::BKw,
        SubModel::KwKw,
        SubModel::EKw,
        SubModel::Mc,
        SubModel::Beta,
        SubModel::BP,
        SubModel::Kw,
    ];

    pub fn fixed(self) -> &'static [(ParamName, f64)] {
        match self {
            SubModel::GKw => &[],
            SubModel::BKw => &[(L, 1.0)],
            SubModel::KwKw => &[(G, 1.0)],
            SubModel::EKw => &[(G, 1.0), (D, 0.0)],
            SubModel::Mc | SubModel::BP => &[(A, 1.0), (B, 1.0)],
            SubModel::Beta => &[(A, 1.0), (B, 1.0), (L, 1.0)],
            SubModel::Kw => &[(G, 1.0), (D, 0.0), (L, 1.0)],
        }
    }

    pub fn free_count(self) -> usize {
        5 - self.fixed().len()
    }

    pub fn is_fixed(self, p: ParamName) -> bool {
        self.fixed().iter().any(|&(q, _)| q == p)
    }

    /// Indices (into the five-vector) of the free parameters, in order.
    pub fn free_indices(self) -> Vec<usize> {
        ParamName::ALL
            .iter()
            .filter(|&&p| !self.is_fixed(p))
            .map(|p| p.index())
            .collect()
    }

    pub fn free_names(self) -> Vec<ParamName> {
        ParamName::ALL
            .into_iter()
            .filter(|&p| !self.is_fixed(p))
            .collect()
    }

    /// True when every constraint of `other` is also a constraint of `self`,
    /// i.e. `self` is a special case of `other` (or the same pattern).
    pub fn nested_in(self, other: SubModel) -> bool {
        other
            .fixed()
            .iter()
            .all(|c| self.fixed().iter().any(|d| d == c))
    }

    pub fn name(self) -> &'static str {
        match self {
            SubModel::GKw => "gkw",
            SubModel::BKw => "bkw",
            SubModel::KwKw => "kwkw",
            SubModel::EKw => "ekw",
            SubModel::Mc => "mc",
            SubModel::Beta => "beta",
            SubModel::BP => "bp",
            SubModel::Kw => "kw",
        }
    }

    /// Extracts the free coordinates of `theta` for this pattern.
    pub fn free_values(self, theta: &Params) -> Vec<f64> {
        let a = theta.as_array();
        self.free_indices().into_iter().map(|i| a[i]).collect()
    }

    /// Replaces the fixed slots of `theta` by this pattern's values.
    pub fn project(self, theta: &Params) -> Params {
        let mut a = theta.as_array();
        for &(p, v) in self.fixed() {
            a[p.index()] = v;
        }
        Params::from_array(a).expect("projection keeps parameters valid")
    }
}

impl fmt::Display for SubModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SubModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gkw" => Ok(SubModel::GKw),
            "bkw" => Ok(SubModel::BKw),
            "kwkw" | "kkw" => Ok(SubModel::KwKw),
            "ekw" => Ok(SubModel::EKw),
            "mc" | "gb1" => Ok(SubModel::Mc),
            "beta" => Ok(SubModel::Beta),
            "bp" => Ok(SubModel::BP),
            "kw" => Ok(SubModel::Kw),
            other => Err(Error::InvalidParams(format!("unknown model {other:?}"))),
        }
    }
}

/// Fills the fixed slots of `sub` and places `free_values` in the rest.
pub fn apply_submodel(sub: SubModel, free_values: &[f64]) -> Result<Params> {
    if free_values.len() != sub.free_count() {
        return Err(Error::InvalidParams(format!(
            "{sub} takes {} free values, got {}",
            sub.free_count(),
            free_values.len()
        )));
    }
    let mut a = [0.0; 5];
    for &(p, v) in sub.fixed() {
        a[p.index()] = v;
    }
    for (i, v) in sub.free_indices().into_iter().zip(free_values) {
        a[i] = *v;
    }
    Params::from_array(a)
}

/// ln(1 - e^a) for a <= 0.
pub(crate) fn log1mexp(a: f64) -> f64 {
    if a > -std::f64::consts::LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// `c * v` with the convention 0 · ±inf = 0.
#[inline]
pub(crate) fn mul0(c: f64, v: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * v
    }
}

/// Logarithms of the nested transforms at one point x = e^t:
/// `l1 = ln(1 - x^α)`, `ly = ln y` with y = 1 - (1 - x^α)^β, and
/// `lz1 = ln(1 - y^λ)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Point {
    pub t: f64,
    pub l1: f64,
    pub ly: f64,
    pub lz1: f64,
}

impl Point {
    pub fn from_log_x(theta: &Params, t: f64) -> Self {
        let l1 = log1mexp(theta.alpha * t);
        let ly = log1mexp(theta.beta * l1);
        let lz1 = log1mexp(theta.lambda * ly);
        Self { t, l1, ly, lz1 }
    }

    pub fn new(theta: &Params, x: f64) -> Self {
        Self::from_log_x(theta, x.ln())
    }

    pub fn log_density(&self, theta: &Params) -> f64 {
        let Params {
            alpha,
            beta,
            gamma,
            delta,
            lambda,
        } = *theta;
        lambda.ln() + alpha.ln() + beta.ln() - theta.log_norm()
            + mul0(alpha - 1.0, self.t)
            + mul0(beta - 1.0, self.l1)
            + mul0(gamma * lambda - 1.0, self.ly)
            + mul0(delta, self.lz1)
    }
}

/// Density f(x; θ); zero outside (0, 1).
pub fn pdf(theta: &Params, x: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return 0.0;
    }
    Point::new(theta, x).log_density(theta).exp()
}

/// ln f(x; θ) for 0 < x < 1.
pub fn log_pdf(theta: &Params, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain {
            what: "log_pdf",
            value: x,
        });
    }
    Ok(Point::new(theta, x).log_density(theta))
}

/// Distribution function F(x; θ) = I_z(γ, δ + 1) with z = [1 - (1 - x^α)^β]^λ.
pub fn cdf(theta: &Params, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let p = Point::new(theta, x);
    let lz = theta.lambda * p.ly;
    specfun::inc_beta_pair(lz.exp(), p.lz1.exp(), theta.gamma, theta.delta + 1.0)
}

/// Survival function 1 - F(x; θ), computed without cancellation.
pub fn sf(theta: &Params, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    let p = Point::new(theta, x);
    let lz = theta.lambda * p.ly;
    specfun::inc_beta_upper_pair(lz.exp(), p.lz1.exp(), theta.gamma, theta.delta + 1.0)
}

/// Quantile function, inverting the incomplete beta ratio and then the
/// three power transforms.
pub fn quantile(theta: &Params, u: f64) -> Result<f64> {
    quantile_with(theta, u, &Accuracy::default())
}

pub fn quantile_with(theta: &Params, u: f64, acc: &Accuracy) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain {
            what: "quantile",
            value: u,
        });
    }
    let (z, zc) = specfun::inv_inc_beta_pair(u, theta.gamma, theta.delta + 1.0, acc)?;
    if z <= 0.0 {
        return Ok(0.0);
    }
    if zc <= 0.0 {
        return Ok(1.0);
    }
    let lz = if z < 0.5 { z.ln() } else { (-zc).ln_1p() };
    let ly = lz / theta.lambda;
    let l1 = log1mexp(ly) / theta.beta;
    let at = log1mexp(l1);
    Ok((at / theta.alpha).exp())
}

/// `n` draws by inversion, deterministic in `seed`.
pub fn sample(theta: &Params, n: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with_rng(theta, n, &mut rng)
}

pub fn sample_with_rng<R: Rng + ?Sized>(theta: &Params, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let acc = Accuracy::default();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u: f64 = rng.sample(Open01);
        let x = quantile_with(theta, u, &acc)?;
        if x > 0.0 && x < 1.0 {
            out.push(x);
        }
    }
    Ok(out)
}

/// For X ~ GKw(1, β, γ, δ, λ), the law of X^{1/a}.
pub fn power_transform_params(theta: &Params, a: f64) -> Result<Params> {
    if theta.alpha != 1.0 {
        return Err(Error::Precondition(format!(
            "power transform needs alpha = 1, got {}",
            theta.alpha
        )));
    }
    Params::new(a, theta.beta, theta.gamma, theta.delta, theta.lambda)
}

/// Density of Y = -ln X at y > 0.
pub fn lgkw_pdf(theta: &Params, y: f64) -> Result<f64> {
    if !(y > 0.0) || y.is_nan() {
        return Err(Error::Domain {
            what: "lgkw_pdf",
            value: y,
        });
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    Ok((Point::from_log_x(theta, -y).log_density(theta) - y).exp())
}
