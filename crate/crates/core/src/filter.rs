//! Weight-update rules for the LMS family.
//!
//! All four rules share one shape:
//!
//! ```text
//! e      = d - w^T x
//! w'     = leak * w + mu * e * x - rho_pl * g(w)
//! g_i(w) = p * sgn(w_i) / (eps_pl + |w_i|^(1 - p))
//! ```
//!
//! | variant        | leak          | constraint |
//! |----------------|---------------|------------|
//! | `Lms`          | 1             | none       |
//! | `Llms`         | 1 - mu*gamma  | none       |
//! | `LpLikeLms`    | 1             | rho_pl * g |
//! | `LpLikeLlms`   | 1 +/- mu*gamma| rho_pl * g |
//!
//! `g` is the regularized gradient of the p-norm-like penalty `sum |w_i|^p`,
//! applied elementwise so each tap is attracted to zero independently.
//! The `+` leak of `LpLikeLlms` amplifies the weights every step; the
//! zero-attracting term is what keeps it bounded.
//!
//! Stability of the data term needs `0 < mu < 1 / lambda_max(R)` for input
//! covariance `R`. That bound is not checked here.
//!
//! Every step is a pure function of `(state, x, desired, cfg)`. A step whose
//! result contains a non-finite weight fails with [`Error::Divergence`] and
//! leaves the caller's state untouched.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dense real tap vector. Used both for the true impulse response and for
/// the running estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::Parameter("weight vector must have at least one tap".into()));
        }
        if let Some(i) = taps.iter().position(|t| !t.is_finite()) {
            return Err(Error::Parameter(format!("tap {i} is not finite")));
        }
        Ok(Self(taps))
    }

    pub fn zeros(n_taps: usize) -> Self {
        Self(vec![0.0; n_taps])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for WeightVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Sliding input window `[x_k, x_{k-1}, ..., x_{k-N+1}]`, most recent first.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorVector(Vec<f64>);

impl RegressorVector {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Parameter(format!("regressor sample {i} is not finite")));
        }
        Ok(Self(samples))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for RegressorVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Lms,
    Llms,
    LpLikeLms,
    LpLikeLlms,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Lms, Variant::Llms, Variant::LpLikeLms, Variant::LpLikeLlms];

    /// Identifier used in config files, CSV output and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Variant::Lms => "lms",
            Variant::Llms => "llms",
            Variant::LpLikeLms => "lp_like_lms",
            Variant::LpLikeLlms => "lp_like_llms",
        }
    }

    /// Human-readable label for plot legends.
    pub fn label(self) -> &'static str {
        match self {
            Variant::Lms => "LMS",
            Variant::Llms => "LLMS",
            Variant::LpLikeLms => "lp-like-LMS",
            Variant::LpLikeLlms => "lp-like-LLMS",
        }
    }

    pub fn uses_leak(self) -> bool {
        matches!(self, Variant::Llms | Variant::LpLikeLlms)
    }

    pub fn uses_constraint(self) -> bool {
        matches!(self, Variant::LpLikeLms | Variant::LpLikeLlms)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == normalized)
            .ok_or_else(|| {
                Error::Parameter(format!(
                    "unknown algorithm `{s}` (expected one of lms, llms, lp_like_lms, lp_like_llms)"
                ))
            })
    }
}

/// Sign of the leak multiplier `1 +/- mu*gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeakSign {
    Plus,
    Minus,
}

impl LeakSign {
    pub fn name(self) -> &'static str {
        match self {
            LeakSign::Plus => "plus",
            LeakSign::Minus => "minus",
        }
    }
}

impl FromStr for LeakSign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(LeakSign::Plus),
            "minus" | "-" => Ok(LeakSign::Minus),
            _ => Err(Error::Parameter(format!(
                "unknown leak sign `{s}` (expected plus or minus)"
            ))),
        }
    }
}

/// Variant tag plus the scalar hyperparameters. Fields that the selected
/// variant does not use are never read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    /// Step size.
    pub mu: f64,
    /// Leakage factor.
    pub gamma: f64,
    /// Weight of the zero-attracting term, `mu * gamma_pl`.
    pub rho_pl: f64,
    /// Denominator regularizer of the zero-attracting term.
    pub epsilon_pl: f64,
    /// Exponent of the p-norm-like penalty, in (0, 1).
    pub p: f64,
    pub leak_sign: LeakSign,
}

impl AlgorithmConfig {
    pub fn lms(mu: f64) -> Self {
        Self {
            variant: Variant::Lms,
            mu,
            gamma: 0.0,
            rho_pl: 0.0,
            epsilon_pl: 10.0,
            p: 0.5,
            leak_sign: LeakSign::Minus,
        }
    }

    pub fn llms(mu: f64, gamma: f64) -> Self {
        Self {
            variant: Variant::Llms,
            gamma,
            ..Self::lms(mu)
        }
    }

    pub fn lp_like_lms(mu: f64, rho_pl: f64, epsilon_pl: f64, p: f64) -> Self {
        Self {
            variant: Variant::LpLikeLms,
            rho_pl,
            epsilon_pl,
            p,
            ..Self::lms(mu)
        }
    }

    /// Defaults to the amplifying `1 + mu*gamma` leak.
    pub fn lp_like_llms(mu: f64, gamma: f64, rho_pl: f64, epsilon_pl: f64, p: f64) -> Self {
        Self {
            variant: Variant::LpLikeLlms,
            mu,
            gamma,
            rho_pl,
            epsilon_pl,
            p,
            leak_sign: LeakSign::Plus,
        }
    }

    pub fn with_leak_sign(mut self, leak_sign: LeakSign) -> Self {
        self.leak_sign = leak_sign;
        self
    }

    /// Checks the ranges that matter for `self.variant`.
    ///
    /// The step functions themselves accept degenerate values (`mu = 0`,
    /// `gamma = 0`, `rho_pl = 0`) so that the reductions between variants
    /// can be exercised directly; this is the check applied to user input.
    pub fn validate(&self) -> Result<()> {
        let v = self.variant;
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Validation(format!(
                "{v}: mu must satisfy mu > 0, got {}",
                self.mu
            )));
        }
        if v.uses_leak() && !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Validation(format!(
                "{v}: gamma must satisfy 0 < gamma < 1, got {}",
                self.gamma
            )));
        }
        if v.uses_constraint() {
            if !(self.p > 0.0 && self.p < 1.0) {
                return Err(Error::Validation(format!(
                    "{v}: p must satisfy 0 < p < 1, got {}",
                    self.p
                )));
            }
            if !(self.rho_pl.is_finite() && self.rho_pl >= 0.0) {
                return Err(Error::Validation(format!(
                    "{v}: rho_pl must satisfy rho_pl >= 0, got {}",
                    self.rho_pl
                )));
            }
            if !(self.epsilon_pl.is_finite() && self.epsilon_pl > 0.0) {
                return Err(Error::Validation(format!(
                    "{v}: epsilon_pl must satisfy epsilon_pl > 0, got {}",
                    self.epsilon_pl
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    pub weights: WeightVector,
    /// Number of successful steps taken so far.
    pub iteration: u64,
}

impl FilterState {
    pub fn new(weights: WeightVector) -> Self {
        Self { weights, iteration: 0 }
    }

    pub fn zeros(n_taps: usize) -> Self {
        Self::new(WeightVector::zeros(n_taps))
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p must satisfy 0 < p < 1, got {p}")))
    }
}

/// Sign function with `sgn(0) = 0`.
#[inline]
fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Filter output `w^T x`.
pub fn predict(state: &FilterState, x: &RegressorVector) -> Result<f64> {
    check_len(state.weights.len(), x.len())?;
    Ok(dot(&state.weights, x))
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

#[inline]
pub fn instantaneous_error(desired: f64, predicted: f64) -> f64 {
    desired - predicted
}

/// `sum_i |w_i|^p`, with `0^p = 0`.
pub fn pnorm_like(w: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(w.iter().map(|&wi| if wi == 0.0 { 0.0 } else { wi.abs().powf(p) }).sum())
}

/// Elementwise `p * sgn(w_i) / (eps + |w_i|^(1 - p))`.
///
/// Zero taps map to zero even when `eps = 0`.
pub fn pnorm_like_gradient_term(w: &[f64], p: f64, epsilon_pl: f64) -> Result<WeightVector> {
    check_exponent(p)?;
    if epsilon_pl.is_nan() || epsilon_pl < 0.0 {
        return Err(Error::Parameter(format!("epsilon_pl must be >= 0, got {epsilon_pl}")));
    }
    Ok(WeightVector(
        w.iter().map(|&wi| constraint_element(wi, p, epsilon_pl)).collect(),
    ))
}

#[inline]
fn constraint_element(wi: f64, p: f64, epsilon_pl: f64) -> f64 {
    if wi == 0.0 {
        0.0
    } else {
        p * sgn(wi) / (epsilon_pl + wi.abs().powf(1.0 - p))
    }
}

/// Shared kernel: `w' = leak * w + mu * e * x - rho_pl * g(w)`.
fn update(
    state: &FilterState,
    x: &RegressorVector,
    desired: f64,
    mu: f64,
    leak: f64,
    constraint: Option<(f64, f64, f64)>,
) -> Result<(FilterState, f64)> {
    let e = instantaneous_error(desired, predict(state, x)?);
    let mu_e = mu * e;
    let w = state.weights.as_slice();

    let taps: Vec<f64> = match constraint {
        None => w.iter().zip(x.iter()).map(|(&wi, &xi)| leak * wi + mu_e * xi).collect(),
        Some((rho_pl, p, epsilon_pl)) => {
            check_exponent(p)?;
            w.iter()
                .zip(x.iter())
                .map(|(&wi, &xi)| leak * wi + mu_e * xi - rho_pl * constraint_element(wi, p, epsilon_pl))
                .collect()
        }
    };

    if !e.is_finite() || taps.iter().any(|t| !t.is_finite()) {
        return Err(Error::Divergence {
            iteration: state.iteration,
        });
    }
    let next = FilterState {
        weights: WeightVector(taps),
        iteration: state.iteration + 1,
    };
    Ok((next, e))
}

/// `w' = w + mu * e * x`.
pub fn lms_step(state: &FilterState, x: &RegressorVector, desired: f64, cfg: &AlgorithmConfig) -> Result<FilterState> {
    update(state, x, desired, cfg.mu, 1.0, None).map(|(s, _)| s)
}

/// `w' = (1 - mu*gamma) w + mu * e * x`.
pub fn llms_step(state: &FilterState, x: &RegressorVector, desired: f64, cfg: &AlgorithmConfig) -> Result<FilterState> {
    update(state, x, desired, cfg.mu, 1.0 - cfg.mu * cfg.gamma, None).map(|(s, _)| s)
}

/// `w' = w + mu * e * x - rho_pl * g(w)`.
pub fn lp_like_lms_step(
    state: &FilterState,
    x: &RegressorVector,
    desired: f64,
    cfg: &AlgorithmConfig,
) -> Result<FilterState> {
    update(
        state,
        x,
        desired,
        cfg.mu,
        1.0,
        Some((cfg.rho_pl, cfg.p, cfg.epsilon_pl)),
    )
    .map(|(s, _)| s)
}

/// `w' = (1 +/- mu*gamma) w + mu * e * x - rho_pl * g(w)`, sign from `cfg.leak_sign`.
pub fn lp_like_llms_step(
    state: &FilterState,
    x: &RegressorVector,
    desired: f64,
    cfg: &AlgorithmConfig,
) -> Result<FilterState> {
    lp_like_llms(state, x, desired, cfg).map(|(s, _)| s)
}

fn lp_like_llms(
    state: &FilterState,
    x: &RegressorVector,
    desired: f64,
    cfg: &AlgorithmConfig,
) -> Result<(FilterState, f64)> {
    let leak = match cfg.leak_sign {
        LeakSign::Plus => 1.0 + cfg.mu * cfg.gamma,
        LeakSign::Minus => 1.0 - cfg.mu * cfg.gamma,
    };
    update(
        state,
        x,
        desired,
        cfg.mu,
        leak,
        Some((cfg.rho_pl, cfg.p, cfg.epsilon_pl)),
    )
}

/// Advances `state` by one step of `cfg.variant`. Also returns the
/// pre-update error `e_k`.
pub fn step(
    state: &FilterState,
    x: &RegressorVector,
    desired: f64,
    cfg: &AlgorithmConfig,
) -> Result<(FilterState, f64)> {
    match cfg.variant {
        Variant::Lms => update(state, x, desired, cfg.mu, 1.0, None),
        Variant::Llms => update(state, x, desired, cfg.mu, 1.0 - cfg.mu * cfg.gamma, None),
        Variant::LpLikeLms => update(
            state,
            x,
            desired,
            cfg.mu,
            1.0,
            Some((cfg.rho_pl, cfg.p, cfg.epsilon_pl)),
        ),
        Variant::LpLikeLlms => lp_like_llms(state, x, desired, cfg),
    }
}
