//! Independent reference computations for the update rules.
//!
//! Nothing here calls into the update kernels: the expected updates are
//! rebuilt from the cost functions by central finite differences.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_lms::{AlgorithmConfig, FilterState, LeakSign, RegressorVector, Variant, WeightVector};

/// Central-difference gradient of `f` at `w`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, w: &[f64], h: f64) -> Vec<f64> {
    let mut probe = w.to_vec();
    (0..w.len())
        .map(|i| {
            let step = h * w[i].abs().max(1.0);
            probe[i] = w[i] + step;
            let up = f(&probe);
            probe[i] = w[i] - step;
            let down = f(&probe);
            probe[i] = w[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Instantaneous squared-error cost `(d - w.x)^2 / 2`.
pub fn data_cost(w: &[f64], x: &[f64], d: f64) -> f64 {
    let y: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
    0.5 * (d - y) * (d - y)
}

/// Quadratic leak cost under the convention that the update shows a leak of
/// `mu * gamma`: `(gamma / 2) |w|^2`.
pub fn leak_cost(w: &[f64], gamma: f64) -> f64 {
    0.5 * gamma * w.iter().map(|v| v * v).sum::<f64>()
}

/// `sum |w_i|^p`, written out independently of the library.
pub fn pnorm_like_ref(w: &[f64], p: f64) -> f64 {
    w.iter().map(|v| if *v == 0.0 { 0.0 } else { v.abs().powf(p) }).sum()
}

/// Closed-form zero-attractor `p sgn(w_i) / (eps + |w_i|^(1-p))`.
pub fn attractor_ref(w: &[f64], p: f64, eps: f64) -> Vec<f64> {
    w.iter()
        .map(|&v| {
            let s = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                0.0
            };
            if s == 0.0 {
                0.0
            } else {
                p * s / (eps + v.abs().powf(1.0 - p))
            }
        })
        .collect()
}

/// Expected next weights for `cfg`, built from finite differences of the
/// smooth costs plus the closed-form attractor.
pub fn oracle_update(w: &[f64], x: &[f64], d: f64, cfg: &AlgorithmConfig, h: f64) -> Vec<f64> {
    // Signed leak coefficient: +gamma is gradient descent on (gamma/2)|w|^2,
    // -gamma is the amplifying variant.
    let leak_gamma = match cfg.variant {
        Variant::Lms | Variant::LpLikeLms => 0.0,
        Variant::Llms => cfg.gamma,
        Variant::LpLikeLlms => match cfg.leak_sign {
            LeakSign::Minus => cfg.gamma,
            LeakSign::Plus => -cfg.gamma,
        },
    };
    let grad = fd_gradient(|v| data_cost(v, x, d) + leak_cost(v, leak_gamma), w, h);
    let attractor = if cfg.variant.uses_constraint() {
        attractor_ref(w, cfg.p, cfg.epsilon_pl)
    } else {
        vec![0.0; w.len()]
    };
    w.iter()
        .zip(&grad)
        .zip(&attractor)
        .map(|((wi, gi), ai)| wi - cfg.mu * gi - cfg.rho_pl * ai)
        .collect()
}

/// Expected next weights with `eps = 0`, where the attractor is itself the
/// gradient of `(rho / mu) sum |w_i|^p` and the whole update comes from
/// finite differences of one cost.
pub fn oracle_update_full_cost(w: &[f64], x: &[f64], d: f64, cfg: &AlgorithmConfig, h: f64) -> Vec<f64> {
    assert_eq!(cfg.epsilon_pl, 0.0);
    let leak_gamma = match (cfg.variant, cfg.leak_sign) {
        (Variant::Lms | Variant::LpLikeLms, _) => 0.0,
        (Variant::Llms, _) | (Variant::LpLikeLlms, LeakSign::Minus) => cfg.gamma,
        (Variant::LpLikeLlms, LeakSign::Plus) => -cfg.gamma,
    };
    let gamma_pl = if cfg.variant.uses_constraint() {
        cfg.rho_pl / cfg.mu
    } else {
        0.0
    };
    let grad = fd_gradient(
        |v| data_cost(v, x, d) + leak_cost(v, leak_gamma) + gamma_pl * pnorm_like_ref(v, cfg.p),
        w,
        h,
    );
    w.iter().zip(&grad).map(|(wi, gi)| wi - cfg.mu * gi).collect()
}

/// `max_i |a_i - b_i| / max_i |b_i - base_i|`: error of the update relative
/// to the size of the expected increment.
pub fn increment_rel_error(actual: &[f64], expected: &[f64], base: &[f64]) -> f64 {
    let err = actual
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let scale = expected
        .iter()
        .zip(base)
        .map(|(e, w)| (e - w).abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

/// Elementwise relative difference, `|a - b| / max(|a|, |b|)`, 0 when both are 0.
pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

pub struct Instance {
    pub state: FilterState,
    pub x: RegressorVector,
    pub desired: f64,
    pub mu: f64,
    pub gamma: f64,
    pub rho_pl: f64,
    pub epsilon_pl: f64,
    pub p: f64,
}

impl Instance {
    pub fn w(&self) -> &[f64] {
        &self.state.weights
    }

    pub fn configs(&self) -> [AlgorithmConfig; 5] {
        [
            AlgorithmConfig::lms(self.mu),
            AlgorithmConfig::llms(self.mu, self.gamma),
            AlgorithmConfig::lp_like_lms(self.mu, self.rho_pl, self.epsilon_pl, self.p),
            AlgorithmConfig::lp_like_llms(self.mu, self.gamma, self.rho_pl, self.epsilon_pl, self.p),
            AlgorithmConfig::lp_like_llms(self.mu, self.gamma, self.rho_pl, self.epsilon_pl, self.p)
                .with_leak_sign(LeakSign::Minus),
        ]
    }
}

/// Random instances with every tap at least 0.1 away from zero.
pub fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=32);
            let w = (0..n)
                .map(|_| {
                    let m: f64 = rng.random_range(0.1..2.0);
                    if rng.random_bool(0.5) {
                        m
                    } else {
                        -m
                    }
                })
                .collect();
            let x = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
            Instance {
                state: FilterState::new(WeightVector::new(w).unwrap()),
                x: RegressorVector::new(x).unwrap(),
                desired: rng.random_range(-3.0..3.0),
                mu: rng.random_range(0.001..0.05),
                gamma: rng.random_range(0.001..0.5),
                rho_pl: rng.random_range(0.0001..0.01),
                epsilon_pl: rng.random_range(0.1..20.0),
                p: rng.random_range(0.1..0.9),
            }
        })
        .collect()
}
