//! Seeded generators for the identification experiment: sparse +/-1 impulse
//! responses, unit-variance AR(1) input and white Gaussian noise.

use std::ops::Deref;

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::filter::{RegressorVector, WeightVector};

/// A reproducible random stream keyed by `(seed, stream_id)`.
///
/// Streams sharing a seed but differing in `stream_id` are independent
/// ChaCha streams, so trial `r` sees the same samples no matter which thread
/// runs it or in which order.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// A finite real-valued sample sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Parameter(format!("signal sample {i} is not finite")));
        }
        Ok(Self(samples))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Signal {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Impulse response of `n_taps` with exactly `n_nonzero` taps set to +/-1.
///
/// Positions are drawn uniformly without replacement, then one fair sign
/// per position.
pub fn gen_sparse_system(n_taps: usize, n_nonzero: usize, rng: &mut RngStream) -> Result<WeightVector> {
    if n_nonzero == 0 || n_nonzero > n_taps {
        return Err(Error::Parameter(format!(
            "nonzero tap count must satisfy 1 <= n_nonzero <= n_taps ({n_taps}), got {n_nonzero}"
        )));
    }
    let mut taps = vec![0.0; n_taps];
    for pos in index::sample(rng, n_taps, n_nonzero) {
        taps[pos] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    WeightVector::new(taps)
}

/// `x_0 = u_0`, `x_k = coeff * x_{k-1} + u_k`, then rescaled so the sample
/// variance (denominator `length`) is exactly one. The mean is kept.
pub fn gen_ar1_input(length: usize, coeff: f64, drive_variance: f64, rng: &mut RngStream) -> Result<Signal> {
    if coeff.is_nan() || coeff.abs() >= 1.0 {
        return Err(Error::Parameter(format!(
            "AR(1) coefficient must satisfy |coeff| < 1, got {coeff}"
        )));
    }
    if !(drive_variance.is_finite() && drive_variance > 0.0) {
        return Err(Error::Parameter(format!(
            "drive variance must be > 0, got {drive_variance}"
        )));
    }
    if length < 2 {
        return Err(Error::Parameter(format!(
            "AR(1) input needs at least 2 samples to normalize, got {length}"
        )));
    }
    let drive = Normal::new(0.0, drive_variance.sqrt()).expect("finite positive std");
    let mut samples = Vec::with_capacity(length);
    let mut prev = 0.0;
    for _ in 0..length {
        prev = coeff * prev + drive.sample(rng);
        samples.push(prev);
    }

    let scale = sample_variance(&samples).sqrt().recip();
    samples.iter_mut().for_each(|s| *s *= scale);
    Signal::new(samples)
}

/// I.i.d. zero-mean Gaussian samples.
pub fn gen_gaussian_noise(length: usize, variance: f64, rng: &mut RngStream) -> Result<Signal> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(Error::Parameter(format!("noise variance must be >= 0, got {variance}")));
    }
    let dist = Normal::new(0.0, variance.sqrt()).expect("finite nonnegative std");
    Signal::new((0..length).map(|_| dist.sample(rng)).collect())
}

/// `[x_k, x_{k-1}, ..., x_{k-n+1}]`, padding indices before the start of the
/// signal with zeros.
pub fn regressor_at(x: &Signal, k: usize, n_taps: usize) -> Result<RegressorVector> {
    if k >= x.len() {
        return Err(Error::Index { index: k, len: x.len() });
    }
    let window = (0..n_taps).map(|i| if i <= k { x[k - i] } else { 0.0 }).collect();
    RegressorVector::new(window)
}

/// Population variance (denominator `len`).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
}
