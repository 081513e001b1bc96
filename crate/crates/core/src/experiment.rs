//! Monte-Carlo sparse system identification.
//!
//! Each run `r` draws one true system, one AR(1) input and one noise
//! realization from `RngStream(master_seed, r)` and feeds the same three
//! signals to every algorithm (paired design). Squared-deviation traces are
//! averaged over runs in run-index order, so the resulting curves do not
//! depend on how runs are scheduled across threads.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filter::{step, AlgorithmConfig, FilterState, LeakSign, Variant, WeightVector};
use crate::signal::{gen_ar1_input, gen_gaussian_noise, gen_sparse_system, regressor_at, RngStream, Signal};

/// A trace value above this aborts the trial.
pub const TRACE_ABORT_THRESHOLD: f64 = 1e6;

pub type Schedule = BTreeMap<(Variant, usize), AlgorithmConfig>;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n_taps: usize,
    /// Nonzero-tap counts, one experiment cell per entry.
    pub sparsity_levels: Vec<usize>,
    pub algorithms: Vec<Variant>,
    pub iterations: usize,
    pub runs: usize,
    pub ar_coeff: f64,
    pub drive_variance: f64,
    pub noise_variance: f64,
    pub master_seed: u64,
    pub schedule: Schedule,
    /// Trailing iterations averaged for the steady-state estimate.
    pub steady_state_window: usize,
}

pub const DEFAULT_SEED: u64 = 1;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_taps: 16,
            sparsity_levels: vec![1, 4, 8, 16],
            algorithms: Variant::ALL.to_vec(),
            iterations: 8000,
            runs: 200,
            ar_coeff: 0.8,
            drive_variance: 1e-3,
            noise_variance: 1e-2,
            master_seed: DEFAULT_SEED,
            schedule: default_schedule(),
            steady_state_window: 500,
        }
    }
}

impl ExperimentConfig {
    /// Length of the generated input and noise signals: the update
    /// iterations plus a margin of one filter length.
    pub fn signal_length(&self) -> usize {
        self.iterations + self.n_taps
    }

    pub fn config_for(&self, variant: Variant, sparsity: usize) -> Result<&AlgorithmConfig> {
        self.schedule.get(&(variant, sparsity)).ok_or_else(|| {
            Error::Validation(format!(
                "no schedule entry for {variant} at sparsity {sparsity}/{}",
                self.n_taps
            ))
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        if self.n_taps == 0 {
            return fail("n_taps must be >= 1".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be >= 1".into());
        }
        if self.runs == 0 {
            return fail("runs must be >= 1".into());
        }
        if self.sparsity_levels.is_empty() {
            return fail("sparsity_levels must not be empty".into());
        }
        if self.algorithms.is_empty() {
            return fail("algorithms must not be empty".into());
        }
        for &k in &self.sparsity_levels {
            if k == 0 || k > self.n_taps {
                return fail(format!(
                    "sparsity level must satisfy 1 <= level <= n_taps ({}), got {k}",
                    self.n_taps
                ));
            }
        }
        if self.ar_coeff.is_nan() || self.ar_coeff.abs() >= 1.0 {
            return fail(format!("ar_coeff must satisfy |ar_coeff| < 1, got {}", self.ar_coeff));
        }
        if !(self.drive_variance.is_finite() && self.drive_variance > 0.0) {
            return fail(format!("drive_variance must be > 0, got {}", self.drive_variance));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return fail(format!("noise_variance must be >= 0, got {}", self.noise_variance));
        }
        if self.steady_state_window == 0 || self.steady_state_window > self.iterations {
            return fail(format!(
                "steady_state_window must satisfy 1 <= window <= iterations ({}), got {}",
                self.iterations, self.steady_state_window
            ));
        }
        for &variant in &self.algorithms {
            for &k in &self.sparsity_levels {
                let cfg = self.config_for(variant, k)?;
                if cfg.variant != variant {
                    return fail(format!(
                        "schedule entry for {variant} at {k} carries variant {}",
                        cfg.variant
                    ));
                }
                cfg.validate()?;
            }
        }
        Ok(())
    }
}

/// Step-size, leak and constraint settings for the 16-tap experiment,
/// keyed by nonzero-tap count in {1, 4, 8, 16}.
pub fn default_schedule() -> Schedule {
    let mut schedule = Schedule::new();
    for level in [1, 4, 8, 16] {
        for variant in Variant::ALL {
            if let Some(cfg) = table_entry(variant, level) {
                schedule.insert((variant, level), cfg);
            }
        }
    }
    schedule
}

/// The tabulated setting for one cell, or `None` outside {1, 4, 8, 16}.
pub fn table_entry(variant: Variant, level: usize) -> Option<AlgorithmConfig> {
    const MU: f64 = 0.015;
    const EPSILON_PL: f64 = 10.0;
    const P: f64 = 0.5;
    let rho_pl = match level {
        1 => 0.003,
        4 => 0.002,
        8 => 0.0015,
        16 => 0.0001,
        _ => return None,
    };
    let gamma = if level == 16 { 0.0005 } else { 0.005 };
    Some(match variant {
        Variant::Lms => AlgorithmConfig::lms(MU),
        Variant::Llms => AlgorithmConfig::llms(MU, gamma),
        Variant::LpLikeLms => AlgorithmConfig::lp_like_lms(MU, rho_pl, EPSILON_PL, P),
        Variant::LpLikeLlms => {
            AlgorithmConfig::lp_like_llms(MU, gamma, rho_pl, EPSILON_PL, P).with_leak_sign(LeakSign::Plus)
        }
    })
}

/// Run-averaged squared deviation for one (algorithm, sparsity) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdCurve {
    pub variant: Variant,
    /// Nonzero-tap count.
    pub sparsity: usize,
    pub n_taps: usize,
    /// `values[k]` is the mean over runs of `|w - w_{k+1}|^2`.
    pub values: Vec<f64>,
    pub runs: usize,
    /// Trailing portion of each run's trace, kept for across-run error bars.
    pub run_tails: Vec<Vec<f64>>,
}

impl MsdCurve {
    /// Averages `traces` pointwise, summing in slice order. The last
    /// `retain` samples of each trace are kept in `run_tails`.
    pub fn from_traces(
        variant: Variant,
        sparsity: usize,
        n_taps: usize,
        traces: &[Vec<f64>],
        retain: usize,
    ) -> Result<Self> {
        let Some(first) = traces.first() else {
            return Err(Error::Parameter("at least one trace is required".into()));
        };
        let len = first.len();
        if let Some(bad) = traces.iter().find(|t| t.len() != len) {
            return Err(Error::Dimension {
                expected: len,
                found: bad.len(),
            });
        }
        let mut values = vec![0.0; len];
        for trace in traces {
            for (acc, v) in values.iter_mut().zip(trace) {
                *acc += v;
            }
        }
        let runs = traces.len();
        values.iter_mut().for_each(|v| *v /= runs as f64);
        let retain = retain.min(len);
        let run_tails = traces.iter().map(|t| t[len - retain..].to_vec()).collect();
        Ok(Self {
            variant,
            sparsity,
            n_taps,
            values,
            runs,
            run_tails,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSummary {
    pub variant: Variant,
    pub sparsity: usize,
    pub n_taps: usize,
    pub window: usize,
    pub mean: f64,
    /// Standard error of `mean` across runs; zero for a single run.
    pub std_error: f64,
}

/// Squared deviation `sum_i (w_i - w_hat_i)^2`.
pub fn msd(true_w: &[f64], est_w: &[f64]) -> Result<f64> {
    if true_w.len() != est_w.len() {
        return Err(Error::Dimension {
            expected: true_w.len(),
            found: est_w.len(),
        });
    }
    Ok(true_w.iter().zip(est_w).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Identifies `system` from zero initial weights.
///
/// At each `k < iterations` the desired response is `w^T x_k + n_k` from the
/// true system; the returned trace holds the squared deviation after each
/// update.
pub fn run_trial(
    system: &WeightVector,
    input: &Signal,
    noise: &Signal,
    cfg: &AlgorithmConfig,
    iterations: usize,
) -> Result<Vec<f64>> {
    let n_taps = system.len();
    for (what, len) in [("input", input.len()), ("noise", noise.len())] {
        if len < iterations {
            return Err(Error::Parameter(format!(
                "{what} has {len} samples, need at least {iterations}"
            )));
        }
    }
    let mut state = FilterState::zeros(n_taps);
    let mut trace = Vec::with_capacity(iterations);
    for k in 0..iterations {
        let x = regressor_at(input, k, n_taps)?;
        let desired = system.iter().zip(x.iter()).map(|(w, x)| w * x).sum::<f64>() + noise[k];
        state = step(&state, &x, desired, cfg)?.0;
        let dev = msd(system, &state.weights)?;
        if dev > TRACE_ABORT_THRESHOLD {
            return Err(Error::TraceAbort {
                iteration: k,
                value: dev,
            });
        }
        trace.push(dev);
    }
    Ok(trace)
}

/// The random ingredients of one run.
#[derive(Debug, Clone)]
pub struct Realization {
    pub system: WeightVector,
    pub input: Signal,
    pub noise: Signal,
}

/// Draws system, input and noise, in that order, from `RngStream(master_seed, run)`.
pub fn draw_realization(config: &ExperimentConfig, sparsity: usize, run: usize) -> Result<Realization> {
    let mut rng = RngStream::new(config.master_seed, run as u64);
    let system = gen_sparse_system(config.n_taps, sparsity, &mut rng)?;
    let input = gen_ar1_input(config.signal_length(), config.ar_coeff, config.drive_variance, &mut rng)?;
    let noise = gen_gaussian_noise(config.signal_length(), config.noise_variance, &mut rng)?;
    Ok(Realization { system, input, noise })
}

fn annotate(variant: Variant, sparsity: usize, n_taps: usize, run: usize) -> impl FnOnce(Error) -> Error {
    move |source| Error::Trial {
        variant,
        sparsity,
        n_taps,
        run,
        source: Box::new(source),
    }
}

/// Runs every requested variant at one sparsity level, sharing each run's
/// realization across variants. Curves come back in `variants` order.
pub fn run_level(variants: &[Variant], sparsity: usize, config: &ExperimentConfig) -> Result<Vec<MsdCurve>> {
    let configs = variants
        .iter()
        .map(|&v| config.config_for(v, sparsity).copied())
        .collect::<Result<Vec<_>>>()?;

    // per_run[r][j] is the trace of variants[j] in run r
    let per_run: Vec<Vec<Vec<f64>>> = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            let real = draw_realization(config, sparsity, run)?;
            configs
                .iter()
                .map(|cfg| {
                    run_trial(&real.system, &real.input, &real.noise, cfg, config.iterations).map_err(annotate(
                        cfg.variant,
                        sparsity,
                        config.n_taps,
                        run,
                    ))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    variants
        .iter()
        .enumerate()
        .map(|(j, &variant)| {
            let traces: Vec<Vec<f64>> = per_run.iter().map(|run| run[j].clone()).collect();
            MsdCurve::from_traces(variant, sparsity, config.n_taps, &traces, config.steady_state_window)
        })
        .collect()
}

/// MSD curve of one (variant, sparsity) cell averaged over `config.runs` runs.
pub fn run_cell(variant: Variant, sparsity: usize, config: &ExperimentConfig) -> Result<MsdCurve> {
    Ok(run_level(&[variant], sparsity, config)?.remove(0))
}

/// Every cell of `config`, ordered by (variant, sparsity).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MsdCurve>> {
    config.validate()?;
    let mut variants = config.algorithms.clone();
    variants.sort();
    variants.dedup();
    let mut levels = config.sparsity_levels.clone();
    levels.sort();
    levels.dedup();

    let mut curves = Vec::with_capacity(variants.len() * levels.len());
    for &level in &levels {
        curves.extend(run_level(&variants, level, config)?);
    }
    curves.sort_by_key(|c| (c.variant, c.sparsity));
    Ok(curves)
}

/// Mean of the last `window` curve values, with its standard error across
/// the runs' own trailing means.
pub fn steady_state(curve: &MsdCurve, window: usize) -> Result<SteadyStateSummary> {
    if window == 0 {
        return Err(Error::Parameter("steady-state window must be >= 1".into()));
    }
    if window > curve.len() {
        return Err(Error::Parameter(format!(
            "steady-state window {window} exceeds curve length {}",
            curve.len()
        )));
    }
    let tail = &curve.values[curve.len() - window..];
    let mean = tail.iter().sum::<f64>() / window as f64;

    let std_error = if curve.runs < 2 {
        0.0
    } else {
        let run_means = curve
            .run_tails
            .iter()
            .map(|t| {
                if t.len() < window {
                    Err(Error::Parameter(format!(
                        "window {window} exceeds the {} retained per-run samples",
                        t.len()
                    )))
                } else {
                    Ok(t[t.len() - window..].iter().sum::<f64>() / window as f64)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let n = run_means.len() as f64;
        let m = run_means.iter().sum::<f64>() / n;
        let var = run_means.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };

    Ok(SteadyStateSummary {
        variant: curve.variant,
        sparsity: curve.sparsity,
        n_taps: curve.n_taps,
        window,
        mean,
        std_error,
    })
}
