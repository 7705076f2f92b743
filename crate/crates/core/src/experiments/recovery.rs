use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_in_pool, standard_methods, Accumulator, ExperimentReport, MethodSpec};
use crate::basis::BasisSpec;
use crate::error::{invalid, Result};
use crate::hyper::{Hyperinterpolator, Regime};
use crate::metrics::{l2_error, max_error, snr_db};
use crate::noise::{stream_key, CounterRng, NoiseSpec};
use crate::quadrature::gauss_legendre;

const TRIAL_STREAM_BASE: u64 = 1 << 32;

/// Sparse coefficient recovery: a `sparsity`-sparse `x̄ ∈ R^{d_n}` with
/// standard normal entries is sensed as `b = A x̄` on an `n_points`-point
/// Gauss–Legendre rule, corrupted by `N(0, σ²)` noise, and recovered by
/// thresholding `α = AᵀW b^ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoveryConfig {
    pub n_points: usize,
    pub dim: usize,
    pub sparsity: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<MethodSpec>,
    /// Retain this many coefficients per trial; `None` uses each method's
    /// fixed `lambda`.
    pub top_k_retention: Option<usize>,
    /// Thread count; `None` uses the global pool. Does not affect results.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    #[serde(skip_serializing)]
    pub keep_trials: bool,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            n_points: 301,
            dim: 250,
            sparsity: 22,
            sigma: 0.15,
            trials: 200,
            seed: 42,
            methods: standard_methods(),
            top_k_retention: Some(22),
            workers: None,
            keep_trials: false,
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 || self.dim == 0 {
            return Err(invalid("n_points and dim must be positive"));
        }
        if 2 * (self.dim - 1) > 2 * self.n_points - 1 {
            return Err(invalid(format!(
                "dimension {} needs exactness {} but {} points give {}",
                self.dim,
                2 * (self.dim - 1),
                self.n_points,
                2 * self.n_points - 1
            )));
        }
        if self.sparsity > self.dim {
            return Err(invalid("sparsity exceeds dimension"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma must be finite and non-negative"));
        }
        if self.trials == 0 {
            return Err(invalid("trials must be positive"));
        }
        if let Some(k) = self.top_k_retention {
            if k == 0 || k >= self.dim {
                return Err(invalid("top-K retention needs 1 <= K < dim"));
            }
        }
        Ok(())
    }
}

/// Per-trial outcome; `None` marks a method that failed in this trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub input_snr_db: f64,
    pub methods: Vec<Option<MethodOutcome>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodOutcome {
    pub lambda: f64,
    pub l2_error: f64,
    pub max_error: f64,
    pub output_snr_db: f64,
    pub support: usize,
}

fn run_trial(config: &RecoveryConfig, fitter: &Hyperinterpolator, trial: usize) -> Result<TrialRecord> {
    let seed = stream_key(config.seed, TRIAL_STREAM_BASE + trial as u64);
    let mut rng = CounterRng::new(seed, 0);
    let mut truth = vec![0.0; config.dim];
    for idx in rng.choose(config.dim, config.sparsity) {
        truth[idx] = rng.standard_normal();
    }
    let matrix = fitter.matrix();
    let clean = matrix.apply(&truth)?;
    let noise = NoiseSpec { gaussian_sigma: config.sigma, impulse_amplitude: 0.0, seed }.sample(config.n_points);
    let noisy: Vec<f64> = clean.iter().zip(&noise).map(|(b, e)| b + e).collect();
    let alpha = fitter.coefficients(&noisy)?;

    // α - x̄ = AᵀWε because AᵀWA = I
    let projected_noise = fitter.coefficients(&noise)?;
    let identity_gap =
        alpha.iter().zip(&truth).zip(&projected_noise).map(|((a, x), e)| (a - x - e).abs()).fold(0.0, f64::max);
    if identity_gap > 1e-10 {
        return Err(invalid(format!("coefficient identity violated by {identity_gap:e} in trial {trial}")));
    }

    let input_snr_db = snr_db(&clean, &noisy)?;
    let methods = config
        .methods
        .iter()
        .map(|m| {
            let rule = m.rule_for(&alpha, config.top_k_retention).ok()?;
            let estimate = rule.apply_all(&alpha).ok()?;
            Some(MethodOutcome {
                lambda: rule.lambda(),
                l2_error: l2_error(&estimate, &truth).ok()?,
                max_error: max_error(&estimate, &truth).ok()?,
                output_snr_db: snr_db(&truth, &estimate).ok()?,
                support: estimate.iter().filter(|v| **v != 0.0).count(),
            })
        })
        .collect();
    Ok(TrialRecord { trial, input_snr_db, methods })
}

pub fn run_recovery(config: &RecoveryConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let rule = gauss_legendre(config.n_points);
    let fitter = Hyperinterpolator::new(rule, BasisSpec::with_dimension(config.dim)?, Regime::Classical)?;

    let records: Vec<TrialRecord> = run_in_pool(config.workers, || {
        (0..config.trials).into_par_iter().map(|t| run_trial(config, &fitter, t)).collect::<Result<Vec<_>>>()
    })??;

    let mut accs = vec![Accumulator::default(); config.methods.len()];
    let mut input_snr = 0.0;
    for rec in &records {
        input_snr += rec.input_snr_db;
        for (acc, outcome) in accs.iter_mut().zip(&rec.methods) {
            match outcome {
                Some(o) => acc.push(o.l2_error, o.max_error, o.output_snr_db - rec.input_snr_db),
                None => acc.fail(),
            }
        }
    }
    Ok(ExperimentReport {
        config: serde_json::to_value(config).map_err(|e| invalid(e.to_string()))?,
        rows: config.methods.iter().zip(&accs).map(|(m, a)| a.row(&m.label)).collect(),
        failures: accs.iter().map(Accumulator::failures).collect(),
        mean_input_snr_db: input_snr / records.len() as f64,
        runtime_secs: start.elapsed().as_secs_f64(),
        trials: config.keep_trials.then_some(records),
    })
}
