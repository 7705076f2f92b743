use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::report::Curve;
use super::{standard_methods, Accumulator, ExperimentReport, MethodSpec};
use crate::basis::BasisSpec;
use crate::error::{invalid, Result};
use crate::hyper::{Hyperinterpolator, Regime};
use crate::metrics::{max_error, snr_db};
use crate::noise::NoiseSpec;
use crate::quadrature::gauss_legendre;

pub const GRID_POINTS: usize = 1000;

/// Denoising of `f(x) = exp(-x²)` from samples with compound Gaussian and
/// impulse noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DenoiseConfig {
    pub n_points: usize,
    pub dim: usize,
    pub sigma: f64,
    pub impulse_a: f64,
    /// Coefficients kept per method; `retain_k >= dim` disables thresholding.
    pub retain_k: usize,
    pub seed: u64,
    pub methods: Vec<MethodSpec>,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            n_points: 400,
            dim: 251,
            sigma: 0.15,
            impulse_a: 0.5,
            retain_k: 2,
            seed: 42,
            methods: standard_methods(),
        }
    }
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 || self.dim == 0 {
            return Err(invalid("n_points and dim must be positive"));
        }
        if 2 * (self.dim - 1) > 2 * self.n_points - 1 {
            return Err(invalid("dimension too large for the quadrature exactness"));
        }
        if self.retain_k == 0 {
            return Err(invalid("retain_k must be positive"));
        }
        NoiseSpec::new(self.sigma, self.impulse_a, self.seed)?;
        Ok(())
    }
}

pub fn target(x: f64) -> f64 {
    (-x * x).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseOutput {
    pub report: ExperimentReport,
    /// Truth and reconstructions on the uniform grid, then the noisy samples
    /// at the quadrature nodes.
    pub curves: Vec<Curve>,
    /// Retained 1-based coefficient indices per method.
    pub retained: Vec<Vec<usize>>,
    /// Discrete `L²` error of the noisy samples, `sqrt(Σ w_j ε_j²)`.
    pub input_l2_error: f64,
}

pub fn run_denoise(config: &DenoiseConfig) -> Result<DenoiseOutput> {
    config.validate()?;
    let start = Instant::now();
    let rule = gauss_legendre(config.n_points);
    let fitter = Hyperinterpolator::new(rule, BasisSpec::with_dimension(config.dim)?, Regime::Classical)?;
    let nodes = fitter.rule().nodes().to_vec();
    let clean: Vec<f64> = nodes.iter().map(|&x| target(x)).collect();
    let noise = NoiseSpec::new(config.sigma, config.impulse_a, config.seed)?.sample(config.n_points);
    let noisy: Vec<f64> = clean.iter().zip(&noise).map(|(f, e)| f + e).collect();
    let input_l2_error = fitter.rule().weights().iter().zip(&noise).map(|(w, e)| w * e * e).sum::<f64>().sqrt();
    let input_snr = snr_db(&clean, &noisy)?;
    let alpha = fitter.coefficients(&noisy)?;

    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| -1.0 + 2.0 * i as f64 / (GRID_POINTS - 1) as f64).collect();
    let truth: Vec<f64> = grid.iter().map(|&x| target(x)).collect();
    let scale = (2.0 / GRID_POINTS as f64).sqrt();
    let threshold = config.retain_k < config.dim;

    let mut curves = vec![Curve::line("f", grid.iter().copied().zip(truth.iter().copied()).collect())];
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut retained = Vec::new();
    for m in &config.methods {
        let mut acc = Accumulator::default();
        let fitted = if threshold {
            m.rule_for(&alpha, Some(config.retain_k)).and_then(|r| fitter.from_alpha(alpha.clone(), Some(&r)))
        } else {
            fitter.from_alpha(alpha.clone(), None)
        };
        match fitted {
            Ok(h) => {
                let recon = h.evaluate(&grid)?;
                let l2 = scale * recon.iter().zip(&truth).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                acc.push(l2, max_error(&recon, &truth)?, snr_db(&truth, &recon)? - input_snr);
                retained.push(
                    h.coefficients().iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(i, _)| i + 1).collect(),
                );
                curves.push(Curve::line(&m.label, grid.iter().copied().zip(recon).collect()));
            }
            Err(_) => {
                acc.fail();
                retained.push(Vec::new());
            }
        }
        rows.push(acc.row(&m.label));
        failures.push(acc.failures());
    }
    curves.push(Curve::markers("noisy", nodes.into_iter().zip(noisy).collect()));

    Ok(DenoiseOutput {
        report: ExperimentReport {
            config: serde_json::to_value(config).map_err(|e| invalid(e.to_string()))?,
            rows,
            failures,
            mean_input_snr_db: input_snr,
            runtime_secs: start.elapsed().as_secs_f64(),
            trials: None,
        },
        curves,
        retained,
        input_l2_error,
    })
}
