//! Reproducible experiments: sparse coefficient recovery from noisy
//! quadrature samples and denoising of `exp(-x²)`.

mod denoise;
mod recovery;
mod report;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::prox::{ThresholdKind, ThresholdRule};
use crate::sparsity::lambda_retaining_top_k;

pub use denoise::{run_denoise, DenoiseConfig, DenoiseOutput};
pub use recovery::{run_recovery, RecoveryConfig, TrialRecord};
pub use report::{curves_to_csv, emit_report, emit_svg_curves, parse_svg_polylines, Curve, ReportFormat};

use crate::metrics::MetricsRow;

/// A thresholding method in an experiment. Without a fixed `lambda` the
/// parameter is chosen per trial by top-K retention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub label: String,
    pub kind: ThresholdKind,
    #[serde(default)]
    pub lambda: Option<f64>,
}

impl MethodSpec {
    pub fn new(kind: ThresholdKind) -> Self {
        Self { label: kind.label(), kind, lambda: None }
    }

    pub fn with_lambda(kind: ThresholdKind, lambda: f64) -> Self {
        Self { label: kind.label(), kind, lambda: Some(lambda) }
    }

    /// Rule for the given coefficients: fixed `λ`, or the `λ` that retains
    /// the `top_k` largest coefficients.
    pub fn rule_for(&self, alpha: &[f64], top_k: Option<usize>) -> Result<ThresholdRule> {
        let lambda = match (self.lambda, top_k) {
            (Some(l), _) => l,
            (None, Some(k)) => lambda_retaining_top_k(self.kind, alpha, k)?,
            (None, None) => {
                return Err(invalid(format!("method {} has neither lambda nor top-K retention", self.label)))
            }
        };
        ThresholdRule::new(self.kind, lambda)
    }
}

/// The eight methods compared by the experiments, in report order.
pub fn standard_methods() -> Vec<MethodSpec> {
    let mut m = vec![
        MethodSpec::new(ThresholdKind::Soft),
        MethodSpec::new(ThresholdKind::Springback { alpha: 1.0 }),
        MethodSpec::new(ThresholdKind::Hard),
    ];
    for q in [1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0, 2.0 / 3.0, 3.0 / 4.0] {
        m.push(MethodSpec::new(ThresholdKind::NewtonLq { q }));
    }
    m
}

/// Aggregated results of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: serde_json::Value,
    pub rows: Vec<MetricsRow>,
    /// Trials per method where the rule could not be applied (e.g. the
    /// springback constraint failed), excluded from the averages.
    pub failures: Vec<usize>,
    pub mean_input_snr_db: f64,
    pub runtime_secs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<Vec<TrialRecord>>,
}

impl ExperimentReport {
    pub fn row(&self, method: &str) -> Option<&MetricsRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Running sums for one method; combined in trial order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    l2: f64,
    max: f64,
    snr_gain: f64,
    count: usize,
    failures: usize,
}

impl Accumulator {
    pub(crate) fn push(&mut self, l2: f64, max: f64, gain: f64) {
        self.l2 += l2;
        self.max += max;
        self.snr_gain += gain;
        self.count += 1;
    }

    pub(crate) fn fail(&mut self) {
        self.failures += 1;
    }

    pub(crate) fn row(&self, method: &str) -> MetricsRow {
        let n = self.count.max(1) as f64;
        MetricsRow {
            method: method.to_string(),
            l2_error: self.l2 / n,
            max_error: self.max / n,
            aisnr_db: self.snr_gain / n,
            trials: self.count,
        }
    }

    pub(crate) fn failures(&self) -> usize {
        self.failures
    }
}

pub(crate) fn run_in_pool<T: Send, F: FnOnce() -> T + Send>(workers: Option<usize>, f: F) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(invalid("workers must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| invalid(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
