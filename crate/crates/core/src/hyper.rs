//! Hyperinterpolation: discrete Fourier–Legendre coefficients from
//! quadrature samples, optional coefficientwise thresholding, synthesis.

use serde::{Deserialize, Serialize};

use crate::basis::{build_sampling_matrix, check_domain, eval_orthonormal_all, BasisSpec, SamplingMatrix};
use crate::error::{Error, Result};
use crate::prox::ThresholdRule;
use crate::quadrature::{gram_defect, QuadratureRule};

/// Quadrature regime. All three share the same formula; the tag only
/// selects which precondition is checked on the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// exactness `>= 2n`
    Classical,
    /// exactness `n + k` with `0 < k <= n`
    Relaxed,
    /// discrete Gram defect `η < 1`
    Unfettered,
}

fn check_regime(rule: &QuadratureRule, basis: BasisSpec, regime: Regime) -> Result<()> {
    let n = basis.degree();
    let exactness = rule.declared_exactness();
    match regime {
        Regime::Classical if exactness < 2 * n => {
            Err(Error::InsufficientExactness { required: 2 * n, actual: exactness })
        }
        Regime::Relaxed if exactness < n + 1 || n == 0 => {
            Err(Error::InsufficientExactness { required: n + 1, actual: exactness })
        }
        Regime::Unfettered => {
            let eta = gram_defect(rule, n);
            if eta < 1.0 {
                Ok(())
            } else {
                Err(Error::GramDefectTooLarge(eta))
            }
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperinterpolant {
    basis: BasisSpec,
    coefficients: Vec<f64>,
    regime: Regime,
    threshold: Option<ThresholdRule>,
}

impl Hyperinterpolant {
    pub fn from_coefficients(coefficients: Vec<f64>, regime: Regime) -> Result<Self> {
        let basis = BasisSpec::with_dimension(coefficients.len())?;
        Ok(Self { basis, coefficients, regime, threshold: None })
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn threshold(&self) -> Option<&ThresholdRule> {
        self.threshold.as_ref()
    }

    pub fn support_size(&self) -> usize {
        self.coefficients.iter().filter(|c| **c != 0.0).count()
    }

    pub fn evaluate(&self, points: &[f64]) -> Result<Vec<f64>> {
        evaluate(self, points)
    }

    /// `‖β‖₂`, which equals the `L²` norm of the polynomial by Parseval.
    pub fn l2_norm(&self) -> f64 {
        l2_norm_of_coefficients(self)
    }
}

/// Reusable fitter: a rule, its sampling matrix and a checked regime.
#[derive(Debug, Clone)]
pub struct Hyperinterpolator {
    rule: QuadratureRule,
    basis: BasisSpec,
    regime: Regime,
    matrix: SamplingMatrix,
}

impl Hyperinterpolator {
    pub fn new(rule: QuadratureRule, basis: BasisSpec, regime: Regime) -> Result<Self> {
        check_regime(&rule, basis, regime)?;
        let matrix = build_sampling_matrix(&rule, basis.degree());
        Ok(Self { rule, basis, regime, matrix })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn basis(&self) -> BasisSpec {
        self.basis
    }

    pub fn matrix(&self) -> &SamplingMatrix {
        &self.matrix
    }

    /// `α = Aᵀ W f`.
    pub fn coefficients(&self, samples: &[f64]) -> Result<Vec<f64>> {
        self.matrix.weighted_transpose_apply(self.rule.weights(), samples)
    }

    pub fn fit(&self, samples: &[f64], threshold: Option<&ThresholdRule>) -> Result<Hyperinterpolant> {
        let alpha = self.coefficients(samples)?;
        self.from_alpha(alpha, threshold)
    }

    /// Thresholds precomputed coefficients.
    pub fn from_alpha(&self, alpha: Vec<f64>, threshold: Option<&ThresholdRule>) -> Result<Hyperinterpolant> {
        if alpha.len() != self.basis.dimension() {
            return Err(Error::LengthMismatch { expected: self.basis.dimension(), actual: alpha.len() });
        }
        let coefficients = match threshold {
            Some(rule) => rule.apply_all(&alpha)?,
            None => alpha,
        };
        Ok(Hyperinterpolant { basis: self.basis, coefficients, regime: self.regime, threshold: threshold.copied() })
    }
}

/// `α_ℓ = Σ_j w_j f(x_j) Φ_ℓ(x_j)`.
pub fn coefficients(samples: &[f64], rule: &QuadratureRule, basis: BasisSpec) -> Result<Vec<f64>> {
    if samples.len() != rule.len() {
        return Err(Error::LengthMismatch { expected: rule.len(), actual: samples.len() });
    }
    let mut alpha = vec![0.0; basis.dimension()];
    let mut phi = vec![0.0; basis.dimension()];
    for ((&x, &w), &f) in rule.nodes().iter().zip(rule.weights()).zip(samples) {
        eval_orthonormal_all(x, &mut phi);
        for (a, p) in alpha.iter_mut().zip(&phi) {
            *a += w * f * p;
        }
    }
    Ok(alpha)
}

pub fn hyperinterpolate(
    samples: &[f64],
    rule: &QuadratureRule,
    basis: BasisSpec,
    regime: Regime,
    threshold: Option<&ThresholdRule>,
) -> Result<Hyperinterpolant> {
    check_regime(rule, basis, regime)?;
    let alpha = coefficients(samples, rule, basis)?;
    let coefficients = match threshold {
        Some(t) => t.apply_all(&alpha)?,
        None => alpha,
    };
    Ok(Hyperinterpolant { basis, coefficients, regime, threshold: threshold.copied() })
}

/// `Σ_ℓ β_ℓ Φ_ℓ(x)` at each point.
pub fn evaluate(h: &Hyperinterpolant, points: &[f64]) -> Result<Vec<f64>> {
    let mut phi = vec![0.0; h.coefficients.len()];
    points
        .iter()
        .map(|&x| {
            check_domain(x)?;
            eval_orthonormal_all(x, &mut phi);
            Ok(phi.iter().zip(&h.coefficients).map(|(p, c)| p * c).sum())
        })
        .collect()
}

pub fn l2_norm_of_coefficients(h: &Hyperinterpolant) -> f64 {
    h.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
}
