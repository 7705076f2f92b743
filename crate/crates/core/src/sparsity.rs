//! Regularisation-parameter rules driven by sparsity, and the tail bounds
//! that go with them, each paired with a seeded Monte Carlo checker.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::noise::CounterRng;
use crate::prox::{lambda_star, newton_threshold_a, ThresholdKind};

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q must lie strictly inside (0, 1), got {q}")));
    }
    Ok(())
}

/// `u_ℓ = λ*(|α_ℓ|, q)`: the smallest `λ` that zeroes coefficient `ℓ`.
pub fn u_vector(alpha: &[f64], q: f64) -> Result<Vec<f64>> {
    check_q(q)?;
    Ok(alpha.iter().map(|&a| if a == 0.0 { 0.0 } else { lambda_star(a, q) }).collect())
}

fn kth_largest(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    v[k - 1]
}

/// `u_(k)`, the `k`-th largest entry of [`u_vector`]. Thresholding with
/// `λ >= u_(k)` leaves at most `k - 1` nonzero coefficients.
pub fn lambda_for_sparsity(alpha: &[f64], q: f64, k: usize) -> Result<f64> {
    if k < 2 || k > alpha.len() {
        return Err(invalid(format!("k must satisfy 2 <= k <= {}, got {k}", alpha.len())));
    }
    Ok(kth_largest(&u_vector(alpha, q)?, k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityCertificate {
    pub u: Vec<f64>,
    pub k: usize,
    pub lambda_chosen: f64,
    pub guaranteed_support_bound: usize,
}

impl SparsityCertificate {
    pub fn new(alpha: &[f64], q: f64, k: usize) -> Result<Self> {
        let lambda_chosen = lambda_for_sparsity(alpha, q, k)?;
        Ok(Self { u: u_vector(alpha, q)?, k, lambda_chosen, guaranteed_support_bound: k - 1 })
    }

    pub fn sorted_u(&self) -> Vec<f64> {
        let mut v = self.u.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// `λ` equal to the `(K+1)`-th largest `|α_ℓ|`, so hard thresholding keeps
/// exactly the `K` largest coefficients when magnitudes are distinct. Ties
/// at the cut keep fewer.
pub fn lambda_top_k(alpha: &[f64], k: usize) -> Result<f64> {
    if k < 1 || k >= alpha.len() {
        return Err(invalid(format!("K must satisfy 1 <= K < {}, got {k}", alpha.len())));
    }
    let mags: Vec<f64> = alpha.iter().map(|a| a.abs()).collect();
    Ok(kth_largest(&mags, k + 1))
}

/// `λ` for which the operator's zeroing threshold equals the `(K+1)`-th
/// largest magnitude. For hard, soft and springback this is
/// [`lambda_top_k`]; for `l_q` it is `λ*` at that magnitude, nudged upward
/// until `a(λ, q)` is not below it.
pub fn lambda_retaining_top_k(kind: ThresholdKind, alpha: &[f64], k: usize) -> Result<f64> {
    let cut = lambda_top_k(alpha, k)?;
    if cut == 0.0 {
        return Err(invalid("fewer than K + 1 nonzero coefficients; no positive lambda retains K"));
    }
    match kind {
        ThresholdKind::NewtonLq { q } => {
            check_q(q)?;
            let mut lambda = lambda_star(cut, q);
            while newton_threshold_a(lambda, q) < cut {
                lambda = f64::from_bits(lambda.to_bits() + 1);
            }
            Ok(lambda)
        }
        _ => Ok(cut),
    }
}

/// `ψ₂` norm of `N(0, σ²)`: solving `E exp(η²/t²) = 2` gives `t = σ·sqrt(8/3)`.
pub fn gaussian_psi2(sigma: f64) -> f64 {
    sigma * (8.0f64 / 3.0).sqrt()
}

/// Bound on the probability that noise flips the keep/zero decision of a
/// coefficient with magnitude `abs_alpha` at threshold `λ`:
/// `min(1, 2 exp(-(|α|-λ)² / (2 ψ₂²)))`.
pub fn subgaussian_flip_bound(abs_alpha: f64, lambda: f64, psi2: f64) -> Result<f64> {
    if !(abs_alpha >= 0.0) || !(lambda > 0.0) || !(psi2 > 0.0) {
        return Err(invalid("flip bound needs |alpha| >= 0, lambda > 0, psi2 > 0"));
    }
    if abs_alpha == lambda {
        return Err(invalid("flip bound is uninformative at |alpha| = lambda"));
    }
    let gap = abs_alpha - lambda;
    Ok((2.0 * (-(gap * gap) / (2.0 * psi2 * psi2)).exp()).min(1.0))
}

/// Smallest `λ` for which the decision-mismatch probability is at most `δ`
/// under the margin `||α| - λ| > cλ`: `(ψ₂/c) sqrt(2 ln(2/δ))`.
pub fn mismatch_lambda_min(c: f64, delta: f64, psi2: f64) -> Result<f64> {
    if !(c > 0.0) || !(delta > 0.0 && delta < 1.0) || !(psi2 > 0.0) {
        return Err(invalid("need c > 0, 0 < delta < 1, psi2 > 0"));
    }
    Ok(psi2 / c * (2.0 * (2.0 / delta).ln()).sqrt())
}

/// Bernstein bound `2 exp(-(t²/2)/(σ² + t/3))` on `P(|‖β‖₀ - k| > t)` with
/// independent Bernoulli(k/d_n) support indicators, `σ² = d_n p(1-p)`.
pub fn bernstein_support_bound(k: usize, dim: usize, t: f64) -> Result<f64> {
    if dim == 0 || k > dim || !(t > 0.0) {
        return Err(invalid("need 0 <= k <= d_n, d_n > 0, t > 0"));
    }
    let p = k as f64 / dim as f64;
    let var = dim as f64 * p * (1.0 - p);
    Ok((2.0 * (-(t * t / 2.0) / (var + t / 3.0)).exp()).min(1.0))
}

/// `sqrt(C·K·R + tail_energy) + 2 sqrt(V) E_n`: the computable part of the
/// expected `L²` error bound for `l_q` hyperinterpolation.
pub fn error_bound_rhs(k: usize, r: f64, tail_energy: f64, c: f64, v: f64, e_n: f64) -> Result<f64> {
    if !(r > 0.0) || !(c > 0.0) || !(v > 0.0) || !(tail_energy >= 0.0) || !(e_n >= 0.0) {
        return Err(invalid("error bound needs R, C, V > 0 and tail energy, E_n >= 0"));
    }
    Ok((c * k as f64 * r + tail_energy).sqrt() + 2.0 * v.sqrt() * e_n)
}

/// Analytic bound next to an observed frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundReport {
    pub analytic_bound: f64,
    pub empirical_rate: f64,
    pub trials: usize,
    pub seed: u64,
}

impl TailBoundReport {
    /// `empirical <= bound + 3 sqrt(bound / trials)`.
    pub fn within_slack(&self) -> bool {
        self.empirical_rate <= self.analytic_bound + 3.0 * (self.analytic_bound / self.trials as f64).sqrt()
    }
}

fn trial_rng(seed: u64, trial: usize) -> CounterRng {
    CounterRng::new(seed ^ trial as u64, 0)
}

fn empirical<F: Fn(&mut CounterRng) -> bool + Sync>(trials: usize, seed: u64, event: F) -> f64 {
    use rayon::prelude::*;
    let hits: usize = (0..trials).into_par_iter().map(|t| usize::from(event(&mut trial_rng(seed, t)))).sum();
    hits as f64 / trials as f64
}

/// Monte Carlo frequency of a keep/zero flip under `N(0, σ²)` noise,
/// against [`subgaussian_flip_bound`] with `ψ₂ = σ sqrt(8/3)`.
pub fn flip_rate_check(abs_alpha: f64, lambda: f64, sigma: f64, trials: usize, seed: u64) -> Result<TailBoundReport> {
    if trials == 0 || !(sigma > 0.0) {
        return Err(invalid("need trials > 0 and sigma > 0"));
    }
    let analytic_bound = subgaussian_flip_bound(abs_alpha, lambda, gaussian_psi2(sigma))?;
    let kept = abs_alpha > lambda;
    let empirical_rate = empirical(trials, seed, |rng| {
        let noisy = (abs_alpha + sigma * rng.standard_normal()).abs();
        if kept {
            noisy < lambda
        } else {
            noisy > lambda
        }
    });
    Ok(TailBoundReport { analytic_bound, empirical_rate, trials, seed })
}

/// Monte Carlo decision-mismatch rate at `λ = mismatch_lambda_min(c, δ, ψ₂)`
/// for a coefficient at `|α| = λ(1 + margin_factor·c)`; the bound reported
/// is `δ`. A negative `margin_factor` puts the coefficient below `λ`.
pub fn mismatch_rate_check(
    c: f64,
    delta: f64,
    sigma: f64,
    margin_factor: f64,
    trials: usize,
    seed: u64,
) -> Result<TailBoundReport> {
    if trials == 0 || !(sigma > 0.0) || !(margin_factor.abs() > 1.0) || 1.0 + margin_factor * c < 0.0 {
        return Err(invalid("need trials > 0, sigma > 0, |margin factor| > 1 and a non-negative |alpha|"));
    }
    let lambda = mismatch_lambda_min(c, delta, gaussian_psi2(sigma))?;
    let abs_alpha = lambda * (1.0 + margin_factor * c);
    let empirical_rate = empirical(trials, seed, |rng| {
        let noisy = (abs_alpha + sigma * rng.standard_normal()).abs();
        (abs_alpha - lambda) * (noisy - lambda) < 0.0
    });
    Ok(TailBoundReport { analytic_bound: delta, empirical_rate, trials, seed })
}

/// Monte Carlo frequency of `|S - k| > t` for `S` a sum of `d_n`
/// Bernoulli(k/d_n) indicators.
pub fn bernstein_check(k: usize, dim: usize, t: f64, trials: usize, seed: u64) -> Result<TailBoundReport> {
    if trials == 0 {
        return Err(invalid("need trials > 0"));
    }
    let analytic_bound = bernstein_support_bound(k, dim, t)?;
    let p = k as f64 / dim as f64;
    let empirical_rate = empirical(trials, seed, |rng| {
        let s = (0..dim).filter(|_| rng.next_f64() < p).count() as f64;
        (s - k as f64).abs() > t
    });
    Ok(TailBoundReport { analytic_bound, empirical_rate, trials, seed })
}
