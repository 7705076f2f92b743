//! Positive-weight quadrature rules on `[-1, 1]` with `dω = dx`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::{build_sampling_matrix, eval_orthonormal_all};
use crate::error::{invalid, Error, Result};

/// Measure of `[-1, 1]`.
pub const DOMAIN_MEASURE: f64 = 2.0;

/// Degree above which exactness is checked against Legendre moments instead
/// of raw monomials.
pub const MONOMIAL_CHECK_LIMIT: usize = 60;

const NEWTON_RESIDUAL: f64 = 1e-14;
const NEWTON_MAX_STEPS: usize = 100;

/// Quadrature rule with interior nodes and positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    declared_exactness: usize,
}

impl QuadratureRule {
    /// Builds a rule from explicit data, checking the PI-type conditions,
    /// the total mass and the declared exactness.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, declared_exactness: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(invalid("quadrature rule needs at least one node"));
        }
        if nodes.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: nodes.len(), actual: weights.len() });
        }
        if let Some(&x) = nodes.iter().find(|x| !(x.abs() <= 1.0)) {
            return Err(Error::OutOfDomain(x));
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(invalid(format!("weight {w} is not positive")));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - DOMAIN_MEASURE).abs() > 1e-12 {
            return Err(invalid(format!("weights sum to {mass}, expected 2")));
        }
        let rule = Self { nodes, weights, declared_exactness };
        let defect = verify_exactness(&rule, declared_exactness);
        if defect > 1e-10 {
            return Err(invalid(format!("declared exactness {declared_exactness} violated (defect {defect:e})")));
        }
        Ok(rule)
    }

    /// Gauss–Legendre rule of exactness at least `n + k`, for the relaxed
    /// regime `0 < k <= n`.
    pub fn relaxed(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(invalid(format!("relaxed regime needs 0 < k <= n (n = {n}, k = {k})")));
        }
        Ok(gauss_legendre((n + k + 2) / 2))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn declared_exactness(&self) -> usize {
        self.declared_exactness
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_j g(x_j)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Legendre `P_n(x)` and `P_{n-1}(x)` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// `N`-point Gauss–Legendre rule. Roots of `P_N` are found by Newton's
/// method from Chebyshev-angle guesses; nodes are returned in increasing
/// order and mirrored so the rule is exactly symmetric.
///
/// # Panics
///
/// Panics if `n_points == 0`.
pub fn gauss_legendre(n_points: usize) -> QuadratureRule {
    assert!(n_points >= 1, "Gauss-Legendre rule needs at least one point");
    let n = n_points;
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..NEWTON_MAX_STEPS {
            let (p, p_prev) = legendre_pair(n, x);
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if p.abs() <= NEWTON_RESIDUAL || dx.abs() <= 1e-16 {
                let (p, p_prev) = legendre_pair(n, x);
                dp = nf * (x * p - p_prev) / (x * x - 1.0);
                break;
            }
        }
        if n % 2 == 1 && i == half - 1 {
            x = 0.0;
            let (_, p_prev) = legendre_pair(n, 0.0);
            dp = nf * (-p_prev) / -1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    QuadratureRule { nodes, weights, declared_exactness: 2 * n - 1 }
}

fn exact_monomial_moment(m: usize) -> f64 {
    if m % 2 == 1 {
        0.0
    } else {
        2.0 / (m as f64 + 1.0)
    }
}

/// Largest deviation between the rule and the exact integral over all
/// polynomials of degree `<= degree`.
///
/// Up to [`MONOMIAL_CHECK_LIMIT`] this is the maximum monomial defect
/// `|Σ w_j x_j^m - ∫x^m|`. Beyond it monomials are too ill-conditioned, so the
/// defect is measured on the orthonormal Legendre moments
/// `|Σ w_j Φ_k(x_j) - ∫Φ_k|`, which vanish for `k >= 1`.
pub fn verify_exactness(rule: &QuadratureRule, degree: usize) -> f64 {
    if degree <= MONOMIAL_CHECK_LIMIT {
        let mut sums = vec![0.0; degree + 1];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let mut pow = 1.0;
            for s in sums.iter_mut() {
                *s += w * pow;
                pow *= x;
            }
        }
        sums.iter().enumerate().map(|(m, s)| (s - exact_monomial_moment(m)).abs()).fold(0.0, f64::max)
    } else {
        let mut moments = vec![0.0; degree + 1];
        let mut phi = vec![0.0; degree + 1];
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            eval_orthonormal_all(x, &mut phi);
            for (m, p) in moments.iter_mut().zip(&phi) {
                *m += w * p;
            }
        }
        moments[0] -= std::f64::consts::SQRT_2;
        moments.iter().map(|m| m.abs()).fold(0.0, f64::max)
    }
}

/// Spectral norm of `G - I`, with `G` the discrete Gram matrix of the
/// orthonormal basis of degree `n` under the rule.
///
/// This is the smallest `η` with `|Σ w_j p(x_j)^2 - ∫p^2| <= η ∫p^2` on `Π_n`.
pub fn gram_defect(rule: &QuadratureRule, n: usize) -> f64 {
    let a = build_sampling_matrix(rule, n);
    let gram = a.weighted_gram(rule.weights());
    let d = n + 1;
    let mut m = DMatrix::from_column_slice(d, d, &gram);
    for i in 0..d {
        m[(i, i)] -= 1.0;
    }
    SymmetricEigen::new(m).eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_point_rule() {
        let r = gauss_legendre(1);
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);
        assert_eq!(r.declared_exactness(), 1);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_legendre(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + x).abs() < 1e-15);
        assert!((r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-14);
        assert!((r.weights()[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.declared_exactness(), 3);
    }

    #[test]
    fn five_point_monomials() {
        let r = gauss_legendre(5);
        assert!(r.integrate(|x| x.powi(9)).abs() < 1e-12);
        assert!((r.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn exactness_defects() {
        let r = gauss_legendre(2);
        assert!(verify_exactness(&r, 3) <= 1e-12);
        // 2/5 - 2/9 = 8/45
        assert!((verify_exactness(&r, 4) - 8.0 / 45.0).abs() < 1e-14);
        assert!(verify_exactness(&gauss_legendre(150), 299) <= 1e-9);
        assert!(verify_exactness(&gauss_legendre(150), 300) > 1e-3);
    }

    #[test]
    fn nodes_increasing_and_symmetric() {
        for n in [1, 2, 7, 40, 301] {
            let r = gauss_legendre(n);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            for i in 0..n {
                assert!((r.nodes()[i] + r.nodes()[n - 1 - i]).abs() < 1e-13);
                assert!((r.weights()[i] - r.weights()[n - 1 - i]).abs() < 1e-13);
            }
            assert!((r.weights().iter().sum::<f64>() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_are_polished() {
        let r = gauss_legendre(250);
        for &x in r.nodes() {
            // Newton step |P/P'| must be at rounding level.
            let (p, p_prev) = legendre_pair(250, x);
            let dp = 250.0 * (x * p - p_prev) / (x * x - 1.0);
            assert!((p / dp).abs() < 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn gram_defect_cases() {
        assert!(gram_defect(&gauss_legendre(5), 4) < 1e-10);
        assert!((gram_defect(&gauss_legendre(1), 1) - 1.0).abs() < 1e-14);
        assert!(gram_defect(&gauss_legendre(3), 4) > 0.0);
    }

    #[test]
    fn constructor_validation() {
        assert!(QuadratureRule::new(vec![0.0], vec![2.0], 1).is_ok());
        assert!(QuadratureRule::new(vec![0.0], vec![2.0], 2).is_err());
        assert!(matches!(QuadratureRule::new(vec![1.5], vec![2.0], 0), Err(Error::OutOfDomain(_))));
        assert!(QuadratureRule::new(vec![-0.5, 0.5], vec![2.5, -0.5], 0).is_err());
        assert!(QuadratureRule::new(vec![0.0], vec![1.0], 0).is_err());
        let g = gauss_legendre(4);
        assert!(QuadratureRule::new(g.nodes().to_vec(), g.weights().to_vec(), 7).is_ok());
    }

    #[test]
    fn relaxed_rule_exactness() {
        let r = QuadratureRule::relaxed(10, 3).unwrap();
        assert!(r.declared_exactness() >= 13);
        assert!(r.declared_exactness() < 20);
        assert!(QuadratureRule::relaxed(10, 0).is_err());
        assert!(QuadratureRule::relaxed(10, 11).is_err());
    }
}
