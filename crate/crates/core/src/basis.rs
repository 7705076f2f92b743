//! Orthonormal Legendre basis of `Π_n([-1, 1])` and the sampling matrix.
//!
//! Basis functions are indexed from 1 in the public API, so `Φ_ℓ` has degree
//! `ℓ - 1`. Slices returned by the sweep helpers are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    degree: usize,
}

impl BasisSpec {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    /// Basis of dimension `d_n`, i.e. degree `d_n - 1`.
    pub fn with_dimension(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("basis dimension must be positive"));
        }
        Ok(Self { degree: dimension - 1 })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dimension(&self) -> usize {
        self.degree + 1
    }
}

pub(crate) fn check_domain(x: f64) -> Result<()> {
    if x.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain(x))
    }
}

/// Fills `out[k] = Φ_{k+1}(x) = sqrt((2k+1)/2) P_k(x)` for every `k < out.len()`
/// in one recurrence sweep. No domain check.
pub fn eval_orthonormal_all(x: f64, out: &mut [f64]) {
    let mut p_prev = 0.0;
    let mut p = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        let kf = k as f64;
        *slot = ((2.0 * kf + 1.0) / 2.0).sqrt() * p;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
}

/// `Φ_ℓ(x)` for 1-based `ell`.
pub fn eval_orthonormal_legendre(ell: usize, x: f64) -> Result<f64> {
    if ell == 0 {
        return Err(invalid("basis index is 1-based"));
    }
    check_domain(x)?;
    let mut buf = vec![0.0; ell];
    eval_orthonormal_all(x, &mut buf);
    Ok(buf[ell - 1])
}

/// Dense `N × d_n` matrix `A_{jℓ} = Φ_ℓ(x_j)`, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SamplingMatrix {
    pub fn node_count(&self) -> usize {
        self.rows
    }

    pub fn dimension(&self) -> usize {
        self.cols
    }

    /// Entry at 0-based row `j` and 0-based column `l`.
    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.data[l * self.rows + j]
    }

    pub fn column(&self, l: usize) -> &[f64] {
        &self.data[l * self.rows..(l + 1) * self.rows]
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    /// `A β`.
    pub fn apply(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, actual: coeffs.len() });
        }
        let mut out = vec![0.0; self.rows];
        for (l, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.column(l)) {
                *o += c * a;
            }
        }
        Ok(out)
    }

    /// `Aᵀ W v` with `W = diag(weights)`.
    pub fn weighted_transpose_apply(&self, weights: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: v.len() });
        }
        if weights.len() != self.rows {
            return Err(Error::LengthMismatch { expected: self.rows, actual: weights.len() });
        }
        let wv: Vec<f64> = weights.iter().zip(v).map(|(w, x)| w * x).collect();
        Ok((0..self.cols).map(|l| self.column(l).iter().zip(&wv).map(|(a, b)| a * b).sum()).collect())
    }

    /// `Aᵀ W A`, column-major `d_n × d_n`.
    pub fn weighted_gram(&self, weights: &[f64]) -> Vec<f64> {
        let d = self.cols;
        let mut g = vec![0.0; d * d];
        let scaled: Vec<Vec<f64>> =
            (0..d).map(|l| self.column(l).iter().zip(weights).map(|(a, w)| a * w).collect()).collect();
        for l in 0..d {
            for m in l..d {
                let s: f64 = scaled[l].iter().zip(self.column(m)).map(|(a, b)| a * b).sum();
                g[l * d + m] = s;
                g[m * d + l] = s;
            }
        }
        g
    }
}

/// Samples every basis function of degree `<= n` at the rule's nodes.
pub fn build_sampling_matrix(rule: &QuadratureRule, n: usize) -> SamplingMatrix {
    let rows = rule.len();
    let cols = n + 1;
    let mut data = vec![0.0; rows * cols];
    let mut buf = vec![0.0; cols];
    for (j, &x) in rule.nodes().iter().enumerate() {
        eval_orthonormal_all(x, &mut buf);
        for (l, v) in buf.iter().enumerate() {
            data[l * rows + j] = *v;
        }
    }
    SamplingMatrix { rows, cols, data }
}
