//! Brute-force references for the closed-form and iterative routines:
//! grid minimisation of the scalar shrinkage objectives and adaptive
//! Gauss–Kronrod integration.
//!
//! Nothing here calls into [`crate::prox`] or [`crate::quadrature`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Scalar objective whose minimiser defines a thresholding operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScalarObjective {
    /// `(y - x)^2 + λ^2 [x ≠ 0]`
    L0,
    /// `½(y - x)^2 + λ|x|`
    L1,
    /// `(y - x)^2 + λ|x|^q`
    Lq(f64),
    /// `½(y - x)^2 + λ(|x| - (α/2)x^2)`
    Springback(f64),
}

impl ScalarObjective {
    pub fn value(&self, y: f64, lambda: f64, x: f64) -> f64 {
        let r = y - x;
        match *self {
            ScalarObjective::L0 => r * r + if x != 0.0 { lambda * lambda } else { 0.0 },
            ScalarObjective::L1 => 0.5 * r * r + lambda * x.abs(),
            ScalarObjective::Lq(q) => r * r + if x != 0.0 { lambda * x.abs().powf(q) } else { 0.0 },
            ScalarObjective::Springback(alpha) => 0.5 * r * r + lambda * (x.abs() - 0.5 * alpha * x * x),
        }
    }
}

/// Uniform grid of `steps` intervals on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(invalid("grid needs lo < hi"));
        }
        if steps < 1000 {
            return Err(invalid("grid needs at least 1000 steps"));
        }
        Ok(Self { lo, hi, steps })
    }

    /// Symmetric grid `[-2|y|-1, 2|y|+1]` with spacing `rel_step · range`.
    pub fn around(y: f64, rel_step: f64) -> Self {
        let half = 2.0 * y.abs() + 1.0;
        let steps = (1.0 / rel_step).ceil().max(1000.0) as usize;
        Self { lo: -half, hi: half, steps }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.steps as f64
    }
}

/// Minimiser of the objective over the grid (plus the point 0), refined by a
/// ternary search on the neighbouring cells of the best grid point.
pub fn grid_argmin_scalar(objective: ScalarObjective, y: f64, lambda: f64, grid: GridSpec) -> f64 {
    let f = |x: f64| objective.value(y, lambda, x);
    let h = grid.step();
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..=grid.steps {
        let v = f(grid.lo + h * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let centre = grid.lo + h * best_i as f64;
    let (mut a, mut b) = ((centre - h).max(grid.lo), (centre + h).min(grid.hi));
    // keep the refinement on one side of the kink at 0
    if a < 0.0 && b > 0.0 {
        if centre > 0.0 {
            a = f64::MIN_POSITIVE;
        } else if centre < 0.0 {
            b = -f64::MIN_POSITIVE;
        }
    }
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let refined = 0.5 * (a + b);
    let mut best = if f(refined) <= best_v { refined } else { centre };
    if f(0.0) <= f(best) {
        best = 0.0;
    }
    best
}

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded
// 7-point Gauss weights for the odd-indexed Kronrod nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - r * XGK[i]) + f(c + r * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Integral with error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive 7/15 Gauss–Kronrod integration to absolute error
/// `1e-12`, with a budget of 2000 subintervals.
pub fn integrate_high_precision<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Integral> {
    integrate_with_budget(f, lo, hi, 1e-12, 2000)
}

pub fn integrate_with_budget<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    if !(lo < hi) {
        return Err(invalid("integration needs lo < hi"));
    }
    let mut parts = vec![(lo, hi, kronrod15(&f, lo, hi))];
    loop {
        let value: f64 = parts.iter().map(|p| p.2 .0).sum();
        let error: f64 = parts.iter().map(|p| p.2 .1).sum();
        if error <= tol {
            return Ok(Integral { value, error });
        }
        if parts.len() >= max_intervals {
            return Err(Error::NoConvergence("adaptive integration"));
        }
        let (idx, _) = parts.iter().enumerate().max_by(|a, b| a.1 .2 .1.total_cmp(&b.1 .2 .1)).expect("non-empty");
        let (a, b, _) = parts.swap_remove(idx);
        let m = 0.5 * (a + b);
        parts.push((a, m, kronrod15(&f, a, m)));
        parts.push((m, b, kronrod15(&f, m, b)));
    }
}
