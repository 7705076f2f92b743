//! Scalar thresholding operators.
//!
//! Each operator is the exact minimiser of a separable one-dimensional
//! objective in the coefficient `x` for a given input `y`:
//!
//! | operator     | objective                                   |
//! |--------------|---------------------------------------------|
//! | hard         | `(y - x)^2 + λ^2 · [x ≠ 0]`                 |
//! | soft         | `½(y - x)^2 + λ|x|`                         |
//! | springback   | `½(y - x)^2 + λ(|x| - (α/2) x^2)`, `1-λα>0` |
//! | `l_q`        | `(y - x)^2 + λ|x|^q`, `0 < q < 1`           |
//!
//! The `l_q` minimiser is zero when `|y| <= a(λ, q)` and otherwise the larger
//! stationary point of the objective on `(0, |y|)`, found by Newton's method
//! started at `|y|`.
//!
//! All operators map the boundary case (`|y| = λ`, or `|y| = a` for `l_q`)
//! to zero.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Stopping rule for the `l_q` Newton solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 200 }
    }
}

impl NewtonSettings {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        let s = Self { tol, max_iter };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(invalid("Newton settings need tol > 0 and max_iter >= 1"));
        }
        Ok(())
    }
}

/// Operator family without its regularisation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdKind {
    Hard,
    Soft,
    Springback { alpha: f64 },
    NewtonLq { q: f64 },
}

impl ThresholdKind {
    fn validate(&self) -> Result<()> {
        match *self {
            ThresholdKind::Springback { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(invalid(format!("springback alpha must be positive, got {alpha}")))
            }
            ThresholdKind::NewtonLq { q } if !(q > 0.0 && q < 1.0) => {
                Err(invalid(format!("q must lie strictly inside (0, 1), got {q}")))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            ThresholdKind::Hard => "Hard".to_string(),
            ThresholdKind::Soft => "Lasso".to_string(),
            ThresholdKind::Springback { .. } => "Springback".to_string(),
            ThresholdKind::NewtonLq { q } => format!("Newton q={}", format_q(q)),
        }
    }
}

fn format_q(q: f64) -> String {
    for den in 2..=12u32 {
        let num = (q * den as f64).round();
        if num >= 1.0 && (num / den as f64 - q).abs() < 1e-12 {
            return format!("{}/{}", num as u32, den);
        }
    }
    format!("{q}")
}

/// A validated thresholding operator with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRule {
    kind: ThresholdKind,
    lambda: f64,
    #[serde(default)]
    newton: NewtonSettings,
}

impl ThresholdRule {
    pub fn new(kind: ThresholdKind, lambda: f64) -> Result<Self> {
        Self::with_settings(kind, lambda, NewtonSettings::default())
    }

    pub fn with_settings(kind: ThresholdKind, lambda: f64, newton: NewtonSettings) -> Result<Self> {
        let rule = Self { kind, lambda, newton };
        rule.validate()?;
        Ok(rule)
    }

    pub fn hard(lambda: f64) -> Result<Self> {
        Self::new(ThresholdKind::Hard, lambda)
    }

    pub fn soft(lambda: f64) -> Result<Self> {
        Self::new(ThresholdKind::Soft, lambda)
    }

    pub fn springback(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(ThresholdKind::Springback { alpha }, lambda)
    }

    pub fn newton_lq(lambda: f64, q: f64) -> Result<Self> {
        Self::new(ThresholdKind::NewtonLq { q }, lambda)
    }

    /// Re-checks the invariants; needed after deserialisation.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive, got {}", self.lambda)));
        }
        self.kind.validate()?;
        self.newton.validate()?;
        if let ThresholdKind::Springback { alpha } = self.kind {
            if !(1.0 - self.lambda * alpha > 0.0) {
                return Err(Error::SpringbackConstraint { lambda: self.lambda, alpha });
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> ThresholdKind {
        self.kind
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn newton_settings(&self) -> NewtonSettings {
        self.newton
    }

    /// Input magnitude at or below which the operator returns zero.
    pub fn decision_threshold(&self) -> f64 {
        match self.kind {
            ThresholdKind::NewtonLq { q } => newton_threshold_a(self.lambda, q),
            _ => self.lambda,
        }
    }

    pub fn apply(&self, y: f64) -> Result<f64> {
        match self.kind {
            ThresholdKind::Hard => Ok(hard(y, self.lambda)),
            ThresholdKind::Soft => Ok(soft(y, self.lambda)),
            ThresholdKind::Springback { alpha } => springback(y, self.lambda, alpha),
            ThresholdKind::NewtonLq { q } => lq_prox(y, self.lambda, q, self.newton),
        }
    }

    pub fn apply_all(&self, ys: &[f64]) -> Result<Vec<f64>> {
        ys.iter().map(|&y| self.apply(y)).collect()
    }
}

/// Dispatches to the operator described by `rule`.
pub fn apply(rule: &ThresholdRule, y: f64) -> Result<f64> {
    rule.apply(y)
}

pub fn hard(y: f64, lambda: f64) -> f64 {
    if y.abs() > lambda {
        y
    } else {
        0.0
    }
}

pub fn soft(y: f64, lambda: f64) -> f64 {
    if y.abs() > lambda {
        y.signum() * (y.abs() - lambda)
    } else {
        0.0
    }
}

pub fn springback(y: f64, lambda: f64, alpha: f64) -> Result<f64> {
    let denom = 1.0 - lambda * alpha;
    if !(denom > 0.0) {
        return Err(Error::SpringbackConstraint { lambda, alpha });
    }
    Ok(if y.abs() > lambda { y.signum() * (y.abs() - lambda) / denom } else { 0.0 })
}

fn check_lq(lambda: f64, q: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q must lie strictly inside (0, 1), got {q}")));
    }
    Ok(())
}

/// Decision threshold `a = (2-q)/2 · (1-q)^((q-1)/(2-q)) · λ^(1/(2-q))`.
pub fn newton_threshold_a(lambda: f64, q: f64) -> f64 {
    (2.0 - q) / 2.0 * (1.0 - q).powf((q - 1.0) / (2.0 - q)) * lambda.powf(1.0 / (2.0 - q))
}

/// Inflection point of `h'`, `(λq(1-q)/2)^(1/(2-q))`; every nonzero
/// minimiser lies strictly above it.
pub fn lq_jump_lower_bound(lambda: f64, q: f64) -> f64 {
    (lambda * q * (1.0 - q) / 2.0).powf(1.0 / (2.0 - q))
}

/// `λ*` at which `h(0) = h(x')` for input `|y|`. Inverse of
/// [`newton_threshold_a`] in `λ`.
pub fn lambda_star(y: f64, q: f64) -> f64 {
    4.0 / (2f64.powf(q) * (1.0 - q)) * ((1.0 - q) * y.abs() / (2.0 - q)).powf(2.0 - q)
}

/// `λ̄` beyond which `h'` has no root on `(0, |y|)`.
pub fn lambda_bar(y: f64, q: f64) -> f64 {
    2.0 / (q * (1.0 - q)) * ((1.0 - q) * y.abs() / (2.0 - q)).powf(2.0 - q)
}

/// Outcome of an `l_q` shrinkage with solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqProx {
    pub value: f64,
    pub threshold: f64,
    pub iterations: usize,
    pub bisection: bool,
}

pub fn lq_prox(y: f64, lambda: f64, q: f64, settings: NewtonSettings) -> Result<f64> {
    lq_prox_detailed(y, lambda, q, settings).map(|p| p.value)
}

/// `l_q` shrinkage. For `|y| > a` Newton's method runs on
/// `h'(x) = -2(|y| - x) + λq x^(q-1)` from `x0 = |y|`; `h'` is increasing and
/// convex on `[x', |y|]`, so the iterates decrease monotonically to `x'`.
/// If Newton stalls the root is bracketed on `[x_infl, |y|]` and bisected.
pub fn lq_prox_detailed(y: f64, lambda: f64, q: f64, settings: NewtonSettings) -> Result<LqProx> {
    check_lq(lambda, q)?;
    settings.validate()?;
    if y.is_nan() {
        return Err(invalid("input is NaN"));
    }
    let threshold = newton_threshold_a(lambda, q);
    let t = y.abs();
    // The second test makes `λ = λ*(|y|)` zero `y` exactly, without relying
    // on `a(λ*(|y|))` rounding back to `|y|`.
    if !(t > threshold) || lambda >= lambda_star(t, q) {
        return Ok(LqProx { value: 0.0, threshold, iterations: 0, bisection: false });
    }
    let lq = lambda * q;
    let grad = |x: f64| -2.0 * (t - x) + lq * x.powf(q - 1.0);
    let curv = |x: f64| 2.0 + lq * (q - 1.0) * x.powf(q - 2.0);
    let stop = settings.tol * t.max(1.0);
    let x_infl = lq_jump_lower_bound(lambda, q);

    let mut x = t;
    for it in 0..settings.max_iter {
        let g = grad(x);
        if g.abs() <= stop {
            return Ok(LqProx { value: y.signum() * x, threshold, iterations: it, bisection: false });
        }
        let c = curv(x);
        let next = x - g / c;
        if !(c > 0.0) || !(next > x_infl) || !(next <= x) {
            break;
        }
        if next == x {
            return Ok(LqProx { value: y.signum() * x, threshold, iterations: it, bisection: false });
        }
        x = next;
    }

    // Bracket: h'(x_infl) < 0 < h'(t) whenever two stationary points exist.
    let (mut lo, mut hi) = (x_infl, t);
    if !(grad(lo) < 0.0 && grad(hi) > 0.0) {
        return Err(Error::NoConvergence("l_q Newton solver"));
    }
    let mut iterations = settings.max_iter;
    for _ in 0..2000 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let g = grad(mid);
        if g.abs() <= stop || mid == lo || mid == hi {
            lo = mid;
            hi = mid;
            break;
        }
        if g > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LqProx { value: y.signum() * 0.5 * (lo + hi), threshold, iterations, bisection: true })
}

/// Root `q*` of `d/dq ln g(q) = -1/q - ln(1-q) + ln(2-q)` and the minimum
/// value `g(q*)` of `g(q) = 2/(q(1-q)) · ((1-q)/(2-q))^(2-q)`.
pub fn critical_q() -> Result<(f64, f64)> {
    let dlog = |q: f64| -1.0 / q - (1.0 - q).ln() + (2.0 - q).ln();
    let d2log = |q: f64| 1.0 / (q * q) + 1.0 / (1.0 - q) - 1.0 / (2.0 - q);
    let g = |q: f64| 2.0 / (q * (1.0 - q)) * ((1.0 - q) / (2.0 - q)).powf(2.0 - q);
    let mut q = 0.5;
    for _ in 0..100 {
        let step = dlog(q) / d2log(q);
        q = (q - step).clamp(1e-6, 1.0 - 1e-6);
        if step.abs() < 1e-15 {
            return Ok((q, g(q)));
        }
    }
    Err(Error::NoConvergence("critical q Newton iteration"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: NewtonSettings = NewtonSettings { tol: 1e-12, max_iter: 200 };

    #[test]
    fn hard_cases() {
        assert_eq!(hard(0.5, 0.6), 0.0);
        assert_eq!(hard(0.9, 0.6), 0.9);
        assert_eq!(hard(-0.6, 0.6), 0.0);
    }

    #[test]
    fn soft_cases() {
        assert!((soft(0.9, 0.6) - 0.3).abs() < 1e-15);
        assert!((soft(-0.9, 0.6) + 0.3).abs() < 1e-15);
        assert_eq!(soft(0.6, 0.6), 0.0);
    }

    #[test]
    fn springback_cases() {
        assert!((springback(0.9, 0.6, 0.5).unwrap() - 0.3 / 0.7).abs() < 1e-12);
        assert!((springback(0.9, 0.6, 1.0).unwrap() - 0.75).abs() < 1e-12);
        assert_eq!(springback(0.5, 0.6, 1.0).unwrap(), 0.0);
        assert!(matches!(springback(0.9, 0.6, 2.0), Err(Error::SpringbackConstraint { .. })));
    }

    #[test]
    fn threshold_a_values() {
        let a = newton_threshold_a(1.0, 0.5);
        assert!((a - 0.75 * 0.5f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((a - 0.944_940_787_421_155).abs() < 1e-12);
        let ratio = newton_threshold_a(0.001, 0.5) / newton_threshold_a(0.0001, 0.5);
        assert!((ratio - 10f64.powf(2.0 / 3.0)).abs() < 1e-9);
        assert!((newton_threshold_a(1.0, 0.9) - 0.55 * 0.1f64.powf(-1.0 / 11.0)).abs() < 1e-15);
    }

    #[test]
    fn lq_prox_cases() {
        // t^3 - 2t + 0.25 = 0 with t = sqrt(x): larger root by bisection
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if m * m * m - 2.0 * m + 0.25 > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let expected = lo * lo;
        let got = lq_prox_detailed(2.0, 1.0, 0.5, S).unwrap();
        assert!((got.value - expected).abs() < 1e-10, "{} vs {expected}", got.value);
        assert!((got.value - 1.8150).abs() < 1e-3);
        assert!(!got.bisection);
        assert!(got.iterations <= 60);
        assert!((lq_prox(-2.0, 1.0, 0.5, S).unwrap() + expected).abs() < 1e-10);
        assert_eq!(lq_prox(0.5, 1.0, 0.5, S).unwrap(), 0.0);
        let a = newton_threshold_a(1.0, 0.5);
        assert_eq!(lq_prox(a, 1.0, 0.5, S).unwrap(), 0.0);
        assert!(lq_prox(a * (1.0 + 1e-12), 1.0, 0.5, S).unwrap() > lq_jump_lower_bound(1.0, 0.5));
    }

    #[test]
    fn lq_rejects_bad_parameters() {
        assert!(lq_prox(1.0, 0.0, 0.5, S).is_err());
        assert!(lq_prox(1.0, 1.0, 0.0, S).is_err());
        assert!(lq_prox(1.0, 1.0, 1.0, S).is_err());
        assert!(lq_prox(f64::NAN, 1.0, 0.5, S).is_err());
        assert!(NewtonSettings::new(0.0, 10).is_err());
        assert!(NewtonSettings::new(1e-10, 0).is_err());
    }

    #[test]
    fn starved_newton_falls_back_to_bisection() {
        let s = NewtonSettings { tol: 1e-14, max_iter: 1 };
        let p = lq_prox_detailed(2.0, 1.0, 0.5, s).unwrap();
        assert!(p.bisection);
        assert!((p.value - lq_prox(2.0, 1.0, 0.5, S).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lambda_star_and_bar() {
        assert!((lambda_star(0.944_94, 0.5) - 1.0).abs() < 1e-4);
        assert!((lambda_bar(1.0, 0.5) - 8.0 * (1.0f64 / 3.0).powf(1.5)).abs() < 1e-12);
        assert!((lambda_bar(1.0, 0.5) - 1.5396).abs() < 1e-4);
        // tie coordinate solves h'(x) = 0 at lambda = lambda*
        for &(y, q) in &[(1.3, 0.3), (0.7, 0.5), (2.2, 0.8)] {
            let l = lambda_star(y, q);
            let x = 2.0 * y * (1.0 - q) / (2.0 - q);
            let g = -2.0 * (y - x) + l * q * x.powf(q - 1.0);
            assert!(g.abs() < 1e-12);
            let h0 = y * y;
            let hx = (y - x).powi(2) + l * x.powf(q);
            assert!((h0 - hx).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_bar_root_count() {
        // sign changes of h' on (0, y)
        let count = |y: f64, lambda: f64, q: f64| {
            let g = |x: f64| -2.0 * (y - x) + lambda * q * x.powf(q - 1.0);
            let mut prev = g(1e-9 * y);
            let mut changes = 0;
            for i in 1..=200_000 {
                let v = g(y * i as f64 / 200_000.0);
                if (v > 0.0) != (prev > 0.0) {
                    changes += 1;
                }
                prev = v;
            }
            changes
        };
        let lb = lambda_bar(1.0, 0.5);
        assert_eq!(count(1.0, 0.95 * lb, 0.5), 2);
        assert_eq!(count(1.0, 1.05 * lb, 0.5), 0);
        assert_eq!(lq_prox(1.0, 1.01 * lb, 0.5, S).unwrap(), 0.0);
    }

    #[test]
    fn critical_q_values() {
        let (q, g) = critical_q().unwrap();
        assert!((q - 0.691_766).abs() < 1e-5);
        assert!((g - 1.4154).abs() < 1e-3);
        assert!(g > 1.0);
    }

    #[test]
    fn rule_dispatch() {
        assert_eq!(ThresholdRule::hard(0.6).unwrap().apply(0.9).unwrap(), 0.9);
        let r = ThresholdRule::newton_lq(1.0, 0.5).unwrap();
        assert!((r.apply(2.0).unwrap() - 1.8150).abs() < 1e-3);
        let sb = ThresholdRule::springback(0.6, 1.0).unwrap();
        assert!((apply(&sb, -0.9).unwrap() + 0.75).abs() < 1e-12);
    }

    #[test]
    fn rule_validation() {
        assert!(ThresholdRule::hard(0.0).is_err());
        assert!(ThresholdRule::soft(-1.0).is_err());
        assert!(ThresholdRule::springback(1.0, 1.0).is_err());
        assert!(ThresholdRule::springback(0.5, 0.0).is_err());
        assert!(ThresholdRule::newton_lq(1.0, 0.0).is_err());
        assert!(ThresholdRule::newton_lq(1.0, 1.0).is_err());
        assert!(ThresholdRule::newton_lq(f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(ThresholdKind::NewtonLq { q: 0.25 }.label(), "Newton q=1/4");
        assert_eq!(ThresholdKind::NewtonLq { q: 2.0 / 3.0 }.label(), "Newton q=2/3");
        assert_eq!(ThresholdKind::NewtonLq { q: 0.37 }.label(), "Newton q=0.37");
        assert_eq!(ThresholdKind::Soft.label(), "Lasso");
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let r = ThresholdRule::springback(0.5, 1.0).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        let back: ThresholdRule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        let bad: ThresholdRule =
            serde_json::from_str(r#"{"kind":{"kind":"springback","alpha":3.0},"lambda":0.5}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
