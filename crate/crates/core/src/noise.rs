//! Seeded noise models and the counter-based generator behind them.
//!
//! Every random number is a pure function of `(seed, stream, index)`:
//! the SplitMix64 finaliser is applied to
//! `key(seed, stream) + (index + 1) · 0x9E3779B97F4A7C15`, where
//! `key(seed, stream) = mix(seed + stream · 0xD1B54A32D192ED03)`.
//! Uniforms take the top 53 bits; normals use Box–Muller on two consecutive
//! uniforms. Any index range can therefore be regenerated independently.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_GAMMA: u64 = 0xD1B5_4A32_D192_ED03;

const STREAM_GAUSSIAN: u64 = 1;
const STREAM_IMPULSE_MASK: u64 = 2;
const STREAM_IMPULSE_VALUE: u64 = 3;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_key(seed: u64, stream: u64) -> u64 {
    mix64(seed.wrapping_add(stream.wrapping_mul(STREAM_GAMMA)))
}

pub fn u64_at(key: u64, index: u64) -> u64 {
    mix64(key.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Uniform on `[0, 1)`.
pub fn uniform_at(key: u64, index: u64) -> f64 {
    (u64_at(key, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal from uniforms at `2·index` and `2·index + 1`.
pub fn normal_at(key: u64, index: u64) -> f64 {
    let u1 = 1.0 - uniform_at(key, 2 * index); // (0, 1]
    let u2 = uniform_at(key, 2 * index + 1);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Sequential view of one counter stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { key: stream_key(seed, stream), counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = u64_at(self.key, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        let v = uniform_at(self.key, self.counter);
        self.counter += 1;
        v
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform integer in `0..n` (multiply-shift, negligible bias for small `n`).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// `k` distinct indices from `0..n`, in draw order (partial Fisher–Yates).
    pub fn choose(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k.min(n) {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k.min(n));
        pool
    }
}

/// Additive noise: `N(0, σ²)` plus impulse noise that is `Uniform[-a, a]`
/// with probability 1/2 and zero otherwise. A zero magnitude disables the
/// respective component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub gaussian_sigma: f64,
    pub impulse_amplitude: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(gaussian_sigma: f64, impulse_amplitude: f64, seed: u64) -> Result<Self> {
        let spec = Self { gaussian_sigma, impulse_amplitude, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma >= 0.0 && self.gaussian_sigma.is_finite()) {
            return Err(invalid("gaussian sigma must be finite and non-negative"));
        }
        if !(self.impulse_amplitude >= 0.0 && self.impulse_amplitude.is_finite()) {
            return Err(invalid("impulse amplitude must be finite and non-negative"));
        }
        Ok(())
    }

    /// Noise value at position `j` of the stream.
    pub fn value_at(&self, j: u64) -> f64 {
        let mut v = 0.0;
        if self.gaussian_sigma > 0.0 {
            v += self.gaussian_sigma * normal_at(stream_key(self.seed, STREAM_GAUSSIAN), j);
        }
        if self.impulse_amplitude > 0.0 && uniform_at(stream_key(self.seed, STREAM_IMPULSE_MASK), j) < 0.5 {
            let u = uniform_at(stream_key(self.seed, STREAM_IMPULSE_VALUE), j);
            v += self.impulse_amplitude * (1.0 - 2.0 * u);
        }
        v
    }

    pub fn sample_range(&self, start: u64, len: usize) -> Vec<f64> {
        (0..len as u64).map(|i| self.value_at(start + i)).collect()
    }

    pub fn sample(&self, n: usize) -> Vec<f64> {
        self.sample_range(0, n)
    }
}

/// Draws `n` samples from `spec`.
pub fn sample(spec: &NoiseSpec, n: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(invalid("sample length must be positive"));
    }
    Ok(spec.sample(n))
}
