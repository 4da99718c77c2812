//! Noise patterns `N(a/r)` substituted for the white-noise increment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::cell_center;

const MOMENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseKind {
    /// `N = -1` on `(0, 1/2)`, `+1` on `(1/2, 1)`.
    Binary,
    /// Equally spaced samples of one period of `N`; must have zero mean and
    /// unit variance.
    Samples(Vec<f64>),
    /// Independent standard normal draws keyed by `(seed, step, cell)`.
    Stochastic { seed: u64 },
}

/// A noise pattern together with its frequency `L = 1/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    frequency: usize,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, frequency: usize) -> Result<Self> {
        if frequency == 0 {
            return Err(Error::config("L", "noise frequency must be positive"));
        }
        if let NoiseKind::Samples(s) = &kind {
            if s.is_empty() {
                return Err(Error::config("noise", "empty sample list"));
            }
            let n = s.len() as f64;
            let mean = s.iter().sum::<f64>() / n;
            let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if mean.abs() > MOMENT_TOL || (var - 1.0).abs() > MOMENT_TOL {
                return Err(Error::config(
                    "noise",
                    format!(
                        "samples need mean 0 and variance 1, got mean {mean:e}, variance {var}"
                    ),
                ));
            }
        }
        Ok(Self { kind, frequency })
    }

    pub fn binary(frequency: usize) -> Result<Self> {
        Self::new(NoiseKind::Binary, frequency)
    }

    pub fn kind(&self) -> &NoiseKind {
        &self.kind
    }

    /// `L = 1/r`, the number of noise periods per unit label length.
    pub fn frequency(&self) -> usize {
        self.frequency
    }

    /// `r = 1/L`.
    pub fn period(&self) -> f64 {
        1.0 / self.frequency as f64
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self.kind, NoiseKind::Stochastic { .. })
    }

    /// Binary noise is piecewise constant on the label grid only when `M` is
    /// a multiple of `2L`.
    pub fn check_grid(&self, m: usize) -> Result<()> {
        if matches!(self.kind, NoiseKind::Binary) && !m.is_multiple_of(2 * self.frequency) {
            return Err(Error::config(
                "M",
                format!(
                    "M = {m} must be a multiple of 2L = {} for binary noise",
                    2 * self.frequency
                ),
            ));
        }
        Ok(())
    }

    /// Cell shift (in label cells) under which the pattern repeats exactly,
    /// when one exists: `M / L` for deterministic patterns aligned with `M`.
    pub fn cell_period(&self, m: usize) -> Option<usize> {
        match &self.kind {
            NoiseKind::Stochastic { .. } => None,
            _ if m.is_multiple_of(self.frequency) => Some(m / self.frequency),
            _ => None,
        }
    }

    /// Value for cell `k` without re-validating the grid. `k < m` assumed.
    #[inline]
    pub(crate) fn value_unchecked(&self, k: usize, m: usize, step: usize) -> f64 {
        match &self.kind {
            NoiseKind::Binary => {
                if (2 * self.frequency * k / m).is_multiple_of(2) {
                    -1.0
                } else {
                    1.0
                }
            }
            NoiseKind::Samples(s) => {
                let y = (cell_center(k, m) * self.frequency as f64).rem_euclid(1.0);
                let idx = ((y * s.len() as f64).floor() as usize).min(s.len() - 1);
                s[idx]
            }
            NoiseKind::Stochastic { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(counter_key(*seed, step as u64, k as u64));
                rng.sample(StandardNormal)
            }
        }
    }

    /// Noise values for all `m` cells at `step`.
    pub fn pattern(&self, m: usize, step: usize) -> Result<Vec<f64>> {
        self.check_grid(m)?;
        Ok((0..m).map(|k| self.value_unchecked(k, m, step)).collect())
    }
}

/// `N(a_k/r)` at the center of cell `k`.
///
/// Deterministic variants ignore `step`; the stochastic variant returns a
/// draw determined by `(seed, step, k)` alone.
pub fn noise_value(spec: &NoiseSpec, k: usize, m: usize, step: usize) -> Result<f64> {
    spec.check_grid(m)?;
    if k >= m {
        return Err(Error::Profile(format!("cell {k} out of range for M = {m}")));
    }
    Ok(spec.value_unchecked(k, m, step))
}

// splitmix64 finalizer chain; spreads (seed, step, k) over the seed space.
fn counter_key(seed: u64, step: u64, k: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
    let a = mix(seed.wrapping_add(GOLDEN));
    let b = mix(a ^ step.wrapping_add(GOLDEN.wrapping_mul(2)));
    mix(b ^ k.wrapping_add(GOLDEN.wrapping_mul(3)))
}
