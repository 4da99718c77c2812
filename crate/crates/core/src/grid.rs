//! Uniform label grids, periodic staircase profiles and the monotone maps
//! built on top of them.
//!
//! A profile with `M` cells stores one value per label cell `[k/M, (k+1)/M)`.
//! A [`MonotoneMap`] interprets a profile as the displacement `xi` of the
//! staircase `X_k = a_k + xi_k` with labels at the cell centers
//! `a_k = (k + 1/2)/M`, extended to all integers by
//! `X_{k+M} = X_k + 1`.

use crate::error::{Error, Result};

/// Slack allowed when validating monotonicity of maps computed in floating
/// point (rounding of `a_k + xi_k` may invert exact ties by an ulp).
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Center `(k + 1/2)/M` of label cell `k`.
#[inline]
pub fn cell_center(k: usize, m: usize) -> f64 {
    (k as f64 + 0.5) / m as f64
}

/// `M` samples of a 1-periodic piecewise-constant function.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    values: Vec<f64>,
}

impl PeriodicProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Profile(format!(
                "need at least 2 cells, got {}",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Profile(format!("non-finite value in cell {k}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![0.0; m])
    }

    pub fn from_fn(m: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..m).map(f).collect())
    }

    /// Skips validation; callers guarantee `len >= 2` and finiteness.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Self { values }
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Periodic lookup: any integer index is reduced modulo `M`.
    #[inline]
    pub fn at(&self, k: i64) -> f64 {
        self.values[k.rem_euclid(self.values.len() as i64) as usize]
    }

    /// Value of the staircase at label `a` (reduced modulo 1).
    pub fn eval(&self, a: f64) -> f64 {
        let m = self.values.len();
        let idx = (a.rem_euclid(1.0) * m as f64).floor() as usize;
        self.values[idx.min(m - 1)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Profile shifted by `s` cells: `out[k] = self[k + s]`.
    pub fn shifted(&self, s: i64) -> Self {
        let m = self.values.len() as i64;
        Self {
            values: (0..m).map(|k| self.at(k + s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_cells(other)?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub(crate) fn check_same_cells(&self, other: &Self) -> Result<()> {
        if self.cells() != other.cells() {
            return Err(Error::Profile(format!(
                "cell count mismatch: {} vs {}",
                self.cells(),
                other.cells()
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Which discrete `L^q` norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

impl Norm {
    pub const ALL: [Norm; 3] = [Norm::L1, Norm::L2, Norm::LInf];

    /// Norm of a plain slice of cell values with uniform weights `1/len`.
    pub fn of_slice(self, values: &[f64]) -> f64 {
        let n = values.len() as f64;
        match self {
            Norm::L1 => values.iter().map(|v| v.abs()).sum::<f64>() / n,
            Norm::L2 => (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
            Norm::LInf => values.iter().fold(0.0, |acc, v| acc.max(v.abs())),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Norm::L1 => "L1",
            Norm::L2 => "L2",
            Norm::LInf => "Linf",
        }
    }
}

/// `(sum |v_k|^q / M)^(1/q)`, or `max |v_k|` for `q = inf`.
pub fn lq_norm(p: &PeriodicProfile, q: Norm) -> f64 {
    q.of_slice(p.values())
}

/// Cell-shift approximation of `sup_a |p(a + omega) - p(a)|`.
///
/// `omega` is rounded to the nearest whole number of cells.
pub fn modulus_of_continuity(p: &PeriodicProfile, omega: f64) -> f64 {
    let m = p.cells() as i64;
    let shift = (omega * m as f64).round() as i64;
    if shift.rem_euclid(m) == 0 {
        return 0.0;
    }
    (0..m).fold(0.0, |acc, k| acc.max((p.at(k + shift) - p.at(k)).abs()))
}

/// Non-decreasing staircase `X = identity + xi` with `X_{k+M} = X_k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    xi: PeriodicProfile,
}

impl MonotoneMap {
    /// Validates monotonicity within the period and across the seam.
    pub fn new(xi: PeriodicProfile) -> Result<Self> {
        let map = Self { xi };
        if let Some(k) = map.first_descent(MONOTONE_SLACK) {
            return Err(Error::Profile(format!(
                "map decreases between cells {k} and {}",
                k + 1
            )));
        }
        Ok(map)
    }

    pub(crate) fn from_xi_unchecked(xi: PeriodicProfile) -> Self {
        Self { xi }
    }

    /// The rest state `X_k = a_k`.
    pub fn identity(m: usize) -> Result<Self> {
        Ok(Self {
            xi: PeriodicProfile::zeros(m)?,
        })
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.xi.cells()
    }

    #[inline]
    pub fn xi(&self) -> &PeriodicProfile {
        &self.xi
    }

    pub fn into_xi(self) -> PeriodicProfile {
        self.xi
    }

    /// `X_k` for any integer `k`, using the periodic lift.
    #[inline]
    pub fn position(&self, k: i64) -> f64 {
        let m = self.cells() as i64;
        let q = k.div_euclid(m);
        let r = k.rem_euclid(m) as usize;
        cell_center(r, m as usize) + self.xi.values()[r] + q as f64
    }

    /// One period of positions `X_0 .. X_{M-1}`.
    pub fn positions(&self) -> Vec<f64> {
        let m = self.cells();
        self.xi
            .values()
            .iter()
            .enumerate()
            .map(|(k, x)| cell_center(k, m) + x)
            .collect()
    }

    /// First `k` in `0..M` where `X_{k+1} < X_k - slack`.
    pub(crate) fn first_descent(&self, slack: f64) -> Option<usize> {
        let m = self.cells() as i64;
        (0..m)
            .find(|&k| self.position(k + 1) < self.position(k) - slack)
            .map(|k| k as usize)
    }
}
