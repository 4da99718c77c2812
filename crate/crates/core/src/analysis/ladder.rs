use std::time::Instant;

use rayon::prelude::*;

use super::compare::{compare_to_reference, ErrorRecord, Target};
use super::order::estimate_order;
use crate::config::SchemeConfig;
use crate::error::{Error, Result};
use crate::grid::Norm;
use crate::scheme::{run, LagrangianState, Trajectory};

/// One rung of a refinement ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderLevel {
    pub h: f64,
    pub r: f64,
    /// `L = 1/r`.
    pub frequency: usize,
    /// `M = 2L`.
    pub cells: usize,
}

/// Levels with `r = r_factor * h`. Step sizes must be strictly decreasing and
/// every `1/r` an integer (to 1e-9).
pub fn build_ladder(hs: &[f64], r_factor: f64) -> Result<Vec<LadderLevel>> {
    if hs.is_empty() {
        return Err(Error::config("ladder", "empty ladder"));
    }
    if !(r_factor.is_finite() && r_factor > 0.0) {
        return Err(Error::config("r_factor", "must be positive"));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(
            "ladder",
            "step sizes must be strictly decreasing",
        ));
    }
    hs.iter()
        .map(|&h| {
            let r = r_factor * h;
            let inv = 1.0 / r;
            let l = inv.round();
            if l < 1.0 || (inv - l).abs() > 1e-9 * l {
                return Err(Error::config(
                    "r_factor",
                    format!("1/r = {inv} is not an integer at h = {h}"),
                ));
            }
            let l = l as usize;
            Ok(LadderLevel {
                h,
                r,
                frequency: l,
                cells: 2 * l,
            })
        })
        .collect()
}

/// A finished ladder run.
#[derive(Debug, Clone)]
pub struct LevelRun {
    pub level: LadderLevel,
    pub traj: Trajectory,
    pub seconds: f64,
}

/// Runs every level concurrently. `setup` builds the configuration and the
/// initial state of a level.
pub fn run_ladder<F>(levels: &[LadderLevel], setup: F) -> Result<Vec<LevelRun>>
where
    F: Fn(&LadderLevel) -> Result<(SchemeConfig, LagrangianState)> + Sync,
{
    levels
        .par_iter()
        .map(|level| {
            let (cfg, init) = setup(level)?;
            let start = Instant::now();
            let traj = run(&cfg, &init)?;
            Ok(LevelRun {
                level: *level,
                traj,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

/// Which error field an order estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rho,
    U,
    Xi,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<LadderLevel>,
    pub errors: Vec<ErrorRecord>,
    pub seconds: Vec<f64>,
    /// Common comparison grid.
    pub j_cells: usize,
}

impl ConvergenceReport {
    /// Compares every run against `target` at time `t`. `j_cells = None`
    /// uses `min(M)/2`.
    pub fn from_runs(
        runs: &[LevelRun],
        target: &Target<'_>,
        t: f64,
        j_cells: Option<usize>,
    ) -> Result<Self> {
        let j = match j_cells {
            Some(j) => j,
            None => runs.iter().map(|r| r.level.cells).min().unwrap_or(2) / 2,
        };
        let errors = runs
            .par_iter()
            .map(|r| compare_to_reference(&r.traj, target, t, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            levels: runs.iter().map(|r| r.level).collect(),
            errors,
            seconds: runs.iter().map(|r| r.seconds).collect(),
            j_cells: j,
        })
    }

    pub fn series(&self, field: Field, norm: Norm) -> Vec<f64> {
        self.errors
            .iter()
            .map(|e| {
                let set = match field {
                    Field::Rho => e.rho,
                    Field::U => e.u,
                    Field::Xi => e.xi,
                    Field::Z => e.z,
                };
                set.get(norm)
            })
            .collect()
    }

    pub fn hs(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.h).collect()
    }

    /// Least-squares order over all levels.
    pub fn order(&self, field: Field, norm: Norm) -> Result<f64> {
        Ok(estimate_order(&self.series(field, norm), &self.hs())?.order)
    }

    /// Order between each level and the previous one (`None` on the first).
    pub fn local_orders(&self, field: Field, norm: Norm) -> Vec<Option<f64>> {
        let e = self.series(field, norm);
        let hs = self.hs();
        (0..e.len())
            .map(|i| {
                if i == 0 {
                    return None;
                }
                estimate_order(&e[i - 1..=i], &hs[i - 1..=i])
                    .ok()
                    .map(|o| o.order)
            })
            .collect()
    }

    /// Whether the error strictly decreases along the ladder.
    pub fn strictly_decreasing(&self, field: Field, norm: Norm) -> bool {
        self.series(field, norm).windows(2).all(|w| w[1] < w[0])
    }
}
