//! Finite-difference solver for the pseudo-inverse formulation
//!
//! ```text
//! u_t + (Z(t, u) + lambda (x - u)) u_x = eps u_xx
//! Z_t + lambda Z = F(X - a) - lambda^2 (X - a),   u(t, X(t, a)) = a
//! ```
//!
//! on `J` x-cells: explicit first-order upwind advection, implicit diffusion,
//! explicit Euler for `Z` on `J` label cells.

use super::tridiag::CyclicTridiagonal;
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::fourier::{invert_shifted_identity, FourierSeries};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicConfig {
    pub epsilon: f64,
    pub lambda: f64,
    pub forcing: ForcingSpec,
    pub horizon: f64,
    /// x-cells (and label cells for `Z`).
    pub cells: usize,
    /// Requested time step; the solver uses `T / ceil(T / h_ref)`.
    pub h_ref: f64,
    /// Keep every `save_every`-th step (the final one is always kept).
    pub save_every: usize,
}

impl ParabolicConfig {
    fn validate(&self) -> Result<()> {
        if self.cells < 3 {
            return Err(Error::config("ref_J", "need at least 3 cells"));
        }
        if !(self.h_ref.is_finite() && self.h_ref > 0.0) {
            return Err(Error::config("ref_h", "must be positive"));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::config("epsilon", "must be finite and >= 0"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::config("lambda", "must be finite and >= 0"));
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return Err(Error::config("T", "horizon must be finite and >= 0"));
        }
        if self.save_every == 0 {
            return Err(Error::config("save_stride", "must be >= 1"));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        let ratio = self.horizon / self.h_ref;
        let n = ratio.round();
        if (ratio - n).abs() <= 1e-9 * n.max(1.0) {
            n as usize
        } else {
            ratio.ceil() as usize
        }
    }
}

/// Snapshots of `w = u - x` on the x-centers and `Z` on the label centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub cells: usize,
    pub dx: f64,
    /// Time step actually used.
    pub h_ref: f64,
    /// `h_ref max|b| / dx` at the initial time.
    pub cfl: f64,
    pub times: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
}

fn center(j: usize, n: usize) -> f64 {
    (j as f64 + 0.5) / n as f64
}

/// Linear interpolation of a periodic sample on centers `(i + 1/2)/n`.
pub(crate) fn periodic_interp(values: &[f64], a: f64) -> f64 {
    let n = values.len();
    let s = a * n as f64 - 0.5;
    let i = s.floor();
    let f = s - i;
    let i0 = (i as i64).rem_euclid(n as i64) as usize;
    let i1 = (i0 + 1) % n;
    (1.0 - f) * values[i0] + f * values[i1]
}

/// Lifted `u(x) = x + w(x)` by linear interpolation between centers.
pub(crate) fn u_interp(w: &[f64], x: f64) -> f64 {
    x + periodic_interp(w, x)
}

/// `X(a)` inverting the piecewise-linear lifted `u` sampled as `x_j + w_j`.
pub(crate) fn invert_u(w: &[f64], a: f64) -> f64 {
    let n = w.len();
    let nf = n as f64;
    let u = |j: i64| -> f64 {
        let q = j.div_euclid(n as i64);
        let r = j.rem_euclid(n as i64) as usize;
        center(r, n) + w[r] + q as f64
    };
    // u is strictly increasing with u(j + n) = u(j) + 1, and |w| < 1.
    let mut lo = -(n as i64) - 1;
    let mut hi = 2 * n as i64 + 1;
    while u(lo) > a {
        lo -= n as i64;
    }
    while u(hi) <= a {
        hi += n as i64;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u(mid) <= a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (ul, uh) = (u(lo), u(hi));
    let xl = (lo as f64 + 0.5) / nf;
    xl + (a - ul) / (uh - ul) / nf
}

fn strictly_increasing(w: &[f64], dx: f64) -> Option<usize> {
    let n = w.len();
    (0..n).find(|&j| dx + w[(j + 1) % n] - w[j] <= 0.0)
}

struct Solver<'a> {
    cfg: &'a ParabolicConfig,
    dx: f64,
    h: f64,
    diffusion: CyclicTridiagonal,
}

impl Solver<'_> {
    fn velocity(&self, w: &[f64], z: &[f64]) -> Vec<f64> {
        let lam = self.cfg.lambda;
        let n = w.len();
        (0..n)
            .map(|j| {
                let x = center(j, n);
                let u = x + w[j];
                periodic_interp(z, u) + lam * (x - u)
            })
            .collect()
    }

    fn step(&self, w: &mut Vec<f64>, z: &mut [f64], n_step: usize) -> Result<()> {
        let n = w.len();
        let (h, dx, lam) = (self.h, self.dx, self.cfg.lambda);
        let b = self.velocity(w, z);
        let bmax = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if h * bmax > dx {
            return Err(Error::Cfl {
                h_ref: h,
                limit: dx / bmax,
            });
        }
        // Z uses the positions of the current level.
        let xi: Vec<f64> = (0..n)
            .map(|i| {
                let a = center(i, n);
                invert_u(w, a) - a
            })
            .collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|j| {
                let du = if b[j] >= 0.0 {
                    w[j] - w[(j + n - 1) % n]
                } else {
                    w[(j + 1) % n] - w[j]
                };
                w[j] - h * b[j] * (1.0 + du / dx)
            })
            .collect();
        self.diffusion.solve(&mut rhs);
        *w = rhs;
        for i in 0..n {
            z[i] += h * (-lam * z[i] + self.cfg.forcing.eval(xi[i]) - lam * lam * xi[i]);
        }
        if let Some(cell) = strictly_increasing(w, dx) {
            return Err(Error::MonotonicityLost { step: n_step, cell });
        }
        Ok(())
    }
}

/// Runs the reference solver from `u0 = x + w0` (sampled at the x-centers)
/// and `Z0` (sampled at the label centers).
pub fn solve_coupled_parabolic(
    w0: &dyn Fn(f64) -> f64,
    z0: &dyn Fn(f64) -> f64,
    cfg: &ParabolicConfig,
) -> Result<ReferenceSolution> {
    cfg.validate()?;
    let n = cfg.cells;
    let dx = 1.0 / n as f64;
    let steps = cfg.steps();
    let h = if steps == 0 {
        cfg.h_ref
    } else {
        cfg.horizon / steps as f64
    };
    let mut w: Vec<f64> = (0..n).map(|j| w0(center(j, n))).collect();
    let mut z: Vec<f64> = (0..n).map(|i| z0(center(i, n))).collect();
    if w.iter().chain(&z).any(|v| !v.is_finite()) {
        return Err(Error::InitialData("non-finite reference data".into()));
    }
    if let Some(j) = strictly_increasing(&w, dx) {
        return Err(Error::InitialData(format!(
            "u0 is not strictly increasing at x-cell {j}"
        )));
    }
    let nu = cfg.epsilon * h / (dx * dx);
    let solver = Solver {
        cfg,
        dx,
        h,
        diffusion: CyclicTridiagonal::constant(n, -nu, 1.0 + 2.0 * nu, -nu),
    };
    let bmax = solver
        .velocity(&w, &z)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let limit = 0.5 * dx / bmax;
    if steps > 0 && h > limit {
        return Err(Error::Cfl { h_ref: h, limit });
    }
    let mut out = ReferenceSolution {
        cells: n,
        dx,
        h_ref: h,
        cfl: h * bmax / dx,
        times: vec![0.0],
        w: vec![w.clone()],
        z: vec![z.clone()],
    };
    for s in 0..steps {
        solver.step(&mut w, &mut z, s)?;
        let done = s + 1;
        if done % cfg.save_every == 0 || done == steps {
            out.times.push(done as f64 * h);
            out.w.push(w.clone());
            out.z.push(z.clone());
        }
    }
    Ok(out)
}

impl ReferenceSolution {
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("at least the initial snapshot")
    }

    /// Snapshot pair bracketing `t` and the interpolation weight.
    fn bracket(&self, t: f64) -> Result<(usize, usize, f64)> {
        let end = self.final_time();
        let slack = 1e-9 * self.h_ref.max(1e-300);
        if t < -slack || t > end + slack {
            return Err(Error::Horizon { t, available: end });
        }
        let i = self.times.partition_point(|s| *s <= t);
        if i == 0 {
            return Ok((0, 0, 0.0));
        }
        if i >= self.times.len() {
            let last = self.times.len() - 1;
            return Ok((last, last, 0.0));
        }
        let (a, b) = (self.times[i - 1], self.times[i]);
        Ok((i - 1, i, (t - a) / (b - a)))
    }

    fn mix(snaps: &[Vec<f64>], (i, k, f): (usize, usize, f64)) -> Vec<f64> {
        if f == 0.0 {
            return snaps[i].clone();
        }
        snaps[i]
            .iter()
            .zip(&snaps[k])
            .map(|(a, b)| (1.0 - f) * a + f * b)
            .collect()
    }

    /// `w = u - x` at time `t` on the solver grid.
    pub fn w_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(Self::mix(&self.w, self.bracket(t)?))
    }

    pub fn z_at(&self, t: f64) -> Result<Vec<f64>> {
        Ok(Self::mix(&self.z, self.bracket(t)?))
    }

    /// `u` at the centers of a grid with `j_cells` cells.
    pub fn u_on(&self, t: f64, j_cells: usize) -> Result<Vec<f64>> {
        let w = self.w_at(t)?;
        Ok((0..j_cells)
            .map(|j| u_interp(&w, center(j, j_cells)))
            .collect())
    }

    /// Cell averages of `rho = u_x` on `j_cells` cells.
    pub fn density_on(&self, t: f64, j_cells: usize) -> Result<Vec<f64>> {
        let w = self.w_at(t)?;
        let jf = j_cells as f64;
        Ok((0..j_cells)
            .map(|j| jf * (u_interp(&w, (j + 1) as f64 / jf) - u_interp(&w, j as f64 / jf)))
            .collect())
    }

    /// `(xi, Z)` at the `m` label centers: `xi(a) = X(a) - a` with `X` the
    /// inverse of the piecewise-linear `u`.
    pub fn material_on(&self, t: f64, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let w = self.w_at(t)?;
        let z = self.z_at(t)?;
        let xi = (0..m)
            .map(|k| {
                let a = center(k, m);
                invert_u(&w, a) - a
            })
            .collect();
        Ok((xi, self.z_on(&z, m)))
    }

    /// Like [`material_on`](Self::material_on), but inverting the
    /// trigonometric interpolant of `w`. Smooth in `a`, so suitable for
    /// finite differences on a grid finer than the solver's.
    pub fn material_spectral(&self, t: f64, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let w = self.w_at(t)?;
        let z = self.z_at(t)?;
        let series = trig_interpolant(&w);
        let dw = series.derivative();
        let xi = (0..m)
            .map(|k| {
                let a = center(k, m);
                invert_shifted_identity(&series, &dw, a) - a
            })
            .collect();
        Ok((xi, self.z_on(&z, m)))
    }

    fn z_on(&self, z: &[f64], m: usize) -> Vec<f64> {
        (0..m).map(|k| periodic_interp(z, center(k, m))).collect()
    }
}

/// Trigonometric interpolant of samples at the centers `(j + 1/2)/n`, modes
/// below `n/2`.
pub fn trig_interpolant(values: &[f64]) -> FourierSeries {
    let n = values.len();
    let nf = n as f64;
    let mut out = FourierSeries::constant(values.iter().sum::<f64>() / nf);
    for mode in 1..n.div_ceil(2) {
        let (mut c, mut s) = (0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            let (sn, cs) = (TAU * mode as f64 * center(j, n)).sin_cos();
            c += v * cs;
            s += v * sn;
        }
        out.set_cos(mode, 2.0 * c / nf);
        out.set_sin(mode, 2.0 * s / nf);
    }
    out
}
