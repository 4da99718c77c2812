use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::config::SchemeConfig;
use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::grid::{lq_norm, modulus_of_continuity, Norm, PeriodicProfile};
use crate::noise::NoiseSpec;
use crate::scheme::{drift_predictor, run, LagrangianState, Trajectory};

fn require_every_step(traj: &Trajectory) -> Result<()> {
    if traj.config.save_stride != 1 {
        return Err(Error::Unsupported(format!(
            "probe needs every step recorded, save_stride is {}",
            traj.config.save_stride
        )));
    }
    Ok(())
}

/// `||xi_a - xi_b||_q + ||Z_a - Z_b||_q`.
pub fn pair_distance(a: &LagrangianState, b: &LagrangianState, q: Norm) -> Result<f64> {
    Ok(lq_norm(&a.xi().sub(b.xi())?, q) + lq_norm(&a.z().sub(b.z())?, q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `sup_t ||Delta(t)||_q / ||Delta(0)||_q`.
    pub ratio: f64,
    /// Identical initial data: the ratio is reported as 0.
    pub degenerate: bool,
    /// `||Delta||_q` at every saved time.
    pub distances: Vec<f64>,
}

/// Runs both initial states with `cfg` and reports the worst growth of their
/// distance.
pub fn stability_probe(
    cfg: &SchemeConfig,
    a: &LagrangianState,
    b: &LagrangianState,
    q: Norm,
) -> Result<StabilityReport> {
    let d0 = pair_distance(a, b, q)?;
    if d0 == 0.0 {
        return Ok(StabilityReport {
            ratio: 0.0,
            degenerate: true,
            distances: vec![0.0],
        });
    }
    let (ta, tb) = rayon::join(|| run(cfg, a), || run(cfg, b));
    let (ta, tb) = (ta?, tb?);
    let distances = ta
        .states
        .iter()
        .zip(&tb.states)
        .map(|(x, y)| pair_distance(x, y, q))
        .collect::<Result<Vec<_>>>()?;
    let worst = distances.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        ratio: worst / d0,
        degenerate: false,
        distances,
    })
}

/// The stability ratio for each viscosity in `epsilons`, other parameters
/// from `cfg`.
pub fn stability_table(
    cfg: &SchemeConfig,
    a: &LagrangianState,
    b: &LagrangianState,
    q: Norm,
    epsilons: &[f64],
) -> Result<Vec<(f64, StabilityReport)>> {
    epsilons
        .par_iter()
        .map(|&eps| {
            let c = cfg.clone().with_epsilon(eps);
            Ok((eps, stability_probe(&c, a, b, q)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupnormReport {
    pub growth_constant: f64,
    /// `||(xi_n, Z_n)||_inf` per step.
    pub norms: Vec<f64>,
    /// Predictor-part amplification `||(xihat - noise, Z_{n+1})|| / ||(xi_n, Z_n)||`
    /// per step (1 when the state is zero).
    pub amplification: Vec<f64>,
    /// `||(xi_0, Z_0)||_inf exp(c* n h)`.
    pub envelope: Vec<f64>,
}

impl SupnormReport {
    /// Largest `amplification - (1 + c* h)`, non-positive when the per-step
    /// bound holds.
    pub fn worst_amplification_excess(&self, h: f64) -> f64 {
        let bound = 1.0 + self.growth_constant * h;
        self.amplification
            .iter()
            .map(|a| a - bound)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    /// `max_n norm_n / envelope_n` (0 when the envelope vanishes with the
    /// norm).
    pub fn envelope_ratio(&self) -> f64 {
        self.norms
            .iter()
            .zip(&self.envelope)
            .map(|(n, e)| if *n == 0.0 { 0.0 } else { n / e })
            .fold(0.0, f64::max)
    }
}

pub fn supnorm_probe(traj: &Trajectory) -> Result<SupnormReport> {
    require_every_step(traj)?;
    let cfg = &traj.config;
    let c = cfg.growth_constant();
    let norms: Vec<f64> = traj.states.iter().map(|s| s.sup_norm()).collect();
    let amplification = traj
        .states
        .iter()
        .take(traj.states.len().saturating_sub(1))
        .map(|s| {
            let (drift, znext) = drift_predictor(s, cfg);
            let num = drift
                .iter()
                .chain(&znext)
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let den = s.sup_norm();
            if den == 0.0 {
                1.0
            } else {
                num / den
            }
        })
        .collect();
    let envelope = traj
        .steps
        .iter()
        .map(|&n| norms[0] * (c * n as f64 * cfg.h).exp())
        .collect();
    Ok(SupnormReport {
        growth_constant: c,
        norms,
        amplification,
        envelope,
    })
}

/// Discrete Lipschitz constant `M max_k |p_{k+1} - p_k|` of a profile.
pub fn discrete_lipschitz(p: &PeriodicProfile) -> f64 {
    let m = p.cells();
    let v = p.values();
    (0..m)
        .map(|k| (v[(k + 1) % m] - v[k]).abs())
        .fold(0.0, f64::max)
        * m as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusRow {
    pub step: usize,
    pub t: f64,
    pub omega: f64,
    /// `max` of the moduli of `xi_n` and `Z_n`.
    pub modulus: f64,
    pub envelope: f64,
}

/// Moduli of continuity of `(xi_n, Z_n)` against
/// `(|omega| + r) Lip(xi_0, Z_0) exp(c* n h)`.
pub fn lipschitz_probe(traj: &Trajectory, omegas: &[f64], r: f64) -> Vec<ModulusRow> {
    let cfg = &traj.config;
    let c = cfg.growth_constant();
    let init = traj.initial();
    let lip = discrete_lipschitz(init.xi()).max(discrete_lipschitz(init.z()));
    let mut rows = Vec::with_capacity(traj.states.len() * omegas.len());
    for (s, &n) in traj.states.iter().zip(&traj.steps) {
        for &w in omegas {
            let modulus = if w == 0.0 {
                0.0
            } else {
                modulus_of_continuity(s.xi(), w).max(modulus_of_continuity(s.z(), w))
            };
            rows.push(ModulusRow {
                step: n,
                t: s.t,
                omega: w,
                modulus,
                envelope: (w.abs() + r) * lip * (c * n as f64 * cfg.h).exp(),
            });
        }
    }
    rows
}

/// Trigonometric test functions for the weak form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    Cos1,
    Sin1,
    Cos2,
}

impl TestFunction {
    pub const ALL: [TestFunction; 3] = [TestFunction::Cos1, TestFunction::Sin1, TestFunction::Cos2];

    pub fn label(self) -> &'static str {
        match self {
            TestFunction::Cos1 => "cos(2 pi x)",
            TestFunction::Sin1 => "sin(2 pi x)",
            TestFunction::Cos2 => "cos(4 pi x)",
        }
    }

    /// `(G, G', G'')` at `x`.
    pub fn eval(self, x: f64) -> (f64, f64, f64) {
        let (k, phase_sin) = match self {
            TestFunction::Cos1 => (TAU, false),
            TestFunction::Sin1 => (TAU, true),
            TestFunction::Cos2 => (2.0 * TAU, false),
        };
        let (s, c) = (k * x).sin_cos();
        if phase_sin {
            (s, k * c, -k * k * s)
        } else {
            (c, -k * s, -k * k * c)
        }
    }
}

/// `d_n(G)` for every step of the trajectory.
pub fn weak_residuals(traj: &Trajectory, g: TestFunction) -> Result<Vec<f64>> {
    require_every_step(traj)?;
    let cfg = &traj.config;
    let (h, lam, eps) = (cfg.h, cfg.lambda, cfg.epsilon);
    Ok(traj
        .states
        .windows(2)
        .map(|w| {
            let (now, next) = (&w[0], &w[1]);
            let m = now.cells() as f64;
            let xi = now.xi().values();
            let z = now.z().values();
            let before = now.x.positions();
            let after = next.x.positions();
            let mut diff = 0.0;
            let mut rhs = 0.0;
            for k in 0..before.len() {
                let (g0, g1, g2) = g.eval(before[k]);
                diff += g.eval(after[k]).0 - g0;
                rhs += g1 * (lam * xi[k] + z[k]) + eps * g2;
            }
            diff / (h * m) - rhs / m
        })
        .collect())
}

/// `max_n |d_n(G)|` for each test function.
pub fn weak_consistency_residual(
    traj: &Trajectory,
    gs: &[TestFunction],
) -> Result<Vec<(TestFunction, f64)>> {
    gs.iter()
        .map(|&g| {
            let d = weak_residuals(traj, g)?;
            Ok((g, d.iter().fold(0.0f64, |m, v| m.max(v.abs()))))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    /// Every `xi_n` bit-wise zero.
    pub exact: bool,
    pub max_drift: f64,
    /// `sqrt(2 eps h) M` is an integer to 1e-12.
    pub integral_amplitude: bool,
    pub amplitude_in_cells: f64,
    /// `(n, ||xi_n||_inf)` for every step.
    pub drift: Vec<(usize, f64)>,
}

/// Runs binary noise (`L = M/2`, no forcing, `lambda = 0`) from rest.
pub fn fixed_point_check(epsilon: f64, h: f64, m: usize, steps: usize) -> Result<FixedPointReport> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::config(
            "M",
            "fixed-point check needs an even cell count",
        ));
    }
    let cfg = SchemeConfig {
        h,
        epsilon,
        lambda: 0.0,
        cells: m,
        noise: NoiseSpec::binary(m / 2)?,
        forcing: ForcingSpec::None,
        anchor: Default::default(),
        horizon: steps as f64 * h,
        save_stride: 1,
    };
    cfg.validate()?;
    let traj = run(&cfg, &LagrangianState::rest(m)?)?;
    let drift: Vec<(usize, f64)> = traj
        .steps
        .iter()
        .zip(&traj.states)
        .map(|(&n, s)| (n, s.xi().max_abs().max(s.z().max_abs())))
        .collect();
    let exact = traj.states.iter().all(|s| {
        s.xi()
            .values()
            .iter()
            .chain(s.z().values())
            .all(|v| v.to_bits() == 0)
    });
    Ok(FixedPointReport {
        exact,
        max_drift: drift.iter().map(|d| d.1).fold(0.0, f64::max),
        integral_amplitude: cfg.integral_amplitude(),
        amplitude_in_cells: cfg.amplitude_in_cells(),
        drift,
    })
}
