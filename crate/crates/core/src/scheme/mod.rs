//! The transport-collapse time stepper.
//!
//! One step is a noisy linear predictor on `(xi, Z)` followed by a corrector
//! that rearranges `identity + xihat` in increasing order:
//!
//! ```text
//! xihat = (1 + h lambda) xi + h Z + sqrt(2 eps h) N(a/r)
//! Z'    = (1 - lambda h) Z + h (F(xi) - lambda^2 xi)
//! X'    = (identity + xihat)#
//! ```

mod diagnostics;
mod eulerian;

pub use diagnostics::{entropy_descent, theta_entropy, z_closed_form, EntropyTrace, Theta};
pub use eulerian::{reconstruct_eulerian, EulerianField};

use crate::config::{Anchor, SchemeConfig};
use crate::error::{Error, Result};
use crate::grid::{MonotoneMap, PeriodicProfile};
use crate::rearrange::{sort_periodic, MAX_DISPLACEMENT};

/// Scheme state at time `t`: positions `X = identity + xi` and the slaved
/// variable `Z = V - lambda xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    pub t: f64,
    pub x: MonotoneMap,
    z: PeriodicProfile,
}

impl LagrangianState {
    pub fn new(t: f64, x: MonotoneMap, z: PeriodicProfile) -> Result<Self> {
        x.xi().check_same_cells(&z)?;
        Ok(Self { t, x, z })
    }

    /// Rest state `xi = Z = 0` on `m` cells.
    pub fn rest(m: usize) -> Result<Self> {
        Self::new(0.0, MonotoneMap::identity(m)?, PeriodicProfile::zeros(m)?)
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.z.cells()
    }

    #[inline]
    pub fn xi(&self) -> &PeriodicProfile {
        self.x.xi()
    }

    #[inline]
    pub fn z(&self) -> &PeriodicProfile {
        &self.z
    }

    /// Lagrangian velocity `V = Z + lambda xi`.
    pub fn velocity(&self, lambda: f64) -> Vec<f64> {
        self.xi()
            .values()
            .iter()
            .zip(self.z.values())
            .map(|(x, z)| z + lambda * x)
            .collect()
    }

    /// Both fields shifted by `s` label cells.
    pub fn shifted(&self, s: i64) -> Self {
        Self {
            t: self.t,
            x: MonotoneMap::from_xi_unchecked(self.xi().shifted(s)),
            z: self.z.shifted(s),
        }
    }

    /// `max(||xi||_inf, ||Z||_inf)`.
    pub fn sup_norm(&self) -> f64 {
        self.xi().max_abs().max(self.z.max_abs())
    }

    fn all_finite(&self) -> bool {
        self.xi()
            .values()
            .iter()
            .chain(self.z.values())
            .all(|v| v.is_finite())
    }
}

/// Predictor output: `(xihat, Z_next)`.
pub fn predictor(
    state: &LagrangianState,
    cfg: &SchemeConfig,
    n: usize,
) -> Result<(PeriodicProfile, PeriodicProfile)> {
    let noise = cfg.noise.pattern(cfg.cells, n)?;
    check_cells(state, cfg)?;
    Ok(predict_with(state, cfg, &noise))
}

/// Predictor without the noise term, `(1 + h lambda) xi + h Z`, paired with
/// the `Z` update.
pub fn drift_predictor(state: &LagrangianState, cfg: &SchemeConfig) -> (Vec<f64>, Vec<f64>) {
    let (h, lam) = (cfg.h, cfg.lambda);
    let xi = state.xi().values();
    let z = state.z().values();
    let drift = xi
        .iter()
        .zip(z)
        .map(|(x, z)| (1.0 + h * lam) * x + h * z)
        .collect();
    let znext = xi
        .iter()
        .zip(z)
        .map(|(x, z)| (1.0 - lam * h) * z + h * (cfg.forcing.eval(*x) - lam * lam * x))
        .collect();
    (drift, znext)
}

fn predict_with(
    state: &LagrangianState,
    cfg: &SchemeConfig,
    noise: &[f64],
) -> (PeriodicProfile, PeriodicProfile) {
    let (h, lam) = (cfg.h, cfg.lambda);
    let amp = cfg.noise_amplitude();
    let xi = state.xi().values();
    let z = state.z().values();
    let mut xihat = Vec::with_capacity(xi.len());
    let mut znext = Vec::with_capacity(xi.len());
    for k in 0..xi.len() {
        xihat.push((1.0 + h * lam) * xi[k] + h * z[k] + amp * noise[k]);
        znext.push((1.0 - lam * h) * z[k] + h * (cfg.forcing.eval(xi[k]) - lam * lam * xi[k]));
    }
    (
        PeriodicProfile::from_vec_unchecked(xihat),
        PeriodicProfile::from_vec_unchecked(znext),
    )
}

/// Rearranges `identity + xihat` in increasing order.
pub fn corrector(xihat: &PeriodicProfile, anchor: Anchor) -> MonotoneMap {
    sort_periodic(xihat, anchor)
}

fn check_cells(state: &LagrangianState, cfg: &SchemeConfig) -> Result<()> {
    if state.cells() != cfg.cells {
        return Err(Error::config(
            "M",
            format!(
                "state has {} cells, configuration {}",
                state.cells(),
                cfg.cells
            ),
        ));
    }
    Ok(())
}

/// One predictor + corrector step from step index `n` to `n + 1`.
pub fn step(state: &LagrangianState, cfg: &SchemeConfig, n: usize) -> Result<LagrangianState> {
    let mut stepper = Stepper::new(cfg)?;
    check_cells(state, cfg)?;
    stepper.advance(state, n)
}

/// Caches the noise pattern of deterministic specs across steps.
struct Stepper<'a> {
    cfg: &'a SchemeConfig,
    fixed_noise: Option<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    fn new(cfg: &'a SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let fixed_noise = if cfg.noise.is_deterministic() {
            Some(cfg.noise.pattern(cfg.cells, 0)?)
        } else {
            None
        };
        Ok(Self { cfg, fixed_noise })
    }

    fn advance(&mut self, state: &LagrangianState, n: usize) -> Result<LagrangianState> {
        let fresh;
        let noise = match &self.fixed_noise {
            Some(v) => v.as_slice(),
            None => {
                fresh = self.cfg.noise.pattern(self.cfg.cells, n)?;
                fresh.as_slice()
            }
        };
        let (xihat, znext) = predict_with(state, self.cfg, noise);
        if let Some(k) = xihat
            .values()
            .iter()
            .chain(znext.values())
            .position(|v| !v.is_finite())
        {
            return Err(Error::NumericalAbort {
                step: n,
                reason: format!("non-finite predictor value (entry {k})"),
                snapshot: Box::new(state.clone()),
            });
        }
        if let Some(k) = xihat
            .values()
            .iter()
            .position(|v| v.abs() > MAX_DISPLACEMENT)
        {
            return Err(Error::NumericalAbort {
                step: n,
                reason: format!("displacement beyond the resolvable range (entry {k})"),
                snapshot: Box::new(state.clone()),
            });
        }
        let x = corrector(&xihat, self.cfg.anchor);
        let next = LagrangianState {
            t: (n + 1) as f64 * self.cfg.h,
            x,
            z: znext,
        };
        if !next.all_finite() {
            return Err(Error::NumericalAbort {
                step: n,
                reason: "non-finite corrector output".into(),
                snapshot: Box::new(state.clone()),
            });
        }
        Ok(next)
    }
}

/// Saved states of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: SchemeConfig,
    /// Step index of each saved state.
    pub steps: Vec<usize>,
    pub states: Vec<LagrangianState>,
}

impl Trajectory {
    pub fn initial(&self) -> &LagrangianState {
        &self.states[0]
    }

    pub fn last(&self) -> &LagrangianState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        self.last().t
    }

    /// Linear interpolation in time between saved states. The interpolant of
    /// two monotone maps is monotone.
    pub fn state_at(&self, t: f64) -> Result<LagrangianState> {
        let first = self.states[0].t;
        let last = self.final_time();
        let slack = 1e-9 * self.config.h;
        if t < first - slack || t > last + slack {
            return Err(Error::Horizon { t, available: last });
        }
        let i = self.states.partition_point(|s| s.t <= t);
        if i == 0 {
            return Ok(self.states[0].clone());
        }
        if i >= self.states.len() {
            return Ok(self.last().clone());
        }
        let (a, b) = (&self.states[i - 1], &self.states[i]);
        let w = (t - a.t) / (b.t - a.t);
        if w == 0.0 {
            return Ok(a.clone());
        }
        let mix = |p: &PeriodicProfile, q: &PeriodicProfile| {
            PeriodicProfile::from_vec_unchecked(
                p.values()
                    .iter()
                    .zip(q.values())
                    .map(|(x, y)| (1.0 - w) * x + w * y)
                    .collect(),
            )
        };
        Ok(LagrangianState {
            t,
            x: MonotoneMap::from_xi_unchecked(mix(a.xi(), b.xi())),
            z: mix(a.z(), b.z()),
        })
    }
}

/// Runs `ceil(T/h)` steps from `init`, keeping every `save_stride`-th state
/// and the final one.
pub fn run(cfg: &SchemeConfig, init: &LagrangianState) -> Result<Trajectory> {
    let mut stepper = Stepper::new(cfg)?;
    check_cells(init, cfg)?;
    let total = cfg.steps();
    let mut steps = vec![0];
    let mut states = vec![init.clone()];
    let mut current = init.clone();
    for n in 0..total {
        current = stepper.advance(&current, n)?;
        let done = n + 1;
        if done % cfg.save_stride == 0 || done == total {
            steps.push(done);
            states.push(current.clone());
        }
    }
    Ok(Trajectory {
        config: cfg.clone(),
        steps,
        states,
    })
}
