use super::{LagrangianState, Trajectory};
use crate::error::{Error, Result};
use crate::grid::PeriodicProfile;

/// Convex integrand of the entropy functional, in terms of the specific
/// volume `tau = dX/da`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    /// `-log tau`
    NegLog,
    /// `tau (log tau - 1)`
    TauLogTau,
}

impl Theta {
    pub fn eval(self, tau: f64) -> f64 {
        match self {
            Theta::NegLog if tau <= 0.0 => f64::INFINITY,
            Theta::NegLog => -tau.ln(),
            Theta::TauLogTau if tau <= 0.0 => 0.0,
            Theta::TauLogTau => tau * (tau.ln() - 1.0),
        }
    }
}

/// `(1/M) sum_k theta(M (X_{k+1} - X_k))` over one period, gaps wrapping with
/// the `+1` lift. Flat gaps give `+inf` for `NegLog`.
pub fn theta_entropy(state: &LagrangianState, theta: Theta) -> f64 {
    let m = state.cells();
    let mf = m as f64;
    let mut total = 0.0;
    for k in 0..m as i64 {
        let gap = state.x.position(k + 1) - state.x.position(k);
        total += theta.eval(mf * gap);
    }
    total / mf
}

/// Entropy sequence of a trajectory and its worst single-step increase.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyTrace {
    pub values: Vec<f64>,
    pub max_increase: f64,
}

pub fn entropy_descent(traj: &Trajectory, theta: Theta) -> EntropyTrace {
    let values: Vec<f64> = traj
        .states
        .iter()
        .map(|s| theta_entropy(s, theta))
        .collect();
    let max_increase = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| !d.is_nan())
        .fold(f64::NEG_INFINITY, f64::max);
    EntropyTrace {
        values,
        max_increase,
    }
}

/// `Z_n` as the discrete convolution
/// `(1 - lambda h)^n Z_0 + h sum_{m<n} (1 - lambda h)^{n-1-m} (F(xi_m) - lambda^2 xi_m)`.
pub fn z_closed_form(traj: &Trajectory, n: usize) -> Result<PeriodicProfile> {
    let cfg = &traj.config;
    if cfg.save_stride != 1 {
        return Err(Error::Unsupported(format!(
            "closed-form Z needs every step recorded, save_stride is {}",
            cfg.save_stride
        )));
    }
    if n >= traj.states.len() {
        return Err(Error::Horizon {
            t: n as f64 * cfg.h,
            available: traj.final_time(),
        });
    }
    let (h, lam) = (cfg.h, cfg.lambda);
    let decay = 1.0 - lam * h;
    let m = traj.initial().cells();
    let z0 = traj.initial().z().values();
    let mut out: Vec<f64> = z0.iter().map(|z| decay.powi(n as i32) * z).collect();
    for (mi, s) in traj.states[..n].iter().enumerate() {
        let w = h * decay.powi((n - 1 - mi) as i32);
        let xi = s.xi().values();
        for k in 0..m {
            out[k] += w * (cfg.forcing.eval(xi[k]) - lam * lam * xi[k]);
        }
    }
    Ok(PeriodicProfile::from_vec_unchecked(out))
}
