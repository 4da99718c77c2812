//! Fixtures shared by the benchmarks.

use std::f64::consts::TAU;

use tcollapse::{sample_initial_data, LagrangianState, PeriodicProfile, SchemeConfig, Velocity};

/// Smooth initial data on `m` cells.
pub fn smooth_state(m: usize) -> LagrangianState {
    let xi0 = |a: f64| 0.1 * (TAU * a).sin();
    let z0 = |a: f64| 0.1 * (TAU * a).cos();
    sample_initial_data(&xi0, Velocity::Z(&z0), m, 1.0).expect("monotone data")
}

/// Economy-grid configuration (`M = 2L`) with `steps` steps of size `h`.
pub fn economy(m: usize, h: f64, steps: usize) -> SchemeConfig {
    SchemeConfig::economy(h, 0.05, 1.0, m / 2, steps as f64 * h).expect("valid config")
}

/// A predictor output with every other parcel pushed `shift` cells away,
/// so the corrector has to sort.
pub fn scrambled(m: usize, shift: f64) -> PeriodicProfile {
    let d = shift / m as f64;
    PeriodicProfile::from_fn(m, |k| if k % 2 == 0 { d } else { -d }).expect("finite")
}
