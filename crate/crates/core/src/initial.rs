//! Sampling smooth initial data onto the label grid.

use crate::error::{Error, Result};
use crate::fourier::{invert_shifted_identity, FourierSeries};
use crate::grid::{cell_center, MonotoneMap, PeriodicProfile};
use crate::scheme::LagrangianState;

/// Second initial field: either `Z0` directly or the Lagrangian velocity
/// `V0`, converted through `Z0 = V0 - lambda xi0`.
#[derive(Clone, Copy)]
pub enum Velocity<'a> {
    Z(&'a dyn Fn(f64) -> f64),
    V(&'a dyn Fn(f64) -> f64),
}

/// Samples `xi0` and `Z0` (or `V0`) at the cell centers `a_k = (k + 1/2)/M`.
///
/// The staircase `X_k = a_k + xi0(a_k)` must be strictly increasing,
/// including across the periodic seam.
pub fn sample_initial_data(
    xi0: &dyn Fn(f64) -> f64,
    velocity: Velocity<'_>,
    m: usize,
    lambda: f64,
) -> Result<LagrangianState> {
    if m < 2 {
        return Err(Error::InitialData(format!(
            "need at least 2 cells, got {m}"
        )));
    }
    let xi: Vec<f64> = (0..m).map(|k| xi0(cell_center(k, m))).collect();
    let z: Vec<f64> = match velocity {
        Velocity::Z(f) => (0..m).map(|k| f(cell_center(k, m))).collect(),
        Velocity::V(f) => (0..m)
            .map(|k| f(cell_center(k, m)) - lambda * xi[k])
            .collect(),
    };
    let xi = PeriodicProfile::new(xi).map_err(|e| Error::InitialData(e.to_string()))?;
    let z = PeriodicProfile::new(z).map_err(|e| Error::InitialData(e.to_string()))?;
    let map = MonotoneMap::from_xi_unchecked(xi);
    let m_i = m as i64;
    if let Some(k) = (0..m_i).find(|&k| map.position(k + 1) <= map.position(k)) {
        return Err(Error::InitialData(format!(
            "sampled X0 is not strictly increasing between cells {k} and {}",
            k + 1
        )));
    }
    LagrangianState::new(0.0, map, z)
}

/// `xi0(a) = X0(a) - a` where `X0` inverts `u0(x) = x + w(x)`.
pub fn xi_from_pseudo_inverse(w: &FourierSeries) -> Result<impl Fn(f64) -> f64> {
    let dw = w.derivative();
    let min_slope = 1.0 + dw.sampled_min(4096.max(64 * w.max_mode()));
    if min_slope <= 0.0 {
        return Err(Error::InitialData(format!(
            "u0 = x + w(x) is not increasing (min slope {min_slope})"
        )));
    }
    let w = w.clone();
    Ok(move |a: f64| invert_shifted_identity(&w, &dw, a) - a)
}

/// Periodic part `w = u0 - x` of the cumulative distribution of a density
/// with unit mean.
pub fn pseudo_inverse_from_density(rho: &FourierSeries) -> Result<FourierSeries> {
    if (rho.mean - 1.0).abs() > 1e-12 {
        return Err(Error::InitialData(format!(
            "density must have unit mean, got {}",
            rho.mean
        )));
    }
    let min = rho.sampled_min(4096.max(64 * rho.max_mode()));
    if min <= 0.0 {
        return Err(Error::InitialData(format!(
            "density must be positive, minimum sample {min}"
        )));
    }
    Ok(rho.antiderivative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::TAU;

    #[test]
    fn rest_state() {
        let zero = |_: f64| 0.0;
        let s = sample_initial_data(&zero, Velocity::Z(&zero), 4, 1.0).unwrap();
        assert_eq!(s.xi().values(), &[0.0; 4]);
        assert_eq!(s.z().values(), &[0.0; 4]);
        assert_eq!(s.t, 0.0);
    }

    #[test]
    fn velocity_is_converted_to_z() {
        let xi0 = |a: f64| 0.1 * (TAU * a).sin();
        let v0 = |_: f64| 0.0;
        let s = sample_initial_data(&xi0, Velocity::V(&v0), 16, 2.0).unwrap();
        for k in 0..16 {
            let a = cell_center(k, 16);
            assert_abs_diff_eq!(s.z().values()[k], -0.2 * (TAU * a).sin(), epsilon = 1e-15);
        }
    }

    #[test]
    fn non_monotone_data_is_rejected() {
        let xi0 = |a: f64| (2.0 * a).rem_euclid(1.0);
        let zero = |_: f64| 0.0;
        assert!(matches!(
            sample_initial_data(&xi0, Velocity::Z(&zero), 8, 0.0),
            Err(Error::InitialData(_))
        ));
        let steep = |a: f64| 0.5 * (TAU * a).sin();
        assert!(sample_initial_data(&steep, Velocity::Z(&zero), 64, 0.0).is_err());
    }

    #[test]
    fn center_sampling_is_second_order() {
        // Cell-center values against exact cell averages of 0.1 sin 2 pi a.
        let f = FourierSeries::sin_mode(1, 0.1);
        let err = |m: usize| {
            let zero = |_: f64| 0.0;
            let xi0 = |a: f64| f.eval(a);
            let s = sample_initial_data(&xi0, Velocity::Z(&zero), m, 0.0).unwrap();
            (0..m)
                .map(|k| {
                    let lo = k as f64 / m as f64;
                    (s.xi().values()[k] - f.cell_average(lo, lo + 1.0 / m as f64)).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn density_to_labels() {
        let rho = FourierSeries::constant(1.0).plus(&FourierSeries::cos_mode(1, 0.5));
        let w = pseudo_inverse_from_density(&rho).unwrap();
        let xi0 = xi_from_pseudo_inverse(&w).unwrap();
        for i in 0..20 {
            let a = i as f64 / 20.0;
            let x = a + xi0(a);
            assert_abs_diff_eq!(x + w.eval(x), a, epsilon = 1e-13);
        }
        let bad = FourierSeries::constant(1.0).plus(&FourierSeries::cos_mode(1, 1.5));
        assert!(pseudo_inverse_from_density(&bad).is_err());
    }
}
