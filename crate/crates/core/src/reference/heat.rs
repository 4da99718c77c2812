//! Spectral solution of the heat equation for the density, the decoupled
//! case `lambda = 0`, `Z = 0`, no forcing.

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;

fn checked(rho0: &FourierSeries, j_cells: usize) -> Result<FourierSeries> {
    if j_cells < 2 {
        return Err(Error::config("J", "need at least 2 x-cells"));
    }
    if (rho0.mean - 1.0).abs() > 1e-12 {
        return Err(Error::InitialData(format!(
            "initial density must have unit mean, got {}",
            rho0.mean
        )));
    }
    let k = (j_cells / 2).saturating_sub(1);
    let rho = rho0.truncated(k);
    let min = rho.sampled_min(4096.max(64 * rho.max_mode()));
    if min <= 0.0 {
        return Err(Error::InitialData(format!(
            "initial density must be positive, minimum sample {min}"
        )));
    }
    Ok(rho)
}

/// `rho(t, x_j)` at the `J` cell centers, modes above `J/2 - 1` dropped.
pub fn heat_exact(rho0: &FourierSeries, t: f64, epsilon: f64, j_cells: usize) -> Result<Vec<f64>> {
    let rho = checked(rho0, j_cells)?.heat_flow(epsilon, t);
    Ok((0..j_cells)
        .map(|j| rho.eval((j as f64 + 0.5) / j_cells as f64))
        .collect())
}

/// Exact averages of `rho(t, .)` over the cells `[j/J, (j+1)/J)`.
pub fn heat_cell_averages(
    rho0: &FourierSeries,
    t: f64,
    epsilon: f64,
    j_cells: usize,
) -> Result<Vec<f64>> {
    let rho = checked(rho0, j_cells)?.heat_flow(epsilon, t);
    let dx = 1.0 / j_cells as f64;
    Ok((0..j_cells)
        .map(|j| rho.cell_average(j as f64 * dx, (j + 1) as f64 * dx))
        .collect())
}

/// Periodic part `w(t, .) = u(t, .) - x` of the exact pseudo-inverse. `u`
/// solves the same heat equation, so `w` keeps zero mean.
pub fn heat_pseudo_inverse(rho0: &FourierSeries, t: f64, epsilon: f64) -> Result<FourierSeries> {
    let rho = checked(rho0, 2 * (rho0.max_mode() + 1))?;
    Ok(rho.heat_flow(epsilon, t).antiderivative())
}
