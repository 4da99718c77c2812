use super::LagrangianState;
use crate::rearrange::{pseudo_inverse, pushforward_flux, pushforward_histogram};

/// Density, velocity and pseudo-inverse on `J` x-cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerianField {
    /// Cell centers `(j + 1/2)/J`.
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    /// Cells with no parcel; their velocity is reported as 0.
    pub empty: Vec<bool>,
}

impl EulerianField {
    pub fn cells(&self) -> usize {
        self.x.len()
    }
}

/// Histogram density, mass-weighted parcel velocity `Z + lambda xi` and the
/// right-continuous inverse of `X`.
pub fn reconstruct_eulerian(state: &LagrangianState, lambda: f64, j_cells: usize) -> EulerianField {
    let rho_m = pushforward_histogram(&state.x, j_cells);
    let q = pushforward_flux(state, lambda, j_cells);
    let empty: Vec<bool> = rho_m.mass.iter().map(|m| *m == 0.0).collect();
    let v = rho_m
        .mass
        .iter()
        .zip(&q.mass)
        .map(|(m, q)| if *m == 0.0 { 0.0 } else { q / m })
        .collect();
    EulerianField {
        x: (0..j_cells)
            .map(|j| (j as f64 + 0.5) / j_cells as f64)
            .collect(),
        rho: rho_m.density(),
        v,
        u: pseudo_inverse(&state.x, j_cells),
        empty,
    }
}
