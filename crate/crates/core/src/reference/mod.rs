//! Independent oracles for the scheme: the spectral heat solution, a
//! finite-difference solver for the pseudo-inverse formulation, and a
//! residual evaluator for the material system.

mod heat;
pub mod parabolic;
mod residual;
pub mod tridiag;

pub use heat::{heat_cell_averages, heat_exact, heat_pseudo_inverse};
pub use parabolic::{solve_coupled_parabolic, ParabolicConfig, ReferenceSolution};
pub use residual::{material_residual, MaterialLevel, ResidualNorms};
