//! Monotone-rearrangement (transport-collapse) scheme for the periodic 1D
//! isothermal Navier-Stokes and Navier-Stokes-Poisson systems in material
//! coordinates, with reference solvers and an analysis harness.

pub mod analysis;
pub mod config;
pub mod error;
pub mod forcing;
pub mod fourier;
pub mod grid;
pub mod initial;
pub mod noise;
pub mod rearrange;
pub mod reference;
pub mod scheme;

pub use config::{nearest_compliant_cells, Anchor, SchemeConfig};
pub use error::{Error, Result};
pub use forcing::{ForcingSpec, ForcingTable};
pub use fourier::FourierSeries;
pub use grid::{lq_norm, modulus_of_continuity, MonotoneMap, Norm, PeriodicProfile};
pub use initial::{sample_initial_data, Velocity};
pub use noise::{noise_value, NoiseKind, NoiseSpec};
pub use rearrange::{
    pseudo_inverse, pushforward_flux, pushforward_histogram, residue_multiset_equal, sort_periodic,
    CellMeasure, SortedWindow,
};
pub use scheme::{
    corrector, predictor, reconstruct_eulerian, run, step, EulerianField, LagrangianState,
    Trajectory,
};
