use crate::error::{Error, Result};
use crate::fourier::{invert_shifted_identity, FourierSeries};
use crate::grid::{cell_center, Norm};
use crate::rearrange::{pseudo_inverse, pushforward_histogram};
use crate::reference::{heat_cell_averages, heat_pseudo_inverse, ReferenceSolution};
use crate::scheme::{LagrangianState, Trajectory};

/// L1, L2 and L-infinity norms (grid-averaged) of one error field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormSet {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl NormSet {
    pub fn of_diff(a: &[f64], b: &[f64]) -> Self {
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self {
            l1: Norm::L1.of_slice(&d),
            l2: Norm::L2.of_slice(&d),
            linf: Norm::LInf.of_slice(&d),
        }
    }

    pub fn get(&self, q: Norm) -> f64 {
        match q {
            Norm::L1 => self.l1,
            Norm::L2 => self.l2,
            Norm::LInf => self.linf,
        }
    }
}

/// Errors of a scheme state against a target at one time: `rho` and `u` on
/// a common x-grid, `xi` and `Z` on the scheme's label grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub rho: NormSet,
    pub u: NormSet,
    pub xi: NormSet,
    pub z: NormSet,
}

/// What a trajectory is compared against.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// Spectral heat solution from `rho0` (the scheme must use
    /// `lambda = 0`, `Z0 = 0`, no forcing).
    Heat {
        rho0: &'a FourierSeries,
        epsilon: f64,
    },
    /// Finite-difference solution of the pseudo-inverse formulation.
    Coupled(&'a ReferenceSolution),
    /// Another scheme trajectory.
    Scheme(&'a Trajectory),
}

struct Fields {
    rho: Vec<f64>,
    u: Vec<f64>,
    xi: Vec<f64>,
    z: Vec<f64>,
}

fn scheme_fields(state: &LagrangianState, j_cells: usize, m: usize) -> Fields {
    let own = state.cells();
    let sample = |p: &crate::grid::PeriodicProfile| -> Vec<f64> {
        if own == m {
            p.values().to_vec()
        } else {
            (0..m).map(|k| p.eval(cell_center(k, m))).collect()
        }
    };
    Fields {
        rho: pushforward_histogram(&state.x, j_cells).density(),
        u: pseudo_inverse(&state.x, j_cells),
        xi: sample(state.xi()),
        z: sample(state.z()),
    }
}

fn target_fields(target: &Target<'_>, t: f64, j_cells: usize, m: usize) -> Result<Fields> {
    match *target {
        Target::Heat { rho0, epsilon } => {
            let rho = heat_cell_averages(rho0, t, epsilon, j_cells)?;
            let w = heat_pseudo_inverse(rho0, t, epsilon)?;
            let dw = w.derivative();
            let u = (0..j_cells)
                .map(|j| {
                    let x = cell_center(j, j_cells);
                    x + w.eval(x)
                })
                .collect();
            let xi = (0..m)
                .map(|k| {
                    let a = cell_center(k, m);
                    invert_shifted_identity(&w, &dw, a) - a
                })
                .collect();
            Ok(Fields {
                rho,
                u,
                xi,
                z: vec![0.0; m],
            })
        }
        Target::Coupled(sol) => {
            let (xi, z) = sol.material_on(t, m)?;
            Ok(Fields {
                rho: sol.density_on(t, j_cells)?,
                u: sol.u_on(t, j_cells)?,
                xi,
                z,
            })
        }
        Target::Scheme(other) => Ok(scheme_fields(&other.state_at(t)?, j_cells, m)),
    }
}

/// Errors of `traj` (linearly interpolated in time) against `target` at `t`,
/// densities and pseudo-inverses on `j_cells` x-cells.
pub fn compare_to_reference(
    traj: &Trajectory,
    target: &Target<'_>,
    t: f64,
    j_cells: usize,
) -> Result<ErrorRecord> {
    if j_cells < 2 {
        return Err(Error::config("J", "need at least 2 comparison cells"));
    }
    let state = traj.state_at(t)?;
    let m = state.cells();
    let s = scheme_fields(&state, j_cells, m);
    let r = target_fields(target, t, j_cells, m)?;
    Ok(ErrorRecord {
        t,
        rho: NormSet::of_diff(&s.rho, &r.rho),
        u: NormSet::of_diff(&s.u, &r.u),
        xi: NormSet::of_diff(&s.xi, &r.xi),
        z: NormSet::of_diff(&s.z, &r.z),
    })
}
