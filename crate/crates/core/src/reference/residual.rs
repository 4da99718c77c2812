//! Pointwise residual of the material system
//!
//! ```text
//! xi_t + eps (1 / X_a)_a - Z - lambda xi = 0
//! Z_t + lambda Z + lambda^2 xi - F(xi)   = 0
//! ```
//!
//! evaluated by centered differences on three equally spaced time levels.

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;

/// One time level of `(xi, Z)` on `M` label centers.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLevel {
    pub xi: Vec<f64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub xi_l1: f64,
    pub xi_linf: f64,
    pub z_l1: f64,
    pub z_linf: f64,
}

/// Residual at the middle level of `levels`, spaced `dt` apart.
pub fn material_residual(
    levels: [&MaterialLevel; 3],
    dt: f64,
    epsilon: f64,
    lambda: f64,
    forcing: &ForcingSpec,
) -> Result<ResidualNorms> {
    let m = levels[1].xi.len();
    if m < 2 || levels.iter().any(|l| l.xi.len() != m || l.z.len() != m) {
        return Err(Error::Profile(
            "residual levels must share one grid of >= 2 cells".into(),
        ));
    }
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::config("dt", "time spacing must be positive"));
    }
    let mf = m as f64;
    let mid = levels[1];
    // Slope of X on the face between k and k + 1.
    let slope: Vec<f64> = (0..m)
        .map(|k| 1.0 + mf * (mid.xi[(k + 1) % m] - mid.xi[k]))
        .collect();
    if let Some(k) = slope.iter().position(|s| *s <= 0.0) {
        return Err(Error::InitialData(format!(
            "X is not strictly increasing between cells {k} and {}",
            (k + 1) % m
        )));
    }
    let mut out = ResidualNorms {
        xi_l1: 0.0,
        xi_linf: 0.0,
        z_l1: 0.0,
        z_linf: 0.0,
    };
    for k in 0..m {
        let left = slope[(k + m - 1) % m];
        let visc = mf * (1.0 / slope[k] - 1.0 / left);
        let (xi, z) = (mid.xi[k], mid.z[k]);
        let dxi = (levels[2].xi[k] - levels[0].xi[k]) / (2.0 * dt);
        let dz = (levels[2].z[k] - levels[0].z[k]) / (2.0 * dt);
        let r1 = (dxi + epsilon * visc - z - lambda * xi).abs();
        let r2 = (dz + lambda * z + lambda * lambda * xi - forcing.eval(xi)).abs();
        out.xi_l1 += r1 / mf;
        out.z_l1 += r2 / mf;
        out.xi_linf = out.xi_linf.max(r1);
        out.z_linf = out.z_linf.max(r2);
    }
    Ok(out)
}
