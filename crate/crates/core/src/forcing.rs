//! Self-consistent forcing `F(xi)` entering the `Z` update.

use crate::error::{Error, Result};

/// Piecewise-linear forcing through `(y, F(y))` nodes, extended linearly
/// beyond the end nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTable {
    nodes: Vec<(f64, f64)>,
    lipschitz: f64,
}

impl ForcingTable {
    pub fn new(mut nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::config(
                "forcing",
                "tabulated forcing needs at least 2 nodes",
            ));
        }
        if nodes.iter().any(|(y, f)| !y.is_finite() || !f.is_finite()) {
            return Err(Error::config("forcing", "non-finite forcing node"));
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::config(
                "forcing",
                "duplicate abscissa in forcing table",
            ));
        }
        let lipschitz = nodes
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        let table = Self { nodes, lipschitz };
        if table.eval(0.0).abs() > 1e-12 {
            return Err(Error::config(
                "forcing",
                "tabulated forcing must satisfy F(0) = 0",
            ));
        }
        Ok(table)
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn eval(&self, y: f64) -> f64 {
        let n = &self.nodes;
        let i = n.partition_point(|(x, _)| *x <= y).clamp(1, n.len() - 1);
        let (x0, f0) = n[i - 1];
        let (x1, f1) = n[i];
        f0 + (f1 - f0) * (y - x0) / (x1 - x0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum ForcingSpec {
    #[default]
    None,
    /// `F(y) = y / beta`: gravitational (`beta > 0`) or electrostatic
    /// (`beta < 0`) self-interaction.
    Poisson {
        beta: f64,
    },
    Tabulated(ForcingTable),
}

impl ForcingSpec {
    pub fn poisson(beta: f64) -> Result<Self> {
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::config(
                "beta",
                "Poisson forcing needs a finite nonzero beta",
            ));
        }
        Ok(ForcingSpec::Poisson { beta })
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            ForcingSpec::None => 0.0,
            ForcingSpec::Poisson { beta } => y / beta,
            ForcingSpec::Tabulated(t) => t.eval(y),
        }
    }

    /// Lipschitz constant `l_F`.
    pub fn lipschitz(&self) -> f64 {
        match self {
            ForcingSpec::None => 0.0,
            ForcingSpec::Poisson { beta } => 1.0 / beta.abs(),
            ForcingSpec::Tabulated(t) => t.lipschitz,
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ForcingSpec::None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_slopes(f: &ForcingSpec) -> f64 {
        let ys: Vec<f64> = (0..=400).map(|i| -2.0 + i as f64 * 0.01).collect();
        ys.windows(2)
            .map(|w| ((f.eval(w[1]) - f.eval(w[0])) / (w[1] - w[0])).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn poisson_forcing() {
        let f = ForcingSpec::poisson(2.0).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(1.0), 0.5);
        assert_eq!(f.lipschitz(), 0.5);
        assert!(f.lipschitz() >= sample_slopes(&f) - 1e-12);
        assert!(ForcingSpec::poisson(0.0).is_err());
    }

    #[test]
    fn tabulated_forcing() {
        let t = ForcingTable::new(vec![(-1.0, 0.5), (0.0, 0.0), (0.5, -1.0), (1.0, -1.0)]).unwrap();
        let f = ForcingSpec::Tabulated(t);
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(0.25), -0.5);
        assert_eq!(f.eval(-2.0), 1.0);
        assert_eq!(f.lipschitz(), 2.0);
        assert!(f.lipschitz() >= sample_slopes(&f) - 1e-12);
    }

    #[test]
    fn tabulated_forcing_requires_zero_at_origin() {
        assert!(ForcingTable::new(vec![(-1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ForcingTable::new(vec![(0.0, 0.0)]).is_err());
        assert!(ForcingTable::new(vec![(0.0, 0.0), (0.0, 1.0)]).is_err());
    }
}
