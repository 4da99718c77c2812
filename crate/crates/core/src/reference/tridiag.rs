//! Periodic (cyclic) tridiagonal systems
//! `lower_i x_{i-1} + diag_i x_i + upper_i x_{i+1} = rhs_i`, indices mod n.

/// Factorization reused across solves with the same matrix
/// (Thomas algorithm plus a Sherman-Morrison correction for the corners).
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    lower: Vec<f64>,
    upper: Vec<f64>,
    // Modified forward-sweep pivots of the non-cyclic part.
    pivot: Vec<f64>,
    gamma: f64,
    corner: f64,
    correction: Vec<f64>,
    denom: f64,
}

impl CyclicTridiagonal {
    /// Panics if `n < 3` or the slices differ in length.
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Self {
        let n = diag.len();
        assert!(n >= 3, "cyclic tridiagonal system needs n >= 3");
        assert!(lower.len() == n && upper.len() == n);
        let gamma = -diag[0];
        let corner = lower[0];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= corner * upper[n - 1] / gamma;
        let mut pivot = vec![0.0; n];
        pivot[0] = d[0];
        for i in 1..n {
            pivot[i] = d[i] - lower[i] * upper[i - 1] / pivot[i - 1];
        }
        let mut me = Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            pivot,
            gamma,
            corner,
            correction: Vec::new(),
            denom: 0.0,
        };
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = upper[n - 1];
        me.thomas(&mut u);
        me.denom = 1.0 + u[0] + corner / gamma * u[n - 1];
        me.correction = u;
        me
    }

    /// Constant-coefficient system.
    pub fn constant(n: usize, lower: f64, diag: f64, upper: f64) -> Self {
        Self::new(&vec![lower; n], &vec![diag; n], &vec![upper; n])
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    fn thomas(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 1..n {
            x[i] -= self.lower[i] / self.pivot[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.pivot[i];
        }
    }

    /// Solves in place; `rhs` becomes the solution.
    pub fn solve(&self, rhs: &mut [f64]) {
        assert_eq!(rhs.len(), self.len());
        let n = rhs.len();
        self.thomas(rhs);
        let dot = rhs[0] + self.corner / self.gamma * rhs[n - 1];
        let f = dot / self.denom;
        for (x, q) in rhs.iter_mut().zip(&self.correction) {
            *x -= f * q;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| lower[i] * x[(i + n - 1) % n] + diag[i] * x[i] + upper[i] * x[(i + 1) % n])
            .collect()
    }

    #[test]
    fn periodic_laplacian_step() {
        let n = 16;
        let nu = 0.7;
        let sys = CyclicTridiagonal::constant(n, -nu, 1.0 + 2.0 * nu, -nu);
        let x: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let mut b = apply(&vec![-nu; n], &vec![1.0 + 2.0 * nu; n], &vec![-nu; n], &x);
        sys.solve(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn diagonally_dominant_systems(
            n in 3usize..40,
            seed in proptest::collection::vec(-1.0f64..1.0, 160),
        ) {
            let lower: Vec<f64> = seed[..n].to_vec();
            let upper: Vec<f64> = seed[40..40 + n].to_vec();
            let diag: Vec<f64> = (0..n).map(|i| 2.5 + seed[80 + i].abs()).collect();
            let x: Vec<f64> = seed[120..120 + n].to_vec();
            let mut b = apply(&lower, &diag, &upper, &x);
            CyclicTridiagonal::new(&lower, &diag, &upper).solve(&mut b);
            for (a, e) in b.iter().zip(&x) {
                prop_assert!((a - e).abs() < 1e-12);
            }
        }
    }
}
