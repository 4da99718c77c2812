//! Periodic monotone rearrangement of staircase maps, pseudo-inverses and
//! pushforward measures.
//!
//! A predictor output `Xhat_k = a_k + xihat_k` (extended by
//! `Xhat_{k+M} = Xhat_k + 1`) is generally not monotone. Sorting the
//! bi-infinite sequence yields a sorted sequence `S` with `S_{i+M} = S_i + 1`;
//! every index shift `X_k = S_{k+j}` is monotone and has the same residues
//! modulo one. The shifts form an integer family whose period sums differ by
//! exactly one per unit of `j`; an [`Anchor`] picks one member.
//!
//! Output displacements are written as `xihat_p + d/M` with an integer `d`,
//! so a parcel that keeps its slot (`d = 0`) is copied bit-for-bit. This makes
//! the operator exactly idempotent and exactly commuting with cell shifts.

use crate::config::Anchor;
use crate::grid::{cell_center, MonotoneMap, PeriodicProfile};
use crate::scheme::LagrangianState;

/// Positions closer than this many cell widths below a histogram boundary are
/// attributed to the upper cell, absorbing the rounding of `a_k + xi_k`.
const BOUNDARY_SNAP: f64 = 1e-9;

/// Tolerance for residue comparisons.
pub const RESIDUE_TOL: f64 = 1e-12;

/// One period of the sorted bi-infinite sequence, plus the bookkeeping needed
/// to map window slots back to input cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedWindow {
    /// `S_0 <= ... <= S_{M-1} <= S_0 + 1`.
    values: Vec<f64>,
    /// Input cell feeding each slot.
    source: Vec<usize>,
    /// Integer lift: `S_s = Xhat_{source[s]} + lift[s]`.
    lift: Vec<i64>,
    /// Index shift selected by the anchor policy.
    phase: i64,
}

impl SortedWindow {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn phase(&self) -> i64 {
        self.phase
    }

    #[inline]
    fn cells(&self) -> usize {
        self.values.len()
    }

    /// `S_i` for any integer `i`.
    pub fn lifted(&self, i: i64) -> f64 {
        let m = self.cells() as i64;
        self.values[i.rem_euclid(m) as usize] + i.div_euclid(m) as f64
    }

    /// Phase whose displacement mean matches the input mean exactly.
    ///
    /// Output slot `k` under phase `j` carries `d_k = p + (lift + q) M - k`,
    /// and `sum_k d_k = M (sum lift + j)`; the mean moves by
    /// `(sum lift + j)/M`.
    fn canonical_phase(&self) -> i64 {
        -self.lift.iter().sum::<i64>()
    }

    /// Period-mean deviation `mean(xi_sharp) - mean(xihat)` of phase `j`.
    pub fn mean_deviation(&self, j: i64) -> f64 {
        (self.lift.iter().sum::<i64>() + j) as f64 / self.cells() as f64
    }

    /// `(source cell, integer offset d)` of output slot `k` under phase `j`.
    #[inline]
    fn slot(&self, k: usize, j: i64) -> (usize, i64) {
        let m = self.cells() as i64;
        let i = k as i64 + j;
        let (q, s) = (i.div_euclid(m), i.rem_euclid(m) as usize);
        let p = self.source[s];
        (p, p as i64 + (self.lift[s] + q) * m - k as i64)
    }

    /// Displacements `xi_sharp_k = S_{k+j} - a_k` for phase `j`.
    fn assemble(&self, xihat: &[f64], j: i64) -> Vec<f64> {
        let m = self.cells() as f64;
        (0..self.cells())
            .map(|k| {
                let (p, d) = self.slot(k, j);
                if d == 0 {
                    xihat[p]
                } else {
                    xihat[p] + d as f64 / m
                }
            })
            .collect()
    }

    fn select(&self, anchor: Anchor, xihat: &[f64]) -> i64 {
        let m = self.cells() as i64;
        match anchor {
            Anchor::MeanClosest => self.canonical_phase(),
            Anchor::ZeroPhase => (0..m)
                .map(|s| {
                    let q = (-self.values[s as usize]).ceil() as i64;
                    q * m + s
                })
                .min()
                .unwrap_or(0),
            Anchor::L2Input => {
                let (lo, hi) = xihat
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                        (a.min(v), b.max(v))
                    });
                let width = ((hi - lo) * m as f64).ceil() as i64 + 1;
                let center = self.canonical_phase();
                let mut best = (f64::INFINITY, center);
                for j in (center - width)..=(center + width) {
                    let cost: f64 = self
                        .assemble(xihat, j)
                        .iter()
                        .zip(xihat)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    // Strict comparison keeps the smaller shift on ties.
                    if cost < best.0 {
                        best = (cost, j);
                    }
                }
                best.1
            }
        }
    }
}

/// Largest displacement the rearrangement accepts. Beyond it the cell
/// offsets `k/M` are lost to rounding and the integer lifts may overflow.
pub const MAX_DISPLACEMENT: f64 = (1u64 << 40) as f64;

/// Builds the sorted window of `Xhat_k = a_k + xihat_k`.
///
/// # Panics
///
/// If some `|xihat_k|` exceeds [`MAX_DISPLACEMENT`].
pub fn sorted_window(xihat: &PeriodicProfile) -> SortedWindow {
    let m = xihat.cells();
    let xi = xihat.values();
    assert!(
        xi.iter().all(|v| v.abs() <= MAX_DISPLACEMENT),
        "displacement beyond the resolvable range"
    );
    let pos: Vec<f64> = xi
        .iter()
        .enumerate()
        .map(|(k, v)| cell_center(k, m) + v)
        .collect();

    let monotone = pos.windows(2).all(|w| w[0] <= w[1]) && pos[m - 1] <= pos[0] + 1.0;
    if monotone {
        return SortedWindow {
            values: pos,
            source: (0..m).collect(),
            lift: vec![0; m],
            phase: 0,
        };
    }

    // Residue keys; ties go by position in the bi-infinite input sequence.
    let mut keys: Vec<(f64, i64, usize, i64)> = pos
        .iter()
        .enumerate()
        .map(|(p, &x)| {
            let mut f = x.floor();
            let mut r = x - f;
            if r >= 1.0 {
                r = 0.0;
                f += 1.0;
            }
            let f = f as i64;
            (
                r,
                (p as i64).saturating_sub(f.saturating_mul(m as i64)),
                p,
                f.saturating_neg(),
            )
        })
        .collect();
    keys.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    SortedWindow {
        values: keys.iter().map(|k| k.0).collect(),
        source: keys.iter().map(|k| k.2).collect(),
        lift: keys.iter().map(|k| k.3).collect(),
        phase: 0,
    }
}

/// Rearranges `Xhat = identity + xihat` in increasing order and returns the
/// monotone map together with its window (carrying the selected phase).
pub fn rearrange(xihat: &PeriodicProfile, anchor: Anchor) -> (MonotoneMap, SortedWindow) {
    let mut window = sorted_window(xihat);
    let j = window.select(anchor, xihat.values());
    window.phase = j;
    let xi = window.assemble(xihat.values(), j);
    (
        MonotoneMap::from_xi_unchecked(PeriodicProfile::from_vec_unchecked(xi)),
        window,
    )
}

/// Periodic monotone rearrangement of the displacement profile `xihat`.
pub fn sort_periodic(xihat: &PeriodicProfile, anchor: Anchor) -> MonotoneMap {
    rearrange(xihat, anchor).0
}

/// Same as [`sort_periodic`] for raw positions `Xhat_0 .. Xhat_{M-1}`.
pub fn sort_positions(positions: &[f64], anchor: Anchor) -> crate::Result<MonotoneMap> {
    let m = positions.len();
    let xi = PeriodicProfile::new(
        positions
            .iter()
            .enumerate()
            .map(|(k, x)| x - cell_center(k, m))
            .collect(),
    )?;
    Ok(sort_periodic(&xi, anchor))
}

/// Right-continuous generalized inverse `u` of the staircase `X`, sampled at
/// the `J` centers `x_j = (j + 1/2)/J`, with `u(x + 1) = u(x) + 1`.
pub fn pseudo_inverse(map: &MonotoneMap, j_cells: usize) -> Vec<f64> {
    let m = map.cells();
    let mut pos = map.positions();
    pos.push(pos[0] + 1.0);
    (0..j_cells)
        .map(|j| {
            let x = (j as f64 + 0.5) / j_cells as f64;
            let q = (x - pos[0]).floor();
            let target = x - q;
            let s = pos.partition_point(|&p| p <= target);
            (q as i64 * m as i64 + s as i64) as f64 / m as f64
        })
        .collect()
}

/// Measure of each x-cell `[j/J, (j+1)/J)` of the torus.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMeasure {
    pub mass: Vec<f64>,
}

impl CellMeasure {
    pub fn cells(&self) -> usize {
        self.mass.len()
    }

    /// Mass per cell divided by the cell width.
    pub fn density(&self) -> Vec<f64> {
        let j = self.mass.len() as f64;
        self.mass.iter().map(|m| m * j).collect()
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }
}

/// X-cell index of a position on the torus.
#[inline]
pub fn torus_cell(x: f64, j_cells: usize) -> usize {
    let y = x.rem_euclid(1.0) * j_cells as f64;
    let mut c = y.floor();
    if y - c > 1.0 - BOUNDARY_SNAP {
        c += 1.0;
    }
    (c as usize) % j_cells
}

fn binned_sum(map: &MonotoneMap, j_cells: usize, weight: impl Fn(usize) -> f64) -> CellMeasure {
    let m = map.cells();
    let mut mass = vec![0.0; j_cells];
    for (k, x) in map.positions().into_iter().enumerate() {
        mass[torus_cell(x, j_cells)] += weight(k);
    }
    for v in &mut mass {
        *v /= m as f64;
    }
    CellMeasure { mass }
}

/// Pushforward of the uniform label measure: `rho`.
pub fn pushforward_histogram(map: &MonotoneMap, j_cells: usize) -> CellMeasure {
    let m = map.cells();
    let mut count = vec![0usize; j_cells];
    for x in map.positions() {
        count[torus_cell(x, j_cells)] += 1;
    }
    CellMeasure {
        mass: count.into_iter().map(|c| c as f64 / m as f64).collect(),
    }
}

/// Pushforward weighted by the velocity `lambda xi + Z`: `Q`.
pub fn pushforward_flux(state: &LagrangianState, lambda: f64, j_cells: usize) -> CellMeasure {
    let xi = state.xi().values();
    let z = state.z().values();
    binned_sum(&state.x, j_cells, |k| lambda * xi[k] + z[k])
}

fn normalized_residues(positions: &[f64]) -> Vec<f64> {
    let mut r: Vec<f64> = positions
        .iter()
        .map(|x| {
            let r = x.rem_euclid(1.0);
            if r > 1.0 - RESIDUE_TOL {
                r - 1.0
            } else {
                r
            }
        })
        .collect();
    r.sort_unstable_by(f64::total_cmp);
    r
}

/// Whether two position lists have the same residues modulo one (as
/// multisets, to within [`RESIDUE_TOL`]).
pub fn residue_multiset_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len()
        && normalized_residues(a)
            .iter()
            .zip(normalized_residues(b))
            .all(|(x, y)| (x - y).abs() <= RESIDUE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn xi(v: &[f64]) -> PeriodicProfile {
        PeriodicProfile::new(v.to_vec()).unwrap()
    }

    /// Exhaustive oracle: sorts several lifted periods explicitly and scans
    /// every window start, keeping the one whose mean is closest to the
    /// input mean (ties to the smaller mean).
    fn brute_mean_closest(positions: &[f64]) -> Vec<f64> {
        let m = positions.len();
        let reps = 6i64;
        let mut all: Vec<f64> = (-reps..=reps)
            .flat_map(|q| positions.iter().map(move |x| x + q as f64))
            .collect();
        all.sort_by(f64::total_cmp);
        let target: f64 = positions.iter().sum::<f64>() / m as f64;
        let mut best: Option<(f64, f64, usize)> = None;
        for start in (2 * m)..(all.len() - 3 * m) {
            let mean = all[start..start + m].iter().sum::<f64>() / m as f64;
            let dev = (mean - target).abs();
            let better = match best {
                None => true,
                Some((d, mu, _)) => dev < d - 1e-13 || ((dev - d).abs() <= 1e-13 && mean < mu),
            };
            if better {
                best = Some((dev, mean, start));
            }
        }
        let start = best.unwrap().2;
        all[start..start + m].to_vec()
    }

    #[test]
    fn two_cell_swap() {
        let out = sort_positions(&[0.75, 0.25], Anchor::MeanClosest).unwrap();
        assert_eq!(out.positions(), vec![0.25, 0.75]);
        assert_eq!(out.xi().values(), &[0.0, 0.0]);
        assert_eq!(brute_mean_closest(&[0.75, 0.25]), vec![0.25, 0.75]);
    }

    #[test]
    fn alternating_compensation_restores_identity() {
        let out = sort_positions(&[-0.25, 0.5, 0.25, 1.0], Anchor::MeanClosest).unwrap();
        assert_eq!(out.positions(), vec![0.0, 0.25, 0.5, 0.75]);
        assert_eq!(out.xi().values(), &[-0.125; 4]);
    }

    #[test]
    fn already_monotone_input_is_returned_bitwise() {
        let input = xi(&[0.013, -0.07, 0.1, 0.2, 0.19]);
        for anchor in [Anchor::MeanClosest, Anchor::L2Input] {
            let (out, w) = rearrange(&input, anchor);
            assert_eq!(out.xi(), &input);
            assert_eq!(w.phase(), 0);
        }
    }

    #[test]
    fn zero_phase_starts_at_first_nonnegative_value() {
        let out = sort_periodic(&xi(&[-0.1, -0.1, -0.1, -0.1]), Anchor::ZeroPhase);
        let p = out.positions();
        assert!(p[0] >= 0.0);
        assert!(out.position(-1) < 0.0);
        assert_abs_diff_eq!(p[0], 0.025, epsilon = 1e-15);
    }

    #[test]
    fn brute_force_agreement_on_scrambled_inputs() {
        let cases: [&[f64]; 4] = [
            &[0.9, 0.1, 0.5, 0.3],
            &[1.7, -0.4, 0.2, 0.05, 2.3, -1.1],
            &[0.3, 0.3, 0.1, 0.1],
            &[-0.2, 0.8, 0.15, 0.61, 0.44, 0.9, 0.0, 0.33],
        ];
        for pos in cases {
            let out = sort_positions(pos, Anchor::MeanClosest)
                .unwrap()
                .positions();
            let brute = brute_mean_closest(pos);
            for (a, b) in out.iter().zip(&brute) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn l2_anchor_matches_exhaustive_scan() {
        let pos = [1.7, -0.4, 0.2, 0.05, 2.3, -1.1];
        let input = sort_positions(&pos, Anchor::L2Input).unwrap();
        let w = sorted_window(&xi(&pos
            .iter()
            .enumerate()
            .map(|(k, x)| x - (k as f64 + 0.5) / 6.0)
            .collect::<Vec<_>>()));
        let mut best = (f64::INFINITY, 0);
        for j in -40..40 {
            let cost: f64 = (0..6)
                .map(|k| (w.lifted(k + j) - pos[k as usize]).powi(2))
                .sum();
            if cost < best.0 {
                best = (cost, j);
            }
        }
        for k in 0..6 {
            assert_abs_diff_eq!(input.position(k), w.lifted(k + best.1), epsilon = 1e-12);
        }
    }

    #[test]
    fn pseudo_inverse_examples() {
        let map = MonotoneMap::identity(2).unwrap();
        assert_eq!(map.positions(), vec![0.25, 0.75]);
        assert_eq!(pseudo_inverse(&map, 4), vec![0.0, 0.5, 0.5, 1.0]);

        for (m, j) in [(8, 8), (8, 4), (8, 16), (10, 7)] {
            let id = MonotoneMap::identity(m).unwrap();
            let tol = 0.5 / m as f64 + 0.5 / j as f64;
            for (jj, u) in pseudo_inverse(&id, j).iter().enumerate() {
                let x = (jj as f64 + 0.5) / j as f64;
                assert!((u - x).abs() <= tol + 1e-15, "m={m} j={j}");
            }
            let c = 0.3;
            let shifted = MonotoneMap::new(PeriodicProfile::new(vec![c; m]).unwrap()).unwrap();
            for (jj, u) in pseudo_inverse(&shifted, j).iter().enumerate() {
                let x = (jj as f64 + 0.5) / j as f64;
                assert!((u - (x - c)).abs() <= tol + 1e-15);
            }
        }
    }

    #[test]
    fn histogram_examples() {
        let id = MonotoneMap::identity(10).unwrap();
        let h = pushforward_histogram(&id, 10);
        assert!(h.mass.iter().all(|&v| v == 0.1));

        let conc = MonotoneMap::new(xi(&[-0.1, -0.35, -0.6, -0.85])).unwrap();
        assert_eq!(
            pushforward_histogram(&conc, 4).mass,
            vec![1.0, 0.0, 0.0, 0.0]
        );

        let map = MonotoneMap::new(xi(&[-0.025, -0.275, -0.025, -0.275])).unwrap();
        assert!(residue_multiset_equal(
            &map.positions(),
            &[0.1, 0.1, 0.6, 0.6]
        ));
        assert_eq!(pushforward_histogram(&map, 2).mass, vec![0.5, 0.5]);
    }

    #[test]
    fn flux_examples() {
        let zero = PeriodicProfile::zeros(4).unwrap();
        let map = MonotoneMap::new(xi(&[-0.025, -0.275, -0.025, -0.275])).unwrap();
        let s = LagrangianState::new(0.0, map.clone(), zero.clone()).unwrap();
        assert_eq!(pushforward_flux(&s, 0.0, 2).mass, vec![0.0, 0.0]);

        let ones = PeriodicProfile::new(vec![1.0; 4]).unwrap();
        let s = LagrangianState::new(0.0, MonotoneMap::identity(4).unwrap(), ones).unwrap();
        assert_eq!(
            pushforward_flux(&s, 3.0, 2).mass,
            pushforward_histogram(&s.x, 2).mass
        );

        let map = MonotoneMap::new(xi(&[0.1, -0.1])).unwrap();
        let s = LagrangianState::new(0.0, map, xi(&[0.2, 0.3])).unwrap();
        let q = pushforward_flux(&s, 1.0, 2);
        assert_abs_diff_eq!(q.mass[0], 0.15, epsilon = 1e-15);
        assert_abs_diff_eq!(q.mass[1], 0.10, epsilon = 1e-15);
    }

    #[test]
    fn residue_comparison() {
        let a = [0.1, 0.2];
        assert!(residue_multiset_equal(&a, &a));
        assert!(!residue_multiset_equal(&[0.1, 0.2], &[0.1, 0.3]));
        assert!(residue_multiset_equal(&[0.1, 1.2], &[-0.9, 0.2]));
        assert!(residue_multiset_equal(&[0.1, -1e-17], &[0.1, 0.0]));
        let y = [0.9, 0.1, 0.5, 0.3];
        let s = sort_positions(&y, Anchor::MeanClosest).unwrap();
        assert!(residue_multiset_equal(&y, &s.positions()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn profile() -> impl Strategy<Value = PeriodicProfile> {
            (2usize..40, 0.01f64..2.0).prop_flat_map(|(m, amp)| {
                proptest::collection::vec(-amp..amp, m)
                    .prop_map(|v| PeriodicProfile::new(v).unwrap())
            })
        }

        proptest! {
            #[test]
            fn idempotent_for_every_anchor(p in profile()) {
                for anchor in Anchor::ALL {
                    let once = sort_periodic(&p, anchor);
                    let twice = sort_periodic(once.xi(), anchor);
                    prop_assert_eq!(&once, &twice);
                }
            }

            #[test]
            fn output_is_monotone_and_conserves_residues(p in profile()) {
                for anchor in Anchor::ALL {
                    let (out, w) = rearrange(&p, anchor);
                    prop_assert!(out.first_descent(1e-12).is_none());
                    let input: Vec<f64> = (0..p.cells())
                        .map(|k| cell_center(k, p.cells()) + p.values()[k])
                        .collect();
                    prop_assert!(residue_multiset_equal(&input, &out.positions()));
                    let s = w.values();
                    prop_assert!(s.windows(2).all(|x| x[0] <= x[1]));
                    prop_assert!(s[s.len() - 1] <= s[0] + 1.0);
                }
            }

            #[test]
            fn mean_closest_preserves_mean(p in profile()) {
                let out = sort_periodic(&p, Anchor::MeanClosest);
                prop_assert!((out.xi().mean() - p.mean()).abs() <= 1e-12);
            }

            #[test]
            fn translation_equivariance(p in profile(), c in -3.0f64..3.0) {
                let a = sort_periodic(&p, Anchor::MeanClosest);
                let shifted = PeriodicProfile::new(p.values().iter().map(|v| v + c).collect()).unwrap();
                let b = sort_periodic(&shifted, Anchor::MeanClosest);
                for (x, y) in a.xi().values().iter().zip(b.xi().values()) {
                    prop_assert!((x + c - y).abs() <= 1e-12);
                }
            }

            #[test]
            fn cyclic_shift_commutes(p in profile()) {
                let a = sort_periodic(&p, Anchor::MeanClosest);
                let b = sort_periodic(&p.shifted(1), Anchor::MeanClosest);
                prop_assert_eq!(b.xi(), &a.xi().shifted(1));
            }

            #[test]
            fn weak_pushforward_invariance(p in profile()) {
                let m = p.cells();
                let out = sort_periodic(&p, Anchor::MeanClosest);
                let tests: [fn(f64) -> f64; 3] = [
                    |x| (std::f64::consts::TAU * x).cos(),
                    |x| (std::f64::consts::TAU * x).sin(),
                    |x| (2.0 * std::f64::consts::TAU * x).cos(),
                ];
                for g in tests {
                    let before: f64 = (0..m).map(|k| g(cell_center(k, m) + p.values()[k])).sum::<f64>() / m as f64;
                    let after: f64 = out.positions().iter().map(|&x| g(x)).sum::<f64>() / m as f64;
                    prop_assert!((before - after).abs() <= 1e-12);
                }
            }
        }
    }
}
