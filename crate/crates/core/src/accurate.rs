//! Zero-error coresets: the O(1) moment-statistics summary, and subset
//! coresets of at most `d+3` (nonnegative) or `d+2` (signed) points that
//! match the input's mass, weighted sum and weighted squared norm exactly.
//!
//! Both subset constructions work on the lifted points `h = (pᵀ, ‖p‖², 1)`
//! in `ℝ^{d+2}`: any reweighting with the same lifted sum reproduces the
//! cost of every query.

use crate::error::{Error, Result};
use crate::types::{CoresetWeights, MomentSummary, WeightedSet};
use crate::vecops;

/// A point lifted to `ℝ^{d+2}` as `(pᵀ, ‖p‖², 1)`, so that the three moment
/// conditions become a single linear one.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    h: Vec<f64>,
}

impl LiftedPoint {
    pub fn lift(p: &[f64]) -> LiftedPoint {
        let mut h = Vec::with_capacity(p.len() + 2);
        h.extend_from_slice(p);
        h.push(vecops::norm_sq(p));
        h.push(1.0);
        LiftedPoint { h }
    }

    pub fn coords(&self) -> &[f64] {
        &self.h
    }

    /// Dimension of the lifted space, `d + 2`.
    pub fn dim(&self) -> usize {
        self.h.len()
    }
}

/// The O(1)-size summary coreset: one `O(nd)` pass over the input. Costs are
/// recovered through [`MomentSummary::eval`].
pub fn stats_coreset(set: &WeightedSet) -> MomentSummary {
    set.moments()
}

/// Deterministic nonnegative subset coreset with at most `d+3` nonzeros.
///
/// Repeatedly finds a null-space vector `v` of the active lifted points and
/// moves `u ← u − αv` with the largest step keeping all weights nonnegative,
/// zeroing at least one weight per round. Requires nonnegative input weights.
pub fn caratheodory_coreset(set: &WeightedSet) -> Result<CoresetWeights> {
    if set.weights().iter().any(|&w| w < 0.0) {
        return Err(Error::invalid(
            "caratheodory_coreset requires nonnegative weights",
        ));
    }
    let cap = set.dim() + 3;
    let mut u: Vec<f64> = set.weights().to_vec();
    let mut active: Vec<usize> = (0..set.len()).filter(|&i| u[i] > 0.0).collect();

    while active.len() > cap {
        // A null vector over the first d+3 active columns always exists: the
        // lift has only d+2 rows.
        let subset = &active[..cap];
        let cols: Vec<Vec<f64>> = subset
            .iter()
            .map(|&i| LiftedPoint::lift(set.point(i)).h)
            .collect();
        let mut v = match null_vector(&cols) {
            Some(v) => v,
            None => break, // numerically fully dependent; nothing to eliminate
        };
        // The lift's constant coordinate forces the entries of v to sum to
        // zero, so both signs occur; orient so a positive step exists.
        if !v.iter().any(|&x| x > 0.0) {
            for x in &mut v {
                *x = -*x;
            }
        }
        let mut alpha = f64::INFINITY;
        let mut kill = usize::MAX;
        for (k, &vi) in v.iter().enumerate() {
            if vi > 0.0 {
                let step = u[subset[k]] / vi;
                if step < alpha {
                    alpha = step;
                    kill = k;
                }
            }
        }
        if kill == usize::MAX {
            break;
        }
        for (k, &vi) in v.iter().enumerate() {
            let i = subset[k];
            if k == kill {
                u[i] = 0.0;
            } else {
                u[i] -= alpha * vi;
                if u[i] < 0.0 {
                    // roundoff-scale undershoot only
                    u[i] = 0.0;
                }
            }
        }
        active.retain(|&i| u[i] > 0.0);
    }

    CoresetWeights::from_entries(set.len(), active.iter().map(|&i| (i, u[i])))
}

/// Deterministic signed subset coreset with at most `d+2` nonzeros (fewer on
/// rank-deficient inputs): Gaussian elimination expresses the lifted moment
/// vector over a column basis of the lifted point matrix.
pub fn signed_subset_coreset(set: &WeightedSet) -> CoresetWeights {
    let n = set.len();
    let rows = set.dim() + 2;
    if n <= rows {
        return CoresetWeights::from_dense(set.weights());
    }

    // a[r][j] = r-th lifted coordinate of point j; tau = sum_i w_i h_i.
    let mut a: Vec<Vec<f64>> = vec![vec![0.0; n]; rows];
    let mut tau = vec![0.0; rows];
    let mut col_scale = vec![0.0f64; n];
    for j in 0..n {
        let h = LiftedPoint::lift(set.point(j)).h;
        for r in 0..rows {
            a[r][j] = h[r];
            col_scale[j] = col_scale[j].max(h[r].abs());
            tau[r] += set.weight(j) * h[r];
        }
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0;
    for j in 0..n {
        if r == rows {
            break;
        }
        let mut pr = r;
        for rr in r + 1..rows {
            if a[rr][j].abs() > a[pr][j].abs() {
                pr = rr;
            }
        }
        if a[pr][j].abs() <= 1e-10 * col_scale[j] {
            continue; // column dependent on the pivots so far
        }
        a.swap(r, pr);
        tau.swap(r, pr);
        for rr in r + 1..rows {
            let f = a[rr][j] / a[r][j];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(rr);
                for (x, y) in lower[0][j..n].iter_mut().zip(&upper[r][j..n]) {
                    *x -= f * y;
                }
                tau[rr] -= f * tau[r];
            }
        }
        pivots.push((r, j));
        r += 1;
    }

    // Back-substitute for the coefficients on the pivot columns. tau lies in
    // the column space by construction, so the dropped rows carry only
    // roundoff.
    let mut coef = vec![0.0; pivots.len()];
    for k in (0..pivots.len()).rev() {
        let (rk, ck) = pivots[k];
        let mut s = tau[rk];
        for (k2, &(_, c2)) in pivots.iter().enumerate().skip(k + 1) {
            s -= a[rk][c2] * coef[k2];
        }
        coef[k] = s / a[rk][ck];
    }

    CoresetWeights::from_entries(
        n,
        pivots.iter().zip(&coef).map(|(&(_, c), &w)| (c, w)),
    )
    .expect("pivot columns are valid indices")
}

/// A nonzero `v` with `Σⱼ vⱼ·colⱼ = 0`, or `None` if the columns are
/// numerically independent. Row echelon with partial pivoting; the lowest
/// free column gets coefficient one.
fn null_vector(cols: &[Vec<f64>]) -> Option<Vec<f64>> {
    let m = cols.len();
    let rows = cols[0].len();
    let scale = cols
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if scale == 0.0 {
        let mut v = vec![0.0; m];
        v[0] = 1.0;
        return Some(v);
    }
    let tol = 1e-13 * scale;

    let mut a: Vec<Vec<f64>> = (0..rows)
        .map(|r| (0..m).map(|j| cols[j][r]).collect())
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut r = 0;
    for j in 0..m {
        if r == rows {
            break;
        }
        let mut pr = r;
        for rr in r + 1..rows {
            if a[rr][j].abs() > a[pr][j].abs() {
                pr = rr;
            }
        }
        if a[pr][j].abs() <= tol {
            continue;
        }
        a.swap(r, pr);
        for rr in r + 1..rows {
            let f = a[rr][j] / a[r][j];
            if f != 0.0 {
                let (upper, lower) = a.split_at_mut(rr);
                for (x, y) in lower[0][j..m].iter_mut().zip(&upper[r][j..m]) {
                    *x -= f * y;
                }
            }
        }
        pivot_cols.push(j);
        r += 1;
    }

    let free = (0..m).find(|j| !pivot_cols.contains(j))?;
    let mut v = vec![0.0; m];
    v[free] = 1.0;
    for k in (0..pivot_cols.len()).rev() {
        let c = pivot_cols[k];
        let s: f64 = (c + 1..m).map(|j| a[k][j] * v[j]).sum();
        v[c] = -s / a[k][c];
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Point, RngSeed};
    use rand::Rng;

    fn moment_gap(set: &WeightedSet, u: &CoresetWeights) -> f64 {
        let mw = set.moments();
        let mu = u.moments(set);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-12);
        let mean_gap = mw
            .weighted_sum()
            .coords()
            .iter()
            .zip(mu.weighted_sum().coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
            / mw.weighted_sum().norm_sq().sqrt().max(1.0);
        rel(mw.s0, mu.s0).max(rel(mw.s2, mu.s2)).max(mean_gap)
    }

    #[test]
    fn lift_invariants() {
        let h = LiftedPoint::lift(&[-1.0, 0.0]);
        assert_eq!(h.coords(), &[-1.0, 0.0, 1.0, 1.0]);
        assert_eq!(h.dim(), 4);
    }

    #[test]
    fn stats_summary_of_two_point_set() {
        let set = WeightedSet::new(vec![-1.0, 0.0, 1.0, 0.0], 2, vec![0.5, 0.5]).unwrap();
        let s = stats_coreset(&set);
        assert_eq!((s.s0, s.s2), (1.0, 1.0));
        assert_eq!(s.weighted_sum().coords(), &[0.0, 0.0]);
    }

    #[test]
    fn stats_summary_reproduces_cost_on_random_queries() {
        let mut rng = RngSeed(21).rng();
        let data: Vec<f64> = (0..120).map(|_| rng.random_range(-3.0..3.0)).collect();
        let w: Vec<f64> = (0..40).map(|_| rng.random_range(0.1..2.0)).collect();
        let set = WeightedSet::new(data, 3, w).unwrap();
        let s = stats_coreset(&set);
        for _ in 0..1000 {
            let x = Point::new((0..3).map(|_| rng.random_range(-6.0..6.0)).collect()).unwrap();
            let direct = set.cost(&x).unwrap();
            let via = s.eval(&x).unwrap();
            assert!((direct - via).abs() <= 1e-9 * direct.max(1e-12));
        }
    }

    #[test]
    fn stats_summary_single_point_exact_at_the_point() {
        let set = WeightedSet::new(vec![1.5, -2.0], 2, vec![2.0]).unwrap();
        let s = stats_coreset(&set);
        let c = s.eval(&Point::new(vec![1.5, -2.0]).unwrap()).unwrap();
        assert!(c.abs() <= 1e-12);
    }

    #[test]
    fn caratheodory_small_input_returned_verbatim() {
        let set = WeightedSet::new(vec![-1.0, 0.0, 1.0, 0.0], 2, vec![0.5, 0.5]).unwrap();
        let u = caratheodory_coreset(&set).unwrap();
        assert_eq!(u.to_dense(), vec![0.5, 0.5]);
    }

    #[test]
    fn caratheodory_reduces_ten_points_on_the_line() {
        let data: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let set = WeightedSet::new(data, 1, vec![0.1; 10]).unwrap();
        let u = caratheodory_coreset(&set).unwrap();
        assert!(u.cardinality() <= 4);
        assert!(u.iter().all(|(_, w)| w >= -1e-12));
        assert!(moment_gap(&set, &u) <= 1e-8);
    }

    #[test]
    fn caratheodory_random_sets_match_all_three_moments() {
        let mut rng = RngSeed(7).rng();
        for _ in 0..20 {
            let d = rng.random_range(1..=6);
            let n = rng.random_range(d + 4..=120);
            let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-4.0..4.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
            let set = WeightedSet::new(data, d, w).unwrap();
            let u = caratheodory_coreset(&set).unwrap();
            assert!(u.cardinality() <= d + 3, "cardinality {}", u.cardinality());
            assert!(u.iter().all(|(_, w)| w >= -1e-12));
            let total: f64 = set.total_weight();
            assert!(u.iter().all(|(_, w)| w <= total + 1e-9));
            assert!(moment_gap(&set, &u) <= 1e-8);
        }
    }

    #[test]
    fn caratheodory_rejects_negative_weights() {
        let set = WeightedSet::new(vec![0.0, 1.0, 2.0], 1, vec![1.0, -0.5, 1.0]).unwrap();
        assert!(caratheodory_coreset(&set).is_err());
    }

    #[test]
    fn signed_small_input_returned_verbatim() {
        let set = WeightedSet::new(vec![0.0, 1.0, 2.0], 1, vec![0.3, 0.4, 0.3]).unwrap();
        let u = signed_subset_coreset(&set);
        assert_eq!(u.to_dense(), vec![0.3, 0.4, 0.3]);
    }

    #[test]
    fn signed_reduces_ten_points_on_the_line() {
        let data: Vec<f64> = (0..10).map(|i| i as f64 - 4.0).collect();
        let set = WeightedSet::new(data, 1, vec![0.1; 10]).unwrap();
        let u = signed_subset_coreset(&set);
        assert!(u.cardinality() <= 3);
        assert!(moment_gap(&set, &u) <= 1e-8);
    }

    #[test]
    fn signed_collinear_points_in_r3_use_at_most_rank_many() {
        // Points on a line in R^3: the lifted matrix has rank 3.
        let n = 12;
        let mut data = Vec::new();
        for i in 0..n {
            let t = i as f64 * 0.5 - 2.0;
            data.extend_from_slice(&[1.0 + t, 2.0 - t, 0.5 * t]);
        }
        let set = WeightedSet::new(data, 3, vec![1.0; n]).unwrap();
        let u = signed_subset_coreset(&set);
        assert!(u.cardinality() <= 3, "cardinality {}", u.cardinality());
        assert!(moment_gap(&set, &u) <= 1e-8);
    }

    #[test]
    fn both_subset_coresets_are_accurate_over_queries() {
        let mut rng = RngSeed(13).rng();
        let d = 3;
        let n = 60;
        let data: Vec<f64> = (0..n * d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let set = WeightedSet::new(data, d, w).unwrap();
        for u in [
            caratheodory_coreset(&set).unwrap(),
            signed_subset_coreset(&set),
        ] {
            for _ in 0..500 {
                let x =
                    Point::new((0..d).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
                let full = set.cost(&x).unwrap();
                let red = set.cost_with(&u, &x).unwrap();
                assert!((full - red).abs() <= 1e-7 * full.max(1e-12));
            }
        }
    }
}
