//! Reduction of an arbitrary weighted input `(Q, m)` to its normalized view
//! `(P, w)` (unit mass, zero mean, unit mean squared norm) and the mapping of
//! coreset weights back to the original frame.
//!
//! The normalization is only ever used inside builders and oracles; inputs
//! on disk stay in their raw frame.

use crate::error::{Error, Result};
use crate::types::{CoresetWeights, Point, WeightedSet};
use crate::vecops;

/// The `(μ, σ, ‖m‖₁)` triple mapping a weighted set to its normalized view.
/// A coreset `u` for the normalized view maps back as `u′ = ‖m‖₁ · u`, and a
/// query `x` maps to `y = (x − μ)/σ` with `cost(Q, m, x) = σ²‖m‖₁·cost(P, w, y)`.
#[derive(Debug, Clone)]
pub struct NormalizationTransform {
    mu: Point,
    sigma: f64,
    total_mass: f64,
}

impl NormalizationTransform {
    pub fn mean(&self) -> &Point {
        &self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// `y = (x − μ)/σ`
    pub fn map_query(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.mu.dim() {
            return Err(Error::DimMismatch {
                expected: self.mu.dim(),
                got: x.dim(),
            });
        }
        Point::new(
            x.coords()
                .iter()
                .zip(self.mu.coords())
                .map(|(c, m)| (c - m) / self.sigma)
                .collect(),
        )
    }

    /// `x = σ·y + μ`
    pub fn unmap_query(&self, y: &Point) -> Result<Point> {
        if y.dim() != self.mu.dim() {
            return Err(Error::DimMismatch {
                expected: self.mu.dim(),
                got: y.dim(),
            });
        }
        Point::new(
            y.coords()
                .iter()
                .zip(self.mu.coords())
                .map(|(c, m)| self.sigma * c + m)
                .collect(),
        )
    }
}

/// Maps `(Q, m)` to its normalized view: weights `w = m/‖m‖₁`, points
/// `pⱼ = (qⱼ − μ)/σ` with `μ` the weighted mean and `σ²` the weighted
/// variance.
///
/// Requires `n ≥ 2` and strictly positive weights. A set whose points all
/// coincide has `σ = 0` and no normalized view; the returned
/// [`Error::ZeroVariance`] carries `μ` so the caller can emit the exact
/// single-point coreset directly.
pub fn normalize(set: &WeightedSet) -> Result<(WeightedSet, NormalizationTransform)> {
    if set.len() < 2 {
        return Err(Error::invalid("normalization requires at least 2 points"));
    }
    if set.weights().iter().any(|&w| w <= 0.0) {
        return Err(Error::invalid(
            "normalization requires strictly positive weights",
        ));
    }
    let total_mass = set.total_weight();
    let mu = set.weighted_mean()?;

    // Weighted variance via the centered two-pass sum, which is more accurate
    // than s2 - ||mu||^2 * s0 when the mean is far from the origin.
    let mut var = 0.0;
    for i in 0..set.len() {
        var += set.weight(i) / total_mass * vecops::dist_sq(set.point(i), mu.coords());
    }
    if var <= 0.0 {
        return Err(Error::ZeroVariance { mean: mu });
    }
    let sigma = var.sqrt();

    let dim = set.dim();
    let mut data = Vec::with_capacity(set.len() * dim);
    for i in 0..set.len() {
        for (c, m) in set.point(i).iter().zip(mu.coords()) {
            data.push((c - m) / sigma);
        }
    }
    let weights = set.weights().iter().map(|w| w / total_mass).collect();
    let normalized = WeightedSet::new(data, dim, weights)?;
    Ok((
        normalized,
        NormalizationTransform {
            mu,
            sigma,
            total_mass,
        },
    ))
}

/// Maps coreset weights for the normalized view back to the original frame:
/// `u′ᵢ = ‖m‖₁ · uᵢ`, preserving the sparsity pattern. Strong and weak
/// guarantees carry over unchanged.
pub fn denormalize_weights(u: &CoresetWeights, t: &NormalizationTransform) -> CoresetWeights {
    u.scaled(t.total_mass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::RngSeed;
    use rand::Rng;

    #[test]
    fn symmetric_two_point_case() {
        let set = WeightedSet::new(vec![0.0, 2.0], 1, vec![3.0, 3.0]).unwrap();
        let (p, t) = normalize(&set).unwrap();
        assert_eq!(p.point(0), &[-1.0]);
        assert_eq!(p.point(1), &[1.0]);
        assert_eq!(p.weights(), &[0.5, 0.5]);
        assert_eq!(t.mean().coords(), &[1.0]);
        assert_eq!(t.sigma(), 1.0);
        assert_eq!(t.total_mass(), 6.0);
    }

    #[test]
    fn three_point_hand_computation() {
        let set = WeightedSet::new(vec![1.0, 1.0, 3.0, 1.0, 5.0, 1.0], 2, vec![1.0; 3]).unwrap();
        let (p, t) = normalize(&set).unwrap();
        assert_eq!(t.mean().coords(), &[3.0, 1.0]);
        let sigma = (8.0f64 / 3.0).sqrt();
        assert!((t.sigma() - sigma).abs() < 1e-15);
        for i in 0..3 {
            for (a, (q, m)) in p
                .point(i)
                .iter()
                .zip(set.point(i).iter().zip(t.mean().coords()))
            {
                assert!((a - (q - m) / sigma).abs() < 1e-15);
            }
        }
        let m = p.moments();
        assert!((m.s0 - 1.0).abs() <= 1e-10);
        assert!(m.weighted_sum().coords().iter().all(|c| c.abs() <= 1e-10));
        assert!((m.s2 - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn already_normalized_set_is_a_fixed_point() {
        let set = WeightedSet::new(vec![-1.0, 0.0, 1.0, 0.0], 2, vec![0.5, 0.5]).unwrap();
        let (p, t) = normalize(&set).unwrap();
        assert!(t.mean().coords().iter().all(|c| c.abs() <= 1e-12));
        assert!((t.sigma() - 1.0).abs() <= 1e-12);
        assert_eq!(t.total_mass(), 1.0);
        for i in 0..2 {
            for (a, b) in p.point(i).iter().zip(set.point(i)) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn identical_points_are_degenerate_and_carry_the_mean() {
        let set = WeightedSet::new(vec![2.0, 5.0, 2.0, 5.0], 2, vec![1.0, 3.0]).unwrap();
        match normalize(&set) {
            Err(Error::ZeroVariance { mean }) => assert_eq!(mean.coords(), &[2.0, 5.0]),
            other => panic!("expected ZeroVariance, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_weight_is_invalid() {
        let set = WeightedSet::new(vec![0.0, 1.0], 1, vec![1.0, 0.0]).unwrap();
        assert!(matches!(normalize(&set), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn weight_round_trip_recovers_input_mass() {
        let mut rng = RngSeed(3).rng();
        let data: Vec<f64> = (0..40).map(|_| rng.random_range(-4.0..4.0)).collect();
        let weights: Vec<f64> = (0..20).map(|_| rng.random_range(0.1..3.0)).collect();
        let set = WeightedSet::new(data, 2, weights.clone()).unwrap();
        let (p, t) = normalize(&set).unwrap();
        let u = CoresetWeights::from_dense(p.weights());
        let back = denormalize_weights(&u, &t);
        for (i, &m) in weights.iter().enumerate() {
            assert!((back.get(i) - m).abs() <= 1e-12 * m.max(1.0));
        }
    }

    #[test]
    fn query_correspondence_identity() {
        let mut rng = RngSeed(9).rng();
        let data: Vec<f64> = (0..60).map(|_| rng.random_range(-5.0..5.0)).collect();
        let weights: Vec<f64> = (0..20).map(|_| rng.random_range(0.5..2.0)).collect();
        let set = WeightedSet::new(data, 3, weights).unwrap();
        let (p, t) = normalize(&set).unwrap();
        for _ in 0..200 {
            let x = Point::new((0..3).map(|_| rng.random_range(-8.0..8.0)).collect()).unwrap();
            let y = t.map_query(&x).unwrap();
            let lhs = set.cost(&x).unwrap();
            let rhs = t.sigma() * t.sigma() * t.total_mass() * p.cost(&y).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-12));
        }
    }

    #[test]
    fn denormalized_coreset_keeps_its_empirical_error() {
        // A strong coreset built on the normalized view, mapped back with
        // u' = mass * u, shows the same empirical error on the raw set: the
        // query harness draws the same Gaussian offsets in both frames.
        use crate::frankwolfe::fw_coreset;
        use crate::types::CoresetMode;
        use crate::verify::empirical_strong_error;

        let mut rng = RngSeed(29).rng();
        let data: Vec<f64> = (0..200 * 3).map(|_| rng.random_range(-4.0..4.0)).collect();
        let weights: Vec<f64> = (0..200).map(|_| rng.random_range(0.3..2.0)).collect();
        let raw = WeightedSet::new(data, 3, weights).unwrap();
        let (p, t) = normalize(&raw).unwrap();
        let u = fw_coreset(&p, 0.3, CoresetMode::Strong).unwrap();
        let back = denormalize_weights(&u, &t);
        for seed in 0..10 {
            let on_normalized =
                empirical_strong_error(&p, &u, 500, RngSeed(seed)).unwrap();
            let on_raw = empirical_strong_error(&raw, &back, 500, RngSeed(seed)).unwrap();
            assert!(on_raw <= on_normalized + 1e-9);
        }
    }

    #[test]
    fn denormalize_is_a_plain_scaling() {
        let t = NormalizationTransform {
            mu: Point::new(vec![0.0]).unwrap(),
            sigma: 1.0,
            total_mass: 6.0,
        };
        let u = CoresetWeights::from_entries(4, [(1, 0.5)]).unwrap();
        let back = denormalize_weights(&u, &t);
        assert_eq!(back.get(1), 3.0);
        assert_eq!(back.cardinality(), 1);
    }
}
