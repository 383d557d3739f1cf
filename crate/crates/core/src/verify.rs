//! Oracles that certify coreset quality.
//!
//! For a normalized weighted set the relative cost discrepancy of a
//! reweighting `u` has a closed-form supremum over all queries, so strong
//! guarantees can be checked exactly rather than sampled. The module also
//! provides the three-moment sufficient check (max drift `ε₀` certifies a
//! strong `2ε₀`-coreset), the exact weak-error evaluation (the cost ratio at
//! the coreset mean equals the squared norm of that mean), and a Monte-Carlo
//! query sampler as an independent lower bound.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::normalize::normalize;
use crate::types::{CoresetWeights, Point, RngSeed, WeightedSet, NORMALIZED_TOL};
use crate::vecops;

/// The three moment discrepancies of `u` against a normalized set.
/// `max ≤ ε` certifies a strong `2ε`-coreset.
#[derive(Debug, Clone, Copy)]
pub struct MomentDiscrepancy {
    /// `‖Σuᵢpᵢ‖` — drift of the weighted sum from the origin.
    pub mean_drift: f64,
    /// `|1 − Σuᵢ|` — drift of the total mass from one.
    pub mass_drift: f64,
    /// `|1 − Σuᵢ‖pᵢ‖²|` — drift of the weighted squared norm from one.
    pub variance_drift: f64,
}

impl MomentDiscrepancy {
    pub fn max(&self) -> f64 {
        self.mean_drift.max(self.mass_drift).max(self.variance_drift)
    }

    /// The strong-coreset error certified by these drifts.
    pub fn certified_eps(&self) -> f64 {
        2.0 * self.max()
    }
}

/// Weak-coreset error of `u`: the squared norm of the coreset mean and the
/// excess cost ratio it induces. The two agree up to roundoff on normalized
/// inputs, which is itself a useful cross-check.
#[derive(Debug, Clone, Copy)]
pub struct WeakError {
    /// `‖s̄‖²` for the coreset mean `s̄ = Σ(uᵢ/‖u‖₁)pᵢ`.
    pub mean_norm_sq: f64,
    /// `cost(s̄)/min_x cost(x) − 1`, both sides evaluated on the full set.
    pub cost_ratio: f64,
}

/// Verification summary assembled by callers; fields are filled only for the
/// checks actually run.
#[derive(Debug, Clone, Default)]
pub struct ErrorReport {
    pub worst_case: Option<f64>,
    pub empirical: Option<f64>,
    pub weak: Option<WeakError>,
    pub moments: Option<MomentDiscrepancy>,
    pub certified_eps: Option<f64>,
}

/// Result of the strong-to-weak reduction check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReductionCheck {
    /// Preconditions unmet (`ε ≥ 1/36` or the strong bound did not hold).
    Skipped,
    Holds { weak_ratio: f64, bound: f64 },
    Violated { weak_ratio: f64, bound: f64 },
}

/// Direct summation of the three moment drifts of `u` against a normalized
/// set.
pub fn moment_check(set: &WeightedSet, u: &CoresetWeights) -> Result<MomentDiscrepancy> {
    set.require_normalized("moment_check")?;
    let m = u.moments(set);
    Ok(MomentDiscrepancy {
        mean_drift: m.weighted_sum().norm_sq().sqrt(),
        mass_drift: (1.0 - m.s0).abs(),
        variance_drift: (1.0 - m.s2).abs(),
    })
}

/// The exact supremum over all queries of the relative cost discrepancy
/// between `(P, w)` and `(P, u)`.
///
/// On a normalized set the denominator is `1 + ‖x‖²`, and with
/// `A = Σ(wᵢ−uᵢ)‖pᵢ‖²`, `C = Σ(wᵢ−uᵢ)`, `b = Σ(wᵢ−uᵢ)pᵢ` the supremum of
/// `|A + C‖x‖² − 2b·x| / (1 + ‖x‖²)` reduces to a one-dimensional problem
/// along `b` whose critical points solve a quadratic; the far-field limit is
/// `|C|`. Raw inputs are normalized first, which leaves the error invariant.
pub fn worst_case_strong_error(set: &WeightedSet, u: &CoresetWeights) -> Result<f64> {
    if !set.is_normalized(NORMALIZED_TOL) {
        let (normalized, t) = normalize(set)?;
        let scaled = u.scaled(1.0 / t.total_mass());
        return worst_case_strong_error_normalized(&normalized, &scaled);
    }
    worst_case_strong_error_normalized(set, u)
}

fn worst_case_strong_error_normalized(set: &WeightedSet, u: &CoresetWeights) -> Result<f64> {
    let d = set.dim();
    let mut a = 0.0;
    let mut c = 0.0;
    let mut b = vec![0.0; d];
    for i in 0..set.len() {
        let dw = set.weight(i) - u.get(i);
        let p = set.point(i);
        a += dw * vecops::norm_sq(p);
        c += dw;
        vecops::add_scaled(&mut b, dw, p);
    }
    let bn = vecops::norm_sq(&b).sqrt();

    // |A| and |C| are attained at x = 0 and x -> infinity.
    let mut best = a.abs().max(c.abs());
    if bn > f64::MIN_POSITIVE {
        // Critical points of (A + Ct^2 - 2Bt)/(1 + t^2) over the b-axis:
        // roots of B t^2 + (C - A) t - B = 0. The discriminant is positive,
        // so both are real; the sign-flipped axis is covered by t -> -t.
        let phi = |t: f64| (a + c * t * t - 2.0 * bn * t) / (1.0 + t * t);
        let half = (c - a) / (2.0 * bn);
        let disc = (half * half + 1.0).sqrt();
        for t in [-half + disc, -half - disc] {
            best = best.max(phi(t).abs());
        }
    }
    Ok(best)
}

/// Maximum relative cost discrepancy over sampled queries: Gaussian draws
/// around the weighted mean at scales `σ·{0.1, 1, 10}`, probing the regimes
/// where each moment term dominates. A lower bound on the true supremum;
/// works on raw (non-normalized) sets. Queries with zero full-set cost are
/// skipped.
pub fn empirical_strong_error(
    set: &WeightedSet,
    u: &CoresetWeights,
    queries: usize,
    seed: RngSeed,
) -> Result<f64> {
    if queries == 0 {
        return Err(Error::invalid("need at least one query"));
    }
    let mu = set.weighted_mean()?;
    let total = set.total_weight();
    let sigma = (set.cost(&mu)? / total).sqrt().max(f64::MIN_POSITIVE);

    const SCALES: [f64; 3] = [0.1, 1.0, 10.0];
    let mut rng = seed.rng();
    let mut worst = 0.0f64;
    for q in 0..queries {
        let scale = SCALES[q % SCALES.len()];
        let x = Point::new(
            mu.coords()
                .iter()
                .map(|m| m + sigma * scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        )?;
        let full = set.cost(&x)?;
        if full == 0.0 {
            continue;
        }
        let reduced = set.cost_with(u, &x)?;
        worst = worst.max((full - reduced).abs() / full);
    }
    Ok(worst)
}

/// Exact weak error of `u` on a normalized set: `‖s̄‖²` and the directly
/// evaluated excess cost ratio at `s̄`. Requires `‖u‖₁ > 0`.
pub fn weak_error(set: &WeightedSet, u: &CoresetWeights) -> Result<WeakError> {
    set.require_normalized("weak_error")?;
    let l1 = u.l1_norm();
    if l1 == 0.0 {
        return Err(Error::invalid("coreset has zero total mass"));
    }
    let mut s = vec![0.0; set.dim()];
    for (i, ui) in u.iter() {
        vecops::add_scaled(&mut s, ui / l1, set.point(i));
    }
    let s_bar = Point::new(s)?;
    let mean = set.weighted_mean()?;
    let opt = set.cost(&mean)?;
    let at_coreset_mean = set.cost(&s_bar)?;
    Ok(WeakError {
        mean_norm_sq: s_bar.norm_sq(),
        cost_ratio: at_coreset_mean / opt - 1.0,
    })
}

/// Property test of the strong-to-weak reduction: a strong `√ε`-coreset must
/// be a weak `36ε`-coreset when `ε < 1/36`. Returns [`ReductionCheck::Skipped`]
/// when the preconditions do not apply.
pub fn strong_to_weak_check(
    set: &WeightedSet,
    u: &CoresetWeights,
    eps: f64,
) -> Result<ReductionCheck> {
    if !(eps > 0.0 && eps < 1.0 / 36.0) {
        return Ok(ReductionCheck::Skipped);
    }
    let strong = worst_case_strong_error(set, u)?;
    if strong > eps.sqrt() {
        return Ok(ReductionCheck::Skipped);
    }
    let weak = weak_error(set, u)?;
    let bound = 36.0 * eps;
    if weak.cost_ratio <= bound + 1e-9 {
        Ok(ReductionCheck::Holds {
            weak_ratio: weak.cost_ratio,
            bound,
        })
    } else {
        Ok(ReductionCheck::Violated {
            weak_ratio: weak.cost_ratio,
            bound,
        })
    }
}
