//! Weak coresets in time sublinear in the input size. Both builders only
//! touch the points they sample, so they need index-addressable storage and
//! never scan all of the data.
//!
//! [`uniform_weak_coreset`] draws `⌈1/(εδ)⌉` uniform samples; by Chebyshev
//! its mean lands within `ε·σ²` of the true mean with probability `1−δ`.
//! [`median_of_means_coreset`] draws `k = ⌊3.5·ln(1/δ)⌋+1` disjoint groups
//! of `⌈4/ε⌉` samples and keeps the group whose mean minimizes the summed
//! distance to the other group means, which tolerates heavy tails at the
//! price of a constant-factor error inflation (`33εσ²`, probability `1−3δ`).

use rand::Rng;

use crate::error::{Error, Result};
use crate::sampling::SampledCoreset;
use crate::types::{CoresetWeights, Point, RngSeed, WeightedSet};
use crate::vecops;

/// Group means of the median-of-means builder, one per disjoint sample group.
#[derive(Debug, Clone)]
pub struct GroupMeans {
    pub means: Vec<Point>,
    pub group_size: usize,
}

/// Median-of-means output: the selected group as a uniform distribution plus
/// the group means the selection was made from.
#[derive(Debug, Clone)]
pub struct MedianOfMeansCoreset {
    pub weights: CoresetWeights,
    pub groups: GroupMeans,
    /// Index of the selected group in `groups.means`.
    pub selected: usize,
    pub full_set_fallback: bool,
}

/// `m = ⌈1/(εδ)⌉`
pub fn uniform_sample_size(eps: f64, delta: f64) -> usize {
    (1.0 / (eps * delta)).ceil() as usize
}

/// `k = ⌊3.5·log(1/δ)⌋ + 1`; the logarithm base defaults to `e`.
pub fn group_count(delta: f64, log_base: f64) -> usize {
    (3.5 * (1.0 / delta).ln() / log_base.ln()).floor() as usize + 1
}

/// `⌈4/ε⌉` points per group.
pub fn group_size(eps: f64) -> usize {
    (4.0 / eps).ceil() as usize
}

fn require_unweighted(set: &WeightedSet, what: &str) -> Result<()> {
    if set.has_uniform_weights() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} requires uniform weights (unweighted input)"
        )))
    }
}

fn uniform_fallback(set: &WeightedSet, sample_size: usize) -> CoresetWeights {
    log::warn!(
        "sample size {sample_size} >= input size {}; emitting the full set",
        set.len()
    );
    let n = set.len() as f64;
    CoresetWeights::from_dense(&vec![1.0 / n; set.len()])
}

/// Weak coreset by uniform sampling: `m = ⌈1/(εδ)⌉` i.i.d. uniform draws,
/// each weighted `1/m` (multiplicities aggregated). Runs in `O(m·d)`,
/// independent of the input size.
pub fn uniform_weak_coreset(
    set: &WeightedSet,
    eps: f64,
    delta: f64,
    seed: RngSeed,
) -> Result<SampledCoreset> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must lie in (0, 1)"));
    }
    require_unweighted(set, "uniform_weak_coreset")?;

    let m = uniform_sample_size(eps, delta);
    if m >= set.len() {
        return Ok(SampledCoreset {
            weights: uniform_fallback(set, m),
            sample_size: m,
            full_set_fallback: true,
        });
    }
    let mut rng = seed.rng();
    let mut u = CoresetWeights::empty(set.len());
    let share = 1.0 / m as f64;
    for _ in 0..m {
        u.add(rng.random_range(0..set.len()), share);
    }
    Ok(SampledCoreset {
        weights: u,
        sample_size: m,
        full_set_fallback: false,
    })
}

/// Weak coreset by median of means. See the module docs for the guarantee;
/// `delta` must lie in `(0, 0.9]`.
pub fn median_of_means_coreset(
    set: &WeightedSet,
    eps: f64,
    delta: f64,
    seed: RngSeed,
) -> Result<MedianOfMeansCoreset> {
    median_of_means_with_log_base(set, eps, delta, std::f64::consts::E, seed)
}

/// [`median_of_means_coreset`] with a configurable logarithm base in the
/// group-count formula, for sensitivity studies.
pub fn median_of_means_with_log_base(
    set: &WeightedSet,
    eps: f64,
    delta: f64,
    log_base: f64,
    seed: RngSeed,
) -> Result<MedianOfMeansCoreset> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta <= 0.9) {
        return Err(Error::invalid("delta must lie in (0, 0.9]"));
    }
    if log_base <= 1.0 || !log_base.is_finite() {
        return Err(Error::invalid("log base must exceed 1"));
    }
    require_unweighted(set, "median_of_means_coreset")?;

    let k = group_count(delta, log_base);
    let g = group_size(eps);
    let total = k * g;
    if total >= set.len() {
        return Ok(MedianOfMeansCoreset {
            weights: uniform_fallback(set, total),
            groups: GroupMeans {
                means: Vec::new(),
                group_size: g,
            },
            selected: 0,
            full_set_fallback: true,
        });
    }

    // One sample stream split sequentially into k disjoint groups.
    let mut rng = seed.rng();
    let indices: Vec<usize> = (0..total).map(|_| rng.random_range(0..set.len())).collect();
    let d = set.dim();
    let mut means = Vec::with_capacity(k);
    for group in indices.chunks(g) {
        let mut mean = vec![0.0; d];
        for &i in group {
            vecops::add_scaled(&mut mean, 1.0 / g as f64, set.point(i));
        }
        means.push(Point::new(mean)?);
    }

    // The group mean closest in aggregate distance to the others, i.e. the
    // one nearest the geometric median of the means; exhaustive over k².
    let mut selected = 0;
    let mut best = f64::INFINITY;
    for (j, mj) in means.iter().enumerate() {
        let score: f64 = means
            .iter()
            .map(|mi| vecops::dist_sq(mi.coords(), mj.coords()).sqrt())
            .sum();
        if score < best {
            best = score;
            selected = j;
        }
    }

    let share = 1.0 / g as f64;
    let mut u = CoresetWeights::empty(set.len());
    for &i in &indices[selected * g..(selected + 1) * g] {
        u.add(i, share);
    }
    Ok(MedianOfMeansCoreset {
        weights: u,
        groups: GroupMeans {
            means,
            group_size: g,
        },
        selected,
        full_set_fallback: false,
    })
}
