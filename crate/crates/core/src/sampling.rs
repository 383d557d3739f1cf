//! Randomized strong/weak coresets for normalized weighted sets by importance
//! sampling: sensitivity sampling and Bernstein sampling. The two share the
//! same sampling distribution and reweighting; only the sample-size formulas
//! differ.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::types::{CoresetMode, CoresetWeights, RngSeed, WeightedSet};
use crate::vecops;

/// Parameters of the randomized builders.
///
/// `c` is the unspecified universal constant of the sampling guarantee;
/// it defaults to one and is exposed for calibration.
#[derive(Debug, Clone, Copy)]
pub struct SamplingConfig {
    pub eps: f64,
    pub delta: f64,
    pub c: f64,
    pub mode: CoresetMode,
}

impl SamplingConfig {
    pub fn new(eps: f64, delta: f64, mode: CoresetMode) -> Result<Self> {
        SamplingConfig::with_constant(eps, delta, 1.0, mode)
    }

    pub fn with_constant(eps: f64, delta: f64, c: f64, mode: CoresetMode) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid("eps must lie in (0, 1)"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("c must be a positive real"));
        }
        Ok(SamplingConfig {
            eps,
            delta,
            c,
            mode,
        })
    }

    /// The error parameter actually fed to the sampler: strong guarantees
    /// square it, weak guarantees shrink it by the strong-to-weak constant.
    fn sensitivity_eps(&self) -> f64 {
        match self.mode {
            CoresetMode::Strong => self.eps * self.eps,
            CoresetMode::Weak => self.eps / 36.0,
        }
    }

    fn bernstein_eps(&self) -> f64 {
        match self.mode {
            CoresetMode::Strong => self.eps * self.eps,
            CoresetMode::Weak => self.eps / 144.0,
        }
    }
}

/// A randomized build result. When the formula sample size reaches the input
/// size the builder falls back to the full set and flags it: a coreset larger
/// than the data is pointless.
#[derive(Debug, Clone)]
pub struct SampledCoreset {
    pub weights: CoresetWeights,
    /// The formula sample size (an upper bound on the cardinality).
    pub sample_size: usize,
    pub full_set_fallback: bool,
}

/// `⌈(2c/ε′)(d + ln(1/δ))⌉`, the number of draws of sensitivity sampling.
pub fn sensitivity_sample_size(cfg: &SamplingConfig, dim: usize) -> usize {
    let eps = cfg.sensitivity_eps();
    ((2.0 * cfg.c / eps) * (dim as f64 + (1.0 / cfg.delta).ln())).ceil() as usize
}

/// `⌈4·ln((d+1)/δ)/ε′⌉`, the number of draws of Bernstein sampling.
pub fn bernstein_sample_size(cfg: &SamplingConfig, dim: usize) -> usize {
    let eps = cfg.bernstein_eps();
    (4.0 * ((dim as f64 + 1.0) / cfg.delta).ln() / eps).ceil() as usize
}

/// The sensitivity sampling probabilities `sᵢ = (1 + ‖pᵢ‖²)/(2n)` for a
/// normalized, uniformly weighted set. They sum to one: the total
/// sensitivity of the 1-mean problem is two.
pub fn sensitivity_distribution(set: &WeightedSet) -> Result<Vec<f64>> {
    set.require_normalized("sensitivity sampling")?;
    if !set.has_uniform_weights() {
        return Err(Error::invalid(
            "sensitivity sampling requires uniform weights w = (1/n, ..., 1/n)",
        ));
    }
    let n = set.len() as f64;
    Ok((0..set.len())
        .map(|i| (1.0 + vecops::norm_sq(set.point(i))) / (2.0 * n))
        .collect())
}

/// The Bernstein sampling probabilities `sᵢ ∝ wᵢ(1 + ‖pᵢ‖²)`; for a
/// normalized set the normalizer equals two. General positive weights are
/// allowed.
pub fn bernstein_distribution(set: &WeightedSet) -> Result<Vec<f64>> {
    set.require_normalized("bernstein sampling")?;
    let raw: Vec<f64> = (0..set.len())
        .map(|i| set.weight(i) * (1.0 + vecops::norm_sq(set.point(i))))
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|s| s / total).collect())
}

/// Strong or weak coreset by sensitivity sampling. Draws
/// [`sensitivity_sample_size`] i.i.d. indices from the sensitivity
/// distribution and reweights by inverse probability:
/// `uᵢ = kᵢ·wᵢ/(sᵢ·|S|)` with `kᵢ` the multiplicity of index `i`.
pub fn sensitivity_coreset(
    set: &WeightedSet,
    cfg: &SamplingConfig,
    seed: RngSeed,
) -> Result<SampledCoreset> {
    let dist = sensitivity_distribution(set)?;
    let m = sensitivity_sample_size(cfg, set.dim());
    if m >= set.len() {
        return Ok(full_set_fallback(set, m));
    }
    Ok(SampledCoreset {
        weights: sensitivity_reweight(set, &dist, m, seed)?,
        sample_size: m,
        full_set_fallback: false,
    })
}

fn sensitivity_reweight(
    set: &WeightedSet,
    dist: &[f64],
    m: usize,
    seed: RngSeed,
) -> Result<CoresetWeights> {
    let counts = draw_counts(dist, m, seed)?;
    CoresetWeights::from_entries(
        set.len(),
        counts
            .into_iter()
            .map(|(i, k)| (i, k as f64 * set.weight(i) / (dist[i] * m as f64))),
    )
}

/// Strong or weak coreset by Bernstein sampling. Draws
/// [`bernstein_sample_size`] i.i.d. indices from the Bernstein distribution;
/// the reweighting `uᵢ = 2cᵢ/(k·‖(pᵢ,1)‖²)` makes
/// `Σuᵢ‖pᵢ‖² + Σuᵢ = 2` hold exactly.
pub fn bernstein_coreset(
    set: &WeightedSet,
    cfg: &SamplingConfig,
    seed: RngSeed,
) -> Result<SampledCoreset> {
    let dist = bernstein_distribution(set)?;
    let k = bernstein_sample_size(cfg, set.dim());
    if k >= set.len() {
        return Ok(full_set_fallback(set, k));
    }
    Ok(SampledCoreset {
        weights: bernstein_reweight(set, &dist, k, seed)?,
        sample_size: k,
        full_set_fallback: false,
    })
}

fn bernstein_reweight(
    set: &WeightedSet,
    dist: &[f64],
    k: usize,
    seed: RngSeed,
) -> Result<CoresetWeights> {
    let counts = draw_counts(dist, k, seed)?;
    CoresetWeights::from_entries(
        set.len(),
        counts.into_iter().map(|(i, c)| {
            let lifted_norm_sq = 1.0 + vecops::norm_sq(set.point(i));
            (i, 2.0 * c as f64 / (k as f64 * lifted_norm_sq))
        }),
    )
}

fn full_set_fallback(set: &WeightedSet, sample_size: usize) -> SampledCoreset {
    log::warn!(
        "sample size {sample_size} >= input size {}; emitting the full set",
        set.len()
    );
    SampledCoreset {
        weights: CoresetWeights::from_dense(set.weights()),
        sample_size,
        full_set_fallback: true,
    }
}

/// Multiplicities of `m` i.i.d. draws from the categorical distribution.
fn draw_counts(dist: &[f64], m: usize, seed: RngSeed) -> Result<BTreeMap<usize, usize>> {
    let index = WeightedIndex::new(dist)
        .map_err(|e| Error::invalid(format!("invalid sampling distribution: {e}")))?;
    let mut rng = seed.rng();
    let mut counts = BTreeMap::new();
    for _ in 0..m {
        *counts.entry(index.sample(&mut rng)).or_insert(0usize) += 1;
    }
    Ok(counts)
}
