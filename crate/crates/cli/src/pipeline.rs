//! Shared build/verify plumbing: algorithm dispatch on raw inputs, with
//! normalization wrapped around the builders that need it and coreset
//! weights mapped back to the input frame.

use anyhow::{anyhow, bail, Result};
use meancore::accurate::{caratheodory_coreset, signed_subset_coreset};
use meancore::frankwolfe::fw_coreset;
use meancore::normalize::{denormalize_weights, normalize, NormalizationTransform};
use meancore::sampling::{
    bernstein_coreset, bernstein_sample_size, sensitivity_coreset, sensitivity_sample_size,
    SamplingConfig,
};
use meancore::sublinear::{
    group_count, group_size, median_of_means_with_log_base, uniform_sample_size,
    uniform_weak_coreset,
};
use meancore::{CoresetMode, CoresetWeights, Error, RngSeed, WeightedSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    Stats,
    Cara,
    Signed,
    Sens,
    Bern,
    Fw,
    Uniform,
    Mom,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Stats => "stats",
            Algo::Cara => "cara",
            Algo::Signed => "signed",
            Algo::Sens => "sens",
            Algo::Bern => "bern",
            Algo::Fw => "fw",
            Algo::Uniform => "uniform",
            Algo::Mom => "mom",
        }
    }

    pub fn needs_eps(self) -> bool {
        !matches!(self, Algo::Stats | Algo::Cara | Algo::Signed)
    }

    pub fn randomized(self) -> bool {
        matches!(self, Algo::Sens | Algo::Bern | Algo::Uniform | Algo::Mom)
    }

    /// How a build of this algorithm is judged in `bench` and `--strict`.
    pub fn success_rule(self, mode: CoresetMode) -> SuccessRule {
        match self {
            Algo::Stats | Algo::Cara | Algo::Signed => SuccessRule::Accurate,
            Algo::Uniform => SuccessRule::WeakRatio { factor: 1.0 },
            Algo::Mom => SuccessRule::WeakRatio { factor: 33.0 },
            Algo::Sens | Algo::Bern | Algo::Fw => match mode {
                CoresetMode::Strong => SuccessRule::WorstCase,
                CoresetMode::Weak => SuccessRule::WeakRatio { factor: 1.0 },
            },
        }
    }

    /// The formula coreset size, where one exists.
    pub fn formula_size(
        self,
        dim: usize,
        eps: f64,
        delta: f64,
        c: f64,
        log_base: f64,
        mode: CoresetMode,
    ) -> Option<usize> {
        match self {
            Algo::Stats => None,
            Algo::Cara => Some(dim + 3),
            Algo::Signed => Some(dim + 2),
            Algo::Sens => {
                let cfg = SamplingConfig::with_constant(eps, delta, c, mode).ok()?;
                Some(sensitivity_sample_size(&cfg, dim))
            }
            Algo::Bern => {
                let cfg = SamplingConfig::with_constant(eps, delta, c, mode).ok()?;
                Some(bernstein_sample_size(&cfg, dim))
            }
            Algo::Fw => {
                let inner = match mode {
                    CoresetMode::Strong => (eps / 4.0) * (eps / 4.0),
                    CoresetMode::Weak => eps / 576.0,
                };
                Some((8.0 / inner).ceil() as usize)
            }
            Algo::Uniform => Some(uniform_sample_size(eps, delta)),
            Algo::Mom => Some(group_count(delta, log_base) * group_size(eps)),
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stats" => Ok(Algo::Stats),
            "cara" => Ok(Algo::Cara),
            "signed" => Ok(Algo::Signed),
            "sens" => Ok(Algo::Sens),
            "bern" => Ok(Algo::Bern),
            "fw" => Ok(Algo::Fw),
            "uniform" => Ok(Algo::Uniform),
            "mom" => Ok(Algo::Mom),
            other => bail!(
                "unknown algorithm {other:?} (expected stats|cara|signed|sens|bern|fw|uniform|mom)"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum SuccessRule {
    /// Accurate constructions: empirical error at roundoff scale.
    Accurate,
    /// Exact worst-case error within the target eps.
    WorstCase,
    /// Weak cost ratio within `factor * eps`.
    WeakRatio { factor: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct BuildParams {
    pub eps: f64,
    pub delta: f64,
    pub mode: CoresetMode,
    pub c: f64,
    pub log_base: f64,
    pub seed: RngSeed,
}

/// Builds one coreset on a raw input set. Returns the weights in the input
/// frame. Degenerate inputs (all points identical) yield the exact
/// single-point coreset for the builders that need a normalized view.
pub fn build_coreset(set: &WeightedSet, algo: Algo, p: &BuildParams) -> Result<CoresetWeights> {
    match algo {
        Algo::Stats => bail!("stats has no index-weight coreset; use the summary output"),
        Algo::Cara => caratheodory_coreset(set)
            .map_err(|e| anyhow!("caratheodory build failed: {e}")),
        Algo::Signed => Ok(signed_subset_coreset(set)),
        Algo::Sens => with_normalized(set, |norm, t| {
            let cfg = SamplingConfig::with_constant(p.eps, p.delta, p.c, p.mode)?;
            let out = sensitivity_coreset(norm, &cfg, p.seed)?;
            Ok(denormalize_weights(&out.weights, t))
        }),
        Algo::Bern => with_normalized(set, |norm, t| {
            let cfg = SamplingConfig::with_constant(p.eps, p.delta, p.c, p.mode)?;
            let out = bernstein_coreset(norm, &cfg, p.seed)?;
            Ok(denormalize_weights(&out.weights, t))
        }),
        Algo::Fw => with_normalized(set, |norm, t| {
            let u = fw_coreset(norm, p.eps, p.mode)?;
            Ok(denormalize_weights(&u, t))
        }),
        Algo::Uniform => Ok(uniform_weak_coreset(set, p.eps, p.delta, p.seed)
            .map_err(|e| anyhow!("uniform build failed: {e}"))?
            .weights),
        Algo::Mom => {
            Ok(
                median_of_means_with_log_base(set, p.eps, p.delta, p.log_base, p.seed)
                    .map_err(|e| anyhow!("median-of-means build failed: {e}"))?
                    .weights,
            )
        }
    }
}

fn with_normalized(
    set: &WeightedSet,
    f: impl FnOnce(&WeightedSet, &NormalizationTransform) -> meancore::Result<CoresetWeights>,
) -> Result<CoresetWeights> {
    match normalize(set) {
        Ok((norm, t)) => f(&norm, &t).map_err(|e| anyhow!("build failed: {e}")),
        Err(Error::ZeroVariance { .. }) => {
            // All points identical: the total mass on any one of them is an
            // exact coreset.
            let mut u = CoresetWeights::empty(set.len());
            u.set(0, set.total_weight());
            Ok(u)
        }
        Err(e) => Err(anyhow!("cannot normalize the input: {e}")),
    }
}

/// Normalized view of a raw set plus the coreset mapped into that frame
/// (divide by the total mass), for the exact oracles.
pub fn normalized_frame(
    set: &WeightedSet,
    u: &CoresetWeights,
) -> Result<(WeightedSet, CoresetWeights)> {
    let (norm, t) = normalize(set).map_err(|e| anyhow!("cannot normalize the input: {e}"))?;
    Ok((norm, u.scaled(1.0 / t.total_mass())))
}
