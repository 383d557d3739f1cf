//! Merge-reduce composition of strong coresets over a chunked input.
//!
//! The input is split into contiguous chunks; each chunk is reduced to a
//! coreset, and pairs of coresets are merged (a lossless union of weighted
//! indices) and re-reduced up a binary tree. Every reduce multiplies the
//! guarantee, so a tree applying `L` reduces along its deepest path yields a
//! strong error of at most `(1+ε)^L − 1`. The final root merge is emitted
//! without an extra reduce.

use crate::accurate::{caratheodory_coreset, signed_subset_coreset};
use crate::error::{Error, Result};
use crate::frankwolfe::fw_coreset;
use crate::normalize::{denormalize_weights, normalize};
use crate::sampling::{bernstein_coreset, SamplingConfig};
use crate::types::{CoresetMode, CoresetWeights, RngSeed, WeightedSet};

/// Reduction algorithms usable inside the tree: all produce strong coresets
/// for arbitrary positively weighted inputs, so they compose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StreamAlgo {
    /// Accurate nonnegative subset coreset (zero error).
    Caratheodory,
    /// Accurate signed subset coreset (zero error).
    SignedSubset,
    /// Deterministic strong ε-coreset via Frank-Wolfe.
    FrankWolfe { eps: f64 },
    /// Randomized strong ε-coreset via Bernstein sampling.
    Bernstein { eps: f64, delta: f64 },
}

/// Per-level log line of the merge-reduce tree.
#[derive(Debug, Clone)]
pub struct StreamLevel {
    pub level: usize,
    pub coresets: usize,
    pub total_entries: usize,
}

#[derive(Debug, Clone)]
pub struct StreamResult {
    /// Final coreset over the original input indices.
    pub weights: CoresetWeights,
    /// Maximum number of reduce applications along any leaf-root path.
    pub depth: usize,
    pub levels: Vec<StreamLevel>,
}

impl StreamResult {
    /// `(1+ε)^depth − 1`, the composition bound on the final strong error.
    pub fn error_bound(&self, eps: f64) -> f64 {
        (1.0 + eps).powi(self.depth as i32) - 1.0
    }
}

/// Builds a reducer closure for `algo`. Degenerate subsets (a single point,
/// or all points identical) are themselves exact coresets and pass through
/// unchanged; randomized reducers derive one seed per tree node.
pub fn strong_reducer(
    algo: StreamAlgo,
    seed: RngSeed,
) -> impl FnMut(&WeightedSet) -> Result<CoresetWeights> {
    let mut node = 0u64;
    move |subset: &WeightedSet| {
        node += 1;
        match algo {
            StreamAlgo::Caratheodory => caratheodory_coreset(subset),
            StreamAlgo::SignedSubset => Ok(signed_subset_coreset(subset)),
            StreamAlgo::FrankWolfe { eps } => match normalize(subset) {
                Ok((normalized, t)) => {
                    let u = fw_coreset(&normalized, eps, CoresetMode::Strong)?;
                    Ok(denormalize_weights(&u, &t))
                }
                Err(Error::ZeroVariance { .. }) => Ok(exact_point_mass(subset)),
                Err(Error::InvalidArgument(_)) if subset.len() < 2 => {
                    Ok(CoresetWeights::from_dense(subset.weights()))
                }
                Err(e) => Err(e),
            },
            StreamAlgo::Bernstein { eps, delta } => match normalize(subset) {
                Ok((normalized, t)) => {
                    let cfg = SamplingConfig::new(eps, delta, CoresetMode::Strong)?;
                    let out = bernstein_coreset(&normalized, &cfg, seed.derive(node))?;
                    Ok(denormalize_weights(&out.weights, &t))
                }
                Err(Error::ZeroVariance { .. }) => Ok(exact_point_mass(subset)),
                Err(Error::InvalidArgument(_)) if subset.len() < 2 => {
                    Ok(CoresetWeights::from_dense(subset.weights()))
                }
                Err(e) => Err(e),
            },
        }
    }
}

/// All points coincide: the whole mass on the first index is exact.
fn exact_point_mass(subset: &WeightedSet) -> CoresetWeights {
    let mut u = CoresetWeights::empty(subset.len());
    u.set(0, subset.total_weight());
    u
}

/// Runs the merge-reduce tree over `set` split into contiguous chunks of
/// `chunk` points. A chunk count of one degenerates to a single reduce.
pub fn merge_reduce<F>(set: &WeightedSet, chunk: usize, mut reduce: F) -> Result<StreamResult>
where
    F: FnMut(&WeightedSet) -> Result<CoresetWeights>,
{
    if chunk < 2 {
        return Err(Error::invalid("chunk size must be at least 2"));
    }
    let n = set.len();

    // Leaf reduces over contiguous chunks, remapped to global indices.
    let mut nodes: Vec<(CoresetWeights, usize)> = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + chunk).min(n);
        let indices: Vec<usize> = (start..end).collect();
        let weights = indices.iter().map(|&i| set.weight(i)).collect();
        let subset = set.subset(&indices, weights)?;
        let local = reduce(&subset)?;
        nodes.push((local.remap(n, |i| indices[i]), 1));
        start = end;
    }

    let mut levels = vec![StreamLevel {
        level: 0,
        coresets: nodes.len(),
        total_entries: nodes.iter().map(|(u, _)| u.cardinality()).sum(),
    }];

    let mut level = 0;
    while nodes.len() > 1 {
        level += 1;
        let mut next: Vec<(CoresetWeights, usize, bool)> = Vec::new();
        let mut it = nodes.into_iter();
        while let Some((a, da)) = it.next() {
            match it.next() {
                Some((b, db)) => next.push((a.merge(&b)?, da.max(db), true)),
                None => next.push((a, da, false)), // odd one carries upward
            }
        }
        let final_round = next.len() == 1;
        let mut reduced: Vec<(CoresetWeights, usize)> = Vec::new();
        for (u, depth, merged) in next {
            if final_round || !merged {
                reduced.push((u, depth));
                continue;
            }
            // Re-reduce the merged coreset: materialize it as a weighted
            // subset of the original points.
            let indices: Vec<usize> = u.iter().map(|(i, _)| i).collect();
            let weights: Vec<f64> = u.iter().map(|(_, w)| w).collect();
            let subset = set.subset(&indices, weights)?;
            let local = reduce(&subset)?;
            reduced.push((local.remap(n, |i| indices[i]), depth + 1));
        }
        nodes = reduced;
        levels.push(StreamLevel {
            level,
            coresets: nodes.len(),
            total_entries: nodes.iter().map(|(u, _)| u.cardinality()).sum(),
        });
    }

    let (weights, depth) = nodes.pop().expect("at least one chunk");
    Ok(StreamResult {
        weights,
        depth,
        levels,
    })
}
