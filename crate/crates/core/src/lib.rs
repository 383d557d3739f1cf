//! Provable coresets for the weighted 1-mean problem.
//!
//! The cost of a query `x` against a weighted point set `(P, w)` is
//! `Σᵢ wᵢ‖pᵢ − x‖²`. A *coreset* is a sparse reweighting `u` of the same
//! points that provably approximates that cost — for every query (strong),
//! or at the optimum only (weak). This crate implements the standard
//! constructions side by side, together with oracles that verify each
//! guarantee exactly:
//!
//! - [`accurate`] — zero-error summaries: the O(1) moment statistics and
//!   deterministic subset coresets of at most `d+3` (nonnegative) or `d+2`
//!   (signed) points.
//! - [`normalize`] — the reduction mapping arbitrary inputs to normalized
//!   weighted sets (unit mass, zero mean, unit mean squared norm) and
//!   coreset weights back.
//! - [`sampling`] — randomized strong/weak coresets via sensitivity and
//!   Bernstein importance sampling.
//! - [`frankwolfe`] — deterministic strong/weak ε-coresets via Frank-Wolfe
//!   sparse approximation over the simplex.
//! - [`sublinear`] — weak coresets in time independent of `n`: uniform
//!   sampling and median of means.
//! - [`verify`] — the exact worst-case error oracle, moment certificates,
//!   weak-error evaluation and Monte-Carlo spot checks.
//! - [`stream`] — merge-reduce composition of strong coresets over chunked
//!   inputs.

pub mod accurate;
mod error;
pub mod frankwolfe;
pub mod normalize;
pub mod sampling;
pub mod stream;
pub mod sublinear;
pub mod types;
pub mod verify;

mod vecops;

pub use error::{Error, Result};
pub use types::{
    CoresetMode, CoresetWeights, MomentSummary, Point, RngSeed, WeightedSet, NORMALIZED_TOL,
};
