//! Domain types and exact cost evaluation for the weighted 1-mean problem.
//!
//! A [`WeightedSet`] holds the input `(P, w)`; a [`CoresetWeights`] is the
//! sparse reweighting `u` every construction outputs; a [`MomentSummary`] is
//! the `(Σw, Σw·p, Σw‖p‖²)` sufficient statistic from which the cost
//! `Σᵢ wᵢ‖pᵢ − x‖²` of any query `x` can be recovered exactly.

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vecops;

/// Absolute tolerance used when checking the normalized-set properties.
pub const NORMALIZED_TOL: f64 = 1e-8;

/// A dense point (or query) in `ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Requires `d ≥ 1` and finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have dimension >= 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        vecops::norm_sq(&self.0)
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// `n` points of equal dimension with a parallel weight vector; the universal
/// input. Points are stored as one flat row-major buffer.
#[derive(Debug, Clone)]
pub struct WeightedSet {
    data: Vec<f64>,
    dim: usize,
    weights: Vec<f64>,
    // Cached at construction so preconditions of the sublinear builders stay
    // O(1); the set is immutable after construction.
    total_weight: f64,
    uniform: bool,
}

impl WeightedSet {
    /// `data` is row-major `n × dim`. Requires `n ≥ 1`, finite entries and
    /// `|weights| = n`.
    pub fn new(data: Vec<f64>, dim: usize, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        if data.is_empty() || !data.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "point buffer length {} is not a positive multiple of dimension {dim}",
                data.len()
            )));
        }
        let n = data.len() / dim;
        if weights.len() != n {
            return Err(Error::invalid(format!(
                "{} weights for {n} points",
                weights.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights must be finite"));
        }
        let total_weight: f64 = weights.iter().sum();
        let target = total_weight / n as f64;
        let uniform = total_weight != 0.0
            && weights
                .iter()
                .all(|&w| (w - target).abs() <= 1e-9 * target.abs());
        Ok(WeightedSet {
            data,
            dim,
            weights,
            total_weight,
            uniform,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("points must share one dimension"));
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            data.extend_from_slice(r);
        }
        WeightedSet::new(data, dim, weights)
    }

    /// All weights set to one (unweighted semantics).
    pub fn with_unit_weights(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        let n = data.len() / dim;
        WeightedSet::new(data, dim, vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires n >= 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn flat_points(&self) -> &[f64] {
        &self.data
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// The cost `Σᵢ wᵢ‖pᵢ − x‖²` by direct summation.
    pub fn cost(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let xs = x.coords();
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.weights[i] * vecops::dist_sq(self.point(i), xs);
        }
        Ok(acc)
    }

    /// The cost of the reweighted set `(P, u)` at `x`, summing only over the
    /// stored entries of `u`.
    pub fn cost_with(&self, u: &CoresetWeights, x: &Point) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let xs = x.coords();
        let mut acc = 0.0;
        for (i, ui) in u.iter() {
            acc += ui * vecops::dist_sq(self.point(i), xs);
        }
        Ok(acc)
    }

    /// Exact `(Σw, Σw·p, Σw‖p‖²)` in a single pass.
    pub fn moments(&self) -> MomentSummary {
        let mut s0 = 0.0;
        let mut s1 = vec![0.0; self.dim];
        let mut s2 = 0.0;
        for i in 0..self.len() {
            let w = self.weights[i];
            let p = self.point(i);
            s0 += w;
            vecops::add_scaled(&mut s1, w, p);
            s2 += w * vecops::norm_sq(p);
        }
        MomentSummary {
            s0,
            s1: Point(s1),
            s2,
        }
    }

    /// Kahan-compensated variant of [`moments`](Self::moments) for very large
    /// inputs (n beyond ~10⁶) where plain accumulation starts to drift.
    pub fn moments_compensated(&self) -> MomentSummary {
        let mut s0 = Kahan::default();
        let mut s1: Vec<Kahan> = vec![Kahan::default(); self.dim];
        let mut s2 = Kahan::default();
        for i in 0..self.len() {
            let w = self.weights[i];
            let p = self.point(i);
            s0.add(w);
            for (acc, &c) in s1.iter_mut().zip(p) {
                acc.add(w * c);
            }
            s2.add(w * vecops::norm_sq(p));
        }
        MomentSummary {
            s0: s0.value(),
            s1: Point(s1.iter().map(Kahan::value).collect()),
            s2: s2.value(),
        }
    }

    /// The unconstrained minimizer `Σwᵢpᵢ / Σwᵢ`.
    pub fn weighted_mean(&self) -> Result<Point> {
        let m = self.moments();
        if m.s0 == 0.0 {
            return Err(Error::ZeroMass);
        }
        let coords = m.s1.coords().iter().map(|c| c / m.s0).collect();
        Ok(Point(coords))
    }

    /// The sub-set of points at `indices`, reweighted by `weights`.
    pub fn subset(&self, indices: &[usize], weights: Vec<f64>) -> Result<WeightedSet> {
        if indices.len() != weights.len() {
            return Err(Error::invalid("index/weight length mismatch"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::invalid(format!("index {bad} out of range")));
        }
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        WeightedSet::new(data, self.dim, weights)
    }

    /// Checks the three normalized-set properties: unit total weight, zero
    /// weighted mean, unit weighted mean squared norm.
    pub fn is_normalized(&self, tol: f64) -> bool {
        let m = self.moments();
        (m.s0 - 1.0).abs() <= tol
            && m.s1.coords().iter().all(|c| c.abs() <= tol)
            && (m.s2 - 1.0).abs() <= tol
    }

    pub(crate) fn require_normalized(&self, what: &str) -> Result<()> {
        if self.is_normalized(NORMALIZED_TOL) {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "{what} requires a normalized weighted set (unit mass, zero mean, unit mean squared norm); normalize the input first"
            )))
        }
    }

    /// True when all weights are equal within 1e-9 relative (cached at
    /// construction, so this is O(1)).
    pub fn has_uniform_weights(&self) -> bool {
        self.uniform
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// The `(s0, s1, s2) = (Σw, Σw·p, Σw‖p‖²)` sufficient statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSummary {
    pub s0: f64,
    s1: Point,
    pub s2: f64,
}

impl MomentSummary {
    pub fn new(s0: f64, s1: Point, s2: f64) -> Self {
        MomentSummary { s0, s1, s2 }
    }

    pub fn weighted_sum(&self) -> &Point {
        &self.s1
    }

    pub fn dim(&self) -> usize {
        self.s1.dim()
    }

    /// Evaluates `s2 − 2·x·s1 + s0‖x‖²` in `O(d)` time; equals the direct
    /// cost up to accumulation roundoff.
    pub fn eval(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.s1.dim() {
            return Err(Error::DimMismatch {
                expected: self.s1.dim(),
                got: x.dim(),
            });
        }
        Ok(self.s2 - 2.0 * vecops::dot(x.coords(), self.s1.coords()) + self.s0 * x.norm_sq())
    }

    pub fn mean(&self) -> Result<Point> {
        if self.s0 == 0.0 {
            return Err(Error::ZeroMass);
        }
        Point::new(self.s1.coords().iter().map(|c| c / self.s0).collect())
    }

    /// Componentwise sum; the summary of a disjoint union is the sum of the
    /// parts' summaries.
    pub fn merge(&self, other: &MomentSummary) -> Result<MomentSummary> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let s1 = self
            .s1
            .coords()
            .iter()
            .zip(other.s1.coords())
            .map(|(a, b)| a + b)
            .collect();
        Ok(MomentSummary {
            s0: self.s0 + other.s0,
            s1: Point(s1),
            s2: self.s2 + other.s2,
        })
    }
}

/// Sparse reweighting over the indices of a source set; the universal output.
/// Only nonzero entries are stored, so `cardinality = ‖u‖₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoresetWeights {
    entries: BTreeMap<usize, f64>,
    source_len: usize,
}

impl CoresetWeights {
    pub fn empty(source_len: usize) -> Self {
        CoresetWeights {
            entries: BTreeMap::new(),
            source_len,
        }
    }

    pub fn from_entries(
        source_len: usize,
        entries: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        let mut u = CoresetWeights::empty(source_len);
        for (i, w) in entries {
            if i >= source_len {
                return Err(Error::invalid(format!(
                    "coreset index {i} out of range for source of size {source_len}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::invalid("coreset weights must be finite"));
            }
            u.add(i, w);
        }
        Ok(u)
    }

    /// Dense weights to sparse form, dropping exact zeros.
    pub fn from_dense(weights: &[f64]) -> Self {
        let entries = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (i, w))
            .collect();
        CoresetWeights {
            entries,
            source_len: weights.len(),
        }
    }

    /// Accumulates `w` onto index `i`; entries that cancel to exactly zero
    /// are removed.
    pub fn add(&mut self, i: usize, w: f64) {
        debug_assert!(i < self.source_len);
        let e = self.entries.entry(i).or_insert(0.0);
        *e += w;
        if *e == 0.0 {
            self.entries.remove(&i);
        }
    }

    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(i < self.source_len);
        if w == 0.0 {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, w);
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries.get(&i).copied().unwrap_or(0.0)
    }

    /// `‖u‖₀`, the coreset size.
    pub fn cardinality(&self) -> usize {
        self.entries.len()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&i, &w)| (i, w))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.source_len];
        for (i, w) in self.iter() {
            dense[i] = w;
        }
        dense
    }

    /// `Σᵢ uᵢ`
    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// `Σᵢ |uᵢ|`
    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|w| w.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> CoresetWeights {
        CoresetWeights {
            entries: self.iter().map(|(i, w)| (i, factor * w)).collect(),
            source_len: self.source_len,
        }
    }

    /// Relabels every index through `f` into a coreset over a source of size
    /// `new_len`. Weights landing on the same index accumulate.
    pub fn remap(&self, new_len: usize, mut f: impl FnMut(usize) -> usize) -> CoresetWeights {
        let mut out = CoresetWeights::empty(new_len);
        for (i, w) in self.iter() {
            out.add(f(i), w);
        }
        out
    }

    /// Merge with a coreset over the same source, accumulating shared indices.
    pub fn merge(&self, other: &CoresetWeights) -> Result<CoresetWeights> {
        if self.source_len != other.source_len {
            return Err(Error::invalid("cannot merge coresets over different sources"));
        }
        let mut out = self.clone();
        for (i, w) in other.iter() {
            out.add(i, w);
        }
        Ok(out)
    }

    /// Moment summary of the reweighted set `(P, u)`.
    pub fn moments(&self, set: &WeightedSet) -> MomentSummary {
        let mut s0 = 0.0;
        let mut s1 = vec![0.0; set.dim()];
        let mut s2 = 0.0;
        for (i, w) in self.iter() {
            let p = set.point(i);
            s0 += w;
            vecops::add_scaled(&mut s1, w, p);
            s2 += w * vecops::norm_sq(p);
        }
        MomentSummary {
            s0,
            s1: Point(s1),
            s2,
        }
    }
}

/// Strong coresets approximate every query; weak coresets only the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoresetMode {
    Strong,
    Weak,
}

impl std::fmt::Display for CoresetMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoresetMode::Strong => write!(f, "strong"),
            CoresetMode::Weak => write!(f, "weak"),
        }
    }
}

/// Seed for the randomized builders. Identical seed and inputs give
/// bit-identical outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Counter-based derivation (SplitMix64) so independent trials can share
    /// one master seed.
    pub fn derive(self, stream: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}
