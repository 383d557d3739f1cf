//! Deterministic ε-coresets via the Frank-Wolfe algorithm.
//!
//! [`fw_unit_ball`] sparsely approximates a convex combination of unit-ball
//! points: it maximizes the concave `f(x) = −‖Σ(wᵢ−xᵢ)pᵢ‖²` over the simplex
//! by moving toward one vertex per step, so the iterate after `k` vertex
//! pulls has at most `k` nonzeros. [`fw_coreset`] wraps it for arbitrary
//! normalized weighted sets by scaling each lifted point `(pᵢ, 1)` onto the
//! unit ball, which turns the residual bound into coreset moment bounds.

use crate::error::{Error, Result};
use crate::types::{CoresetMode, CoresetWeights, WeightedSet};
use crate::vecops;

/// Tolerance on the unit-ball precondition; points beyond it are rescaled
/// onto the sphere with a warning rather than rejected.
const UNIT_BALL_TOL: f64 = 1e-9;

/// Per-iteration residual record, for convergence checks.
#[derive(Debug, Clone)]
pub struct FwTrace {
    /// `‖Σ(wᵢ−xᵢ)pᵢ‖²` after the initial vertex and after every update.
    pub residual_sq: Vec<f64>,
    /// Number of update steps taken (vertex pulls beyond the first).
    pub updates: usize,
}

/// Sparse distribution `ũ` with `‖ũ‖₀ ≤ ⌈8/ε⌉` and
/// `‖Σ(wᵢ−ũᵢ)pᵢ‖² ≤ ε`, deterministically.
///
/// The set's weights must form a distribution and its points must lie in the
/// unit ball (tolerance [`UNIT_BALL_TOL`]). The iterate starts at the vertex
/// closest to the weighted mean and performs at most `⌈8/ε⌉ − 1` exact
/// line-search updates, stopping early once the residual target is met.
pub fn fw_unit_ball(set: &WeightedSet, eps: f64) -> Result<CoresetWeights> {
    fw_unit_ball_traced(set, eps).map(|(u, _)| u)
}

/// [`fw_unit_ball`] plus the residual trace.
pub fn fw_unit_ball_traced(set: &WeightedSet, eps: f64) -> Result<(CoresetWeights, FwTrace)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    if set.weights().iter().any(|&w| w < 0.0) {
        return Err(Error::invalid("weights must be nonnegative"));
    }
    let total = set.total_weight();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::invalid("weights must form a distribution"));
    }

    let n = set.len();
    let d = set.dim();

    // Work on a copy so out-of-ball points can be pulled back to the sphere.
    let mut data = set.flat_points().to_vec();
    let mut clamped = 0usize;
    for i in 0..n {
        let row = &mut data[i * d..(i + 1) * d];
        let norm = vecops::norm_sq(row).sqrt();
        if norm > 1.0 {
            if norm > 1.0 + UNIT_BALL_TOL {
                clamped += 1;
            }
            for c in row {
                *c /= norm;
            }
        }
    }
    if clamped > 0 {
        log::warn!("{clamped} points outside the unit ball were rescaled onto it");
    }
    let point = |i: usize| &data[i * d..(i + 1) * d];
    // Exact distribution regardless of accumulated roundoff in the input.
    let w: Vec<f64> = set.weights().iter().map(|x| x / total).collect();

    // Target mean m̄ = Σ wᵢ pᵢ.
    let mut target = vec![0.0; d];
    for (i, &wi) in w.iter().enumerate() {
        vecops::add_scaled(&mut target, wi, point(i));
    }

    // Init at the vertex nearest the target (ties to the lowest index).
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        let dist = vecops::dist_sq(point(i), &target);
        if dist < best_d {
            best_d = dist;
            best = i;
        }
    }
    let mut x = CoresetWeights::empty(n);
    x.set(best, 1.0);
    let mut current: Vec<f64> = point(best).to_vec();

    let budget = (8.0 / eps).ceil() as usize; // total vertex pulls allowed
    let mut residual: Vec<f64> = target
        .iter()
        .zip(&current)
        .map(|(t, c)| t - c)
        .collect();
    let mut trace = FwTrace {
        residual_sq: vec![vecops::norm_sq(&residual)],
        updates: 0,
    };

    for step in 1..budget {
        if *trace.residual_sq.last().unwrap() <= eps {
            break;
        }
        // Steepest gradient coordinate: argmax_i p_i · r.
        let mut pick = 0;
        let mut pick_v = f64::NEG_INFINITY;
        for i in 0..n {
            let g = vecops::dot(point(i), &residual);
            if g > pick_v {
                pick_v = g;
                pick = i;
            }
        }
        let dir: Vec<f64> = point(pick)
            .iter()
            .zip(&current)
            .map(|(p, c)| p - c)
            .collect();
        let denom = vecops::norm_sq(&dir);
        if denom == 0.0 {
            break; // the best vertex coincides with the iterate mean
        }
        let alpha = (vecops::dot(&residual, &dir) / denom).clamp(0.0, 1.0);
        if alpha == 0.0 {
            break; // no ascent direction left: optimal over the simplex
        }
        // x <- (1-α)x + α e_pick
        let scaled = x.scaled(1.0 - alpha);
        x = scaled;
        x.add(pick, alpha);
        for (c, p) in current.iter_mut().zip(point(pick)) {
            *c = (1.0 - alpha) * *c + alpha * p;
        }
        // Refresh the incrementally tracked mean now and then so drift can
        // never accumulate past the certificate tolerance.
        if step % 512 == 0 {
            current = vec![0.0; d];
            for (i, xi) in x.iter() {
                vecops::add_scaled(&mut current, xi, point(i));
            }
        }
        for ((r, t), c) in residual.iter_mut().zip(&target).zip(&current) {
            *r = t - c;
        }
        trace.residual_sq.push(vecops::norm_sq(&residual));
        trace.updates = step;
    }

    // The repeated (1-α) scalings leave Σx within roundoff of one; make it
    // exact so downstream mass identities hold.
    let mass = x.total();
    if mass > 0.0 && mass != 1.0 {
        x = x.scaled(1.0 / mass);
    }
    Ok((x, trace))
}

/// Deterministic strong or weak ε-coreset for a normalized weighted set via
/// the lift-run-unlift wrapper around [`fw_unit_ball`].
///
/// Strong mode runs at `ε′ = (ε/4)²` and guarantees worst-case relative
/// error at most `ε` with `‖u‖₀ ≤ 128/ε²`; weak mode runs at `ε′ = ε/576`
/// and guarantees a `(1+ε)`-optimal coreset mean.
pub fn fw_coreset(set: &WeightedSet, eps: f64, mode: CoresetMode) -> Result<CoresetWeights> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    set.require_normalized("fw_coreset")?;
    let inner_eps = match mode {
        CoresetMode::Strong => (eps / 4.0) * (eps / 4.0),
        CoresetMode::Weak => eps / 576.0,
    };

    let n = set.len();
    let d = set.dim();
    // Lift p'_i = (p_i, 1)/‖(p_i, 1)‖², w'_i = w_i‖(p_i, 1)‖²/2. The lifted
    // points sit on a sphere of radius 1/2, and the lifted weights form a
    // distribution because the set is normalized.
    let mut lifted = Vec::with_capacity(n * (d + 1));
    let mut lifted_w = Vec::with_capacity(n);
    let mut scale = Vec::with_capacity(n);
    for i in 0..n {
        let p = set.point(i);
        let s = 1.0 + vecops::norm_sq(p);
        for c in p {
            lifted.push(c / s);
        }
        lifted.push(1.0 / s);
        lifted_w.push(set.weight(i) * s / 2.0);
        scale.push(s);
    }
    let lifted_set = WeightedSet::new(lifted, d + 1, lifted_w)?;
    let sparse = fw_unit_ball(&lifted_set, inner_eps)?;

    // Unlift: u_i = 2 u'_i / ‖(p_i, 1)‖².
    CoresetWeights::from_entries(n, sparse.iter().map(|(i, ui)| (i, 2.0 * ui / scale[i])))
}
