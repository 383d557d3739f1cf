//! Shared instance generators for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use meancore::normalize::normalize;
use meancore::{RngSeed, WeightedSet};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};

/// Standard Gaussian cloud with unit weights.
pub fn gaussian_set(n: usize, d: usize, seed: u64) -> WeightedSet {
    let mut rng = RngSeed(seed).rng();
    let data: Vec<f64> = (0..n * d)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    WeightedSet::with_unit_weights(data, d).unwrap()
}

/// Heavy-tailed Student-t cloud with unit weights.
pub fn student_t_set(n: usize, d: usize, nu: f64, seed: u64) -> WeightedSet {
    let mut rng = RngSeed(seed).rng();
    let t = StudentT::new(nu).unwrap();
    let data: Vec<f64> = (0..n * d).map(|_| t.sample(&mut rng)).collect();
    WeightedSet::with_unit_weights(data, d).unwrap()
}

/// Raw weighted set with random offset, scale and positive weights;
/// `n ∈ [lo_n, hi_n]`, `d ∈ [1, hi_d]`.
pub fn random_raw_set(hi_n: usize, hi_d: usize, seed: u64) -> WeightedSet {
    let mut rng = RngSeed(seed).rng();
    let d = rng.random_range(1..=hi_d);
    let n = rng.random_range((d + 5).max(10)..=hi_n);
    let scale = rng.random_range(0.5..4.0);
    let offset: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mut data = Vec::with_capacity(n * d);
    for _ in 0..n {
        for off in &offset {
            data.push(off + scale * rng.sample::<f64, _>(StandardNormal));
        }
    }
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..2.0)).collect();
    WeightedSet::new(data, d, weights).unwrap()
}

/// Normalized view of a random Gaussian cloud (uniform weights).
pub fn normalized_gaussian(n: usize, d: usize, seed: u64) -> WeightedSet {
    normalize(&gaussian_set(n, d, seed)).unwrap().0
}

/// Normalized view of a random raw set (non-uniform weights).
pub fn normalized_random(hi_n: usize, hi_d: usize, seed: u64) -> WeightedSet {
    normalize(&random_raw_set(hi_n, hi_d, seed)).unwrap().0
}
