//! Synthetic dataset generation, deterministic per seed.

use anyhow::{bail, Result};
use meancore::{RngSeed, WeightedSet};
use rand::Rng;
use rand_distr::{Distribution as _, StandardNormal, StudentT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Gaussian,
    UniformCube,
    StudentT,
    Clustered,
}

impl std::str::FromStr for Dist {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Dist::Gaussian),
            "uniform-cube" => Ok(Dist::UniformCube),
            "student-t" => Ok(Dist::StudentT),
            "clustered" => Ok(Dist::Clustered),
            other => bail!(
                "unknown distribution {other:?} (expected gaussian|uniform-cube|student-t|clustered)"
            ),
        }
    }
}

pub struct DatasetSpec {
    pub dist: Dist,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub weighted: bool,
    /// Cluster count for `clustered`.
    pub clusters: usize,
    /// Degrees of freedom for `student-t`.
    pub nu: f64,
}

pub fn generate(spec: &DatasetSpec) -> Result<WeightedSet> {
    if spec.n < 2 {
        bail!("need n >= 2 points");
    }
    if spec.d < 1 {
        bail!("need d >= 1");
    }
    let mut rng = RngSeed(spec.seed).rng();
    let mut data = Vec::with_capacity(spec.n * spec.d);
    match spec.dist {
        Dist::Gaussian => {
            for _ in 0..spec.n * spec.d {
                data.push(rng.sample::<f64, _>(StandardNormal));
            }
        }
        Dist::UniformCube => {
            for _ in 0..spec.n * spec.d {
                data.push(rng.random::<f64>());
            }
        }
        Dist::StudentT => {
            if spec.nu <= 0.0 || !spec.nu.is_finite() {
                bail!("student-t needs nu > 0");
            }
            let t = StudentT::new(spec.nu)?;
            for _ in 0..spec.n * spec.d {
                data.push(t.sample(&mut rng));
            }
        }
        Dist::Clustered => {
            if spec.clusters == 0 {
                bail!("clustered needs at least one cluster");
            }
            let centers: Vec<Vec<f64>> = (0..spec.clusters)
                .map(|_| {
                    (0..spec.d)
                        .map(|_| 5.0 * rng.sample::<f64, _>(StandardNormal))
                        .collect()
                })
                .collect();
            for _ in 0..spec.n {
                let c = &centers[rng.random_range(0..spec.clusters)];
                for coord in c {
                    data.push(coord + 0.5 * rng.sample::<f64, _>(StandardNormal));
                }
            }
        }
    }
    let weights = if spec.weighted {
        (0..spec.n).map(|_| rng.random_range(0.5..2.0)).collect()
    } else {
        vec![1.0; spec.n]
    };
    Ok(WeightedSet::new(data, spec.d, weights)?)
}
