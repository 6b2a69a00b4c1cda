//! Per-pair timing of the Hilbert-sphere distance against L1-Wasserstein.
//!
//! Diagram generation and density estimation happen before any clock starts;
//! only the pairwise distance evaluation is timed.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::{densify, DensityParams};
use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;
use crate::sphere;
use crate::wasserstein::{wasserstein, Order};

/// Hilbert evaluations per pair are repeated this many times and averaged,
/// since a single one is close to timer resolution.
const HILBERT_REPEATS: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_points: usize,
    pub k: usize,
    pub sigma: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTiming {
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

impl MetricTiming {
    fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        MetricTiming {
            mean_seconds: mean,
            std_seconds: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_points: usize,
    pub k: usize,
    pub sigma: f64,
    pub pairs: usize,
    pub seed: u64,
    pub hilbert: MetricTiming,
    pub w1: MetricTiming,
}

impl BenchReport {
    /// Mean w1 time over mean Hilbert time.
    pub fn speedup(&self) -> f64 {
        self.w1.mean_seconds / self.hilbert.mean_seconds
    }
}

/// Random finite diagram in the unit square with `n` off-diagonal points.
pub fn random_diagram<R: Rng>(rng: &mut R, n: usize) -> PersistenceDiagram {
    let pairs = (0..n)
        .map(|_| {
            let birth: f64 = rng.random_range(0.0..0.8);
            let death = birth + rng.random_range(0.02..(1.0 - birth));
            (birth, death.min(1.0))
        })
        .collect();
    PersistenceDiagram::from_pairs(pairs).expect("death > birth by construction")
}

pub fn benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.trials < 10 {
        return Err(Error::param(format!(
            "benchmark needs at least 10 trials, got {}",
            cfg.trials
        )));
    }
    if cfg.n_points == 0 {
        return Err(Error::param("n_points must be positive"));
    }
    let params = DensityParams::new(cfg.k, cfg.sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let diagrams: Vec<(PersistenceDiagram, PersistenceDiagram)> = (0..cfg.trials)
        .map(|_| {
            (
                random_diagram(&mut rng, cfg.n_points),
                random_diagram(&mut rng, cfg.n_points),
            )
        })
        .collect();
    let densities = diagrams
        .iter()
        .map(|(a, b)| Ok((densify(a, params)?, densify(b, params)?)))
        .collect::<Result<Vec<_>>>()?;

    // warm caches and branch predictors once per metric
    black_box(sphere::distance(&densities[0].0, &densities[0].1)?);
    black_box(wasserstein(&diagrams[0].0, &diagrams[0].1, Order::L1)?);

    let mut hilbert = Vec::with_capacity(cfg.trials);
    for (a, b) in &densities {
        let start = Instant::now();
        for _ in 0..HILBERT_REPEATS {
            black_box(sphere::distance(black_box(a), black_box(b))?);
        }
        hilbert.push(start.elapsed().as_secs_f64() / HILBERT_REPEATS as f64);
    }

    let mut w1 = Vec::with_capacity(cfg.trials);
    for (a, b) in &diagrams {
        let start = Instant::now();
        black_box(wasserstein(black_box(a), black_box(b), Order::L1)?);
        w1.push(start.elapsed().as_secs_f64());
    }

    Ok(BenchReport {
        n_points: cfg.n_points,
        k: cfg.k,
        sigma: cfg.sigma,
        pairs: cfg.trials,
        seed: cfg.seed,
        hilbert: MetricTiming::from_samples(&hilbert),
        w1: MetricTiming::from_samples(&w1),
    })
}
