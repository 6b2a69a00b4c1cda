//! Statistical learning and benchmarking on top of the two metrics.

mod bench;
mod knn;
mod regression;
mod synthetic;

pub use bench::{benchmark, random_diagram, BenchConfig, BenchReport, MetricTiming};
pub use knn::{knn_classify, knn_vote, loo_knn_accuracy};
pub use regression::{loo_regression, pearson, Regression};
pub use synthetic::{synthetic_clouds, LabeledCloud, SYNTHETIC_CLASSES};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{sqrt_transform, DensityParams, PersistencePdf, SqrtDensity};
use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;
use crate::pipeline::densify_all;
use crate::sphere::{self, PgaModel};
use crate::wasserstein::{wasserstein, Order};

/// Which distance a matrix was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Hilbert,
    W1,
    W2,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert" => Ok(Metric::Hilbert),
            "w1" => Ok(Metric::W1),
            "w2" => Ok(Metric::W2),
            other => Err(Error::param(format!(
                "unknown metric '{other}' (hilbert, w1, w2)"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Hilbert => "hilbert",
            Metric::W1 => "w1",
            Metric::W2 => "w2",
        })
    }
}

/// Symmetric pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
    metric: Metric,
}

impl DistanceMatrix {
    /// Builds a matrix from the strict upper triangle produced by `dist`,
    /// evaluated in parallel.
    fn from_fn<F>(labels: Vec<String>, metric: Metric, dist: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Result<f64> + Sync,
    {
        let n = labels.len();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let computed = pairs
            .par_iter()
            .map(|&(i, j)| dist(i, j).map(|d| (i, j, d)))
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![0.0; n * n];
        for (i, j, d) in computed {
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
        Ok(DistanceMatrix {
            labels,
            values,
            metric,
        })
    }

    /// Wraps precomputed values, checking symmetry, zero diagonal and nonnegativity.
    pub fn from_values(labels: Vec<String>, values: Vec<f64>, metric: Metric) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::Shape {
                expected: n * n,
                found: values.len(),
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Config(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= 0.0) || v != values[j * n + i] {
                    return Err(Error::Config(format!(
                        "entry ({i}, {j}) breaks symmetry or sign"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            labels,
            values,
            metric,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn check_items(n_labels: usize, n_items: usize) -> Result<()> {
    if n_labels != n_items {
        return Err(Error::Shape {
            expected: n_labels,
            found: n_items,
        });
    }
    if n_items < 2 {
        return Err(Error::param("a distance matrix needs at least two items"));
    }
    Ok(())
}

/// Hilbert-sphere distances between densities that share K and σ.
pub fn hilbert_matrix(labels: Vec<String>, pdfs: &[PersistencePdf]) -> Result<DistanceMatrix> {
    check_items(labels.len(), pdfs.len())?;
    let (k, sigma) = (pdfs[0].k(), pdfs[0].sigma());
    if let Some((i, p)) = pdfs
        .iter()
        .enumerate()
        .find(|(_, p)| p.k() != k || p.sigma() != sigma)
    {
        return Err(Error::Config(format!(
            "density #{i} uses K={}, sigma={} but #0 uses K={k}, sigma={sigma}",
            p.k(),
            p.sigma()
        )));
    }
    let roots: Vec<SqrtDensity> = pdfs.par_iter().map(sqrt_transform).collect();
    hilbert_matrix_roots(labels, &roots)
}

/// Hilbert-sphere distances between square-root densities of one grid size.
pub fn hilbert_matrix_roots(labels: Vec<String>, roots: &[SqrtDensity]) -> Result<DistanceMatrix> {
    check_items(labels.len(), roots.len())?;
    let k = roots[0].k();
    if let Some(i) = roots.iter().position(|r| r.k() != k) {
        return Err(Error::Config(format!(
            "density #{i} has K={} but #0 has K={k}",
            roots[i].k()
        )));
    }
    DistanceMatrix::from_fn(labels, Metric::Hilbert, |i, j| {
        sphere::distance(&roots[i], &roots[j])
    })
}

/// Wasserstein distances between finite diagrams.
pub fn wasserstein_matrix(
    labels: Vec<String>,
    diagrams: &[PersistenceDiagram],
    q: Order,
) -> Result<DistanceMatrix> {
    check_items(labels.len(), diagrams.len())?;
    let metric = match q {
        Order::L1 => Metric::W1,
        Order::L2 => Metric::W2,
    };
    DistanceMatrix::from_fn(labels, metric, |i, j| {
        Ok(wasserstein(&diagrams[i], &diagrams[j], q)?.0)
    })
}

/// Pairwise distances between normalized diagrams under any metric.
pub fn distance_matrix(
    labels: Vec<String>,
    diagrams: &[PersistenceDiagram],
    metric: Metric,
    params: DensityParams,
) -> Result<DistanceMatrix> {
    match metric {
        Metric::Hilbert => {
            params.validate()?;
            check_items(labels.len(), diagrams.len())?;
            let roots = densify_all(diagrams, params)?;
            hilbert_matrix_roots(labels, &roots)
        }
        Metric::W1 => wasserstein_matrix(labels, diagrams, Order::L1),
        Metric::W2 => wasserstein_matrix(labels, diagrams, Order::L2),
    }
}

/// PGA model on a training set plus each element's tangent coordinates.
pub fn pga_features(train: &[SqrtDensity], d: usize) -> Result<(PgaModel, Vec<Vec<f64>>)> {
    let model = sphere::pga(train, d)?;
    let coords = train
        .iter()
        .map(|psi| model.project(psi))
        .collect::<Result<Vec<_>>>()?;
    Ok((model, coords))
}
