//! Phase-space reconstruction by the method of delays.

use crate::error::{Error, Result};

/// A scalar time series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    name: Option<String>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("time series"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("time series"));
        }
        Ok(TimeSeries {
            samples,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A finite set of points in R^m, ordered by time index.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or(Error::Empty("point cloud"))?;
        if dim == 0 {
            return Err(Error::param("points must have positive dimension"));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::Shape {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("point cloud"));
            }
        }
        Ok(PointCloud { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Builds delay vectors `[x(t), x(t+τ), …, x(t+(m−1)τ)]` for every admissible `t`.
pub fn delay_embed(series: &TimeSeries, m: usize, tau: usize) -> Result<PointCloud> {
    if m == 0 {
        return Err(Error::param("embedding dimension m must be positive"));
    }
    if tau == 0 {
        return Err(Error::param("delay tau must be positive"));
    }
    let len = series.len();
    let needed = (m - 1)
        .checked_mul(tau)
        .and_then(|span| span.checked_add(1))
        .ok_or_else(|| Error::param("m·tau overflows"))?;
    if len < needed {
        return Err(Error::SeriesTooShort {
            len,
            m,
            tau,
            needed,
        });
    }
    let x = series.samples();
    let points = (0..=len - needed)
        .map(|t| (0..m).map(|j| x[t + j * tau]).collect())
        .collect();
    Ok(PointCloud { dim: m, points })
}

/// Embeds every column of a multichannel series independently.
pub fn delay_embed_channels(
    channels: &[TimeSeries],
    m: usize,
    tau: usize,
) -> Result<Vec<PointCloud>> {
    channels.iter().map(|c| delay_embed(c, m, tau)).collect()
}
