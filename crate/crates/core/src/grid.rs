//! Square K×K grids over the unit square.
//!
//! Cell `(row, col)` covers `[col/K, (col+1)/K) × [row/K, (row+1)/K)` and is
//! centered at `((col+½)/K, (row+½)/K)`. Columns run along the birth axis and
//! rows along the death axis. Storage is row-major.
//!
//! Every discrete integral in the crate uses the midpoint rule with uniform
//! weight `1/K²`, implemented once in [`Grid::inner`].

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    k: usize,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(k: usize) -> Self {
        Grid {
            k,
            data: vec![0.0; k * k],
        }
    }

    pub fn filled(k: usize, value: f64) -> Self {
        Grid {
            k,
            data: vec![value; k * k],
        }
    }

    pub fn from_vec(k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != k * k {
            return Err(Error::Shape {
                expected: k * k,
                found: data.len(),
            });
        }
        Ok(Grid { k, data })
    }

    /// Grid resolution K.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.k + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.k + col] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k)
    }

    /// Center of cell `index` along either axis.
    pub fn cell_center(k: usize, index: usize) -> f64 {
        (index as f64 + 0.5) / k as f64
    }

    /// Cell index containing coordinate `x ∈ [0, 1]`; `x = 1` falls in the last cell.
    pub fn cell_of(k: usize, x: f64) -> usize {
        ((x * k as f64).floor() as usize).min(k - 1)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_same_k(&self, other: &Grid) -> Result<()> {
        if self.k != other.k {
            return Err(Error::Shape {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    /// Discrete L² inner product `Σ a·b / K²`.
    pub fn inner(&self, other: &Grid) -> Result<f64> {
        self.check_same_k(other)?;
        Ok(dot(&self.data, &other.data) / (self.k * self.k) as f64)
    }

    /// Discrete L² norm.
    pub fn norm(&self) -> f64 {
        (dot(&self.data, &self.data) / (self.k * self.k) as f64).sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &Grid) -> Result<()> {
        self.check_same_k(other)?;
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += factor * b);
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Grid) -> Result<f64> {
        self.check_same_k(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Dot product with four independent accumulators.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
