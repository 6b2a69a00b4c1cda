use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative ridge strength used when the design is rank deficient.
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Regression {
    /// Held-out prediction for every sample.
    pub predictions: Vec<f64>,
    /// Pearson correlation between predictions and true scores.
    pub pearson_r: f64,
}

/// Leave-one-out ordinary least squares with an intercept.
///
/// If a fold's normal matrix is numerically singular the fit falls back to
/// ridge regression with `λ = 1e-8 · trace(XᵀX) / p`.
pub fn loo_regression(features: &[Vec<f64>], scores: &[f64]) -> Result<Regression> {
    let n = features.len();
    if n != scores.len() {
        return Err(Error::Shape {
            expected: n,
            found: scores.len(),
        });
    }
    if n < 3 {
        return Err(Error::param(
            "leave-one-out regression needs at least 3 samples",
        ));
    }
    let p = features[0].len();
    if let Some(row) = features.iter().find(|r| r.len() != p) {
        return Err(Error::Shape {
            expected: p,
            found: row.len(),
        });
    }
    if features
        .iter()
        .flatten()
        .chain(scores)
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("regression input"));
    }

    let predictions = (0..n)
        .map(|held| {
            let rows: Vec<usize> = (0..n).filter(|&i| i != held).collect();
            let design = DMatrix::from_fn(rows.len(), p + 1, |r, c| {
                if c == 0 {
                    1.0
                } else {
                    features[rows[r]][c - 1]
                }
            });
            let target = DVector::from_iterator(rows.len(), rows.iter().map(|&i| scores[i]));
            let beta = least_squares(&design, &target)?;
            Ok(beta[0] + (0..p).map(|c| beta[c + 1] * features[held][c]).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;

    let pearson_r = pearson(&predictions, scores);
    Ok(Regression {
        predictions,
        pearson_r,
    })
}

fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let mut gram = x.transpose() * x;
    let rhs = x.transpose() * y;
    let eig = SymmetricEigen::new(gram.clone());
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let min = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !(min > 1e-12 * max) {
        let lambda = RIDGE * gram.trace() / gram.nrows() as f64;
        log::debug!("rank-deficient design, ridge lambda = {lambda:e}");
        for i in 0..gram.nrows() {
            gram[(i, i)] += lambda;
        }
    }
    gram.cholesky()
        .map(|c| c.solve(&rhs))
        .ok_or_else(|| Error::param("regression design is degenerate"))
}

/// Pearson correlation; NaN when either input has zero variance.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}
