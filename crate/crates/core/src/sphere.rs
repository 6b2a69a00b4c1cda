//! Riemannian geometry of the unit Hilbert sphere of square-root densities.
//!
//! All inner products are the discrete midpoint rule `Σ a·b / K²`. The
//! logarithm uses `u = ψⱼ − ⟨ψᵢ,ψⱼ⟩ψᵢ`, the orientation for which
//! `exp_ψᵢ(log_ψᵢ(ψⱼ)) = ψⱼ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::density::SqrtDensity;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Tangency and orthonormality tolerance.
pub const TANGENT_TOLERANCE: f64 = 1e-8;

/// Clamping an inner product by more than this is reported as a diagnostic.
const CLAMP_DIAGNOSTIC: f64 = 1e-12;

pub fn inner(a: &Grid, b: &Grid) -> Result<f64> {
    a.inner(b)
}

fn clamped_cosine(a: &SqrtDensity, b: &SqrtDensity) -> Result<f64> {
    let c = a.grid().inner(b.grid())?;
    let clamped = c.clamp(-1.0, 1.0);
    if (c - clamped).abs() > CLAMP_DIAGNOSTIC {
        log::warn!(
            "inner product {c} clamped to [-1, 1] by {:e}",
            (c - clamped).abs()
        );
    }
    Ok(clamped)
}

/// Geodesic (arc-length) distance `arccos⟨ψ₁, ψ₂⟩`, in radians.
pub fn distance(a: &SqrtDensity, b: &SqrtDensity) -> Result<f64> {
    Ok(clamped_cosine(a, b)?.acos())
}

/// A tangent vector to the sphere at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: SqrtDensity,
    values: Grid,
}

impl TangentVector {
    /// Checks `⟨base, values⟩ = 0` within [`TANGENT_TOLERANCE`].
    pub fn new(base: SqrtDensity, values: Grid) -> Result<Self> {
        let along = base.grid().inner(&values)?;
        if along.abs() > TANGENT_TOLERANCE * values.norm().max(1.0) {
            return Err(Error::Range {
                value: along,
                what: "tangent vector has a component along its base point",
            });
        }
        Ok(TangentVector { base, values })
    }

    /// Orthogonal projection of an arbitrary grid onto the tangent space at `base`.
    pub fn project(base: &SqrtDensity, values: &Grid) -> Result<Self> {
        let mut v = values.clone();
        let along = base.grid().inner(&v)?;
        v.axpy(-along, base.grid())?;
        Ok(TangentVector {
            base: base.clone(),
            values: v,
        })
    }

    pub fn zero(base: &SqrtDensity) -> Self {
        TangentVector {
            base: base.clone(),
            values: Grid::zeros(base.k()),
        }
    }

    pub fn base(&self) -> &SqrtDensity {
        &self.base
    }

    pub fn values(&self) -> &Grid {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    pub fn inner(&self, other: &TangentVector) -> Result<f64> {
        self.values.inner(&other.values)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut values = self.values.clone();
        values.scale(factor);
        TangentVector {
            base: self.base.clone(),
            values,
        }
    }

    fn same_base(&self, other: &TangentVector) -> Result<()> {
        if self.base != other.base {
            return Err(Error::param(
                "tangent vectors are based at different points",
            ));
        }
        Ok(())
    }

    /// `self + factor * other`, both at the same base point.
    pub fn add_scaled(&self, factor: f64, other: &TangentVector) -> Result<Self> {
        self.same_base(other)?;
        let mut values = self.values.clone();
        values.axpy(factor, &other.values)?;
        Ok(TangentVector {
            base: self.base.clone(),
            values,
        })
    }
}

/// Output of [`exp_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct Mapped {
    pub point: SqrtDensity,
    /// Squared discrete norm of the cells that went negative and were clamped
    /// to zero before renormalization; 0 when the step stayed nonnegative.
    pub clamped_mass: f64,
}

/// Exponential map `cos(‖v‖)ψ + sin(‖v‖) v/‖v‖`.
///
/// Steps that leave the nonnegative orthant are clamped to zero cellwise and
/// renormalized; the removed mass is reported in [`Mapped::clamped_mass`].
pub fn exp_map(psi: &SqrtDensity, v: &TangentVector) -> Result<Mapped> {
    if v.base != *psi {
        return Err(Error::param(
            "tangent vector is not based at the given point",
        ));
    }
    let norm = v.norm();
    if !(norm < PI) {
        return Err(Error::Range {
            value: norm,
            what: "tangent vector norm must be below pi",
        });
    }
    if norm == 0.0 {
        return Ok(Mapped {
            point: psi.clone(),
            clamped_mass: 0.0,
        });
    }
    let mut out = psi.grid().clone();
    out.scale(norm.cos());
    out.axpy(norm.sin() / norm, v.values())?;

    let k2 = (out.k() * out.k()) as f64;
    let mut clamped_mass = 0.0;
    for cell in out.as_mut_slice() {
        if *cell < 0.0 {
            clamped_mass += *cell * *cell / k2;
            *cell = 0.0;
        }
    }
    if clamped_mass > 0.0 {
        log::debug!("exp_map clamped mass {clamped_mass:e}");
    }
    Ok(Mapped {
        point: SqrtDensity::from_grid(out)?,
        clamped_mass,
    })
}

/// Logarithmic map: the tangent vector at `from` pointing to `to`, with norm
/// equal to their distance.
pub fn log_map(from: &SqrtDensity, to: &SqrtDensity) -> Result<TangentVector> {
    let c = clamped_cosine(from, to)?;
    let mut u = to.grid().clone();
    u.axpy(-c, from.grid())?;
    // remove rounding residue along `from`
    let residue = from.grid().inner(&u)?;
    u.axpy(-residue, from.grid())?;

    let unorm = u.norm();
    if unorm == 0.0 {
        return Ok(TangentVector::zero(from));
    }
    if c <= 0.0 {
        log::debug!(
            "log_map between orthogonal densities; direction is the projection of the target"
        );
    }
    u.scale(c.acos() / unorm);
    Ok(TangentVector {
        base: from.clone(),
        values: u,
    })
}

fn check_fraction(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Range {
            value: s,
            what: "geodesic parameter must lie in [0, 1]",
        });
    }
    Ok(())
}

/// Point at fraction `s` of the arc from `a` to `b`.
pub fn geodesic(a: &SqrtDensity, b: &SqrtDensity, s: f64) -> Result<SqrtDensity> {
    check_fraction(s)?;
    a.grid().check_same_k(b.grid())?;
    let v = log_map(a, b)?.scaled(s);
    Ok(exp_map(a, &v)?.point)
}

/// Normalized chord `((1−s)ψ₁ + sψ₂) / √(s² + (1−s)² + 2s(1−s)⟨ψ₁,ψ₂⟩)`.
///
/// Lies on the same great circle as [`geodesic`] but is not parameterized by
/// arc length except at `s ∈ {0, ½, 1}`.
pub fn chord_point(a: &SqrtDensity, b: &SqrtDensity, s: f64) -> Result<SqrtDensity> {
    check_fraction(s)?;
    let c = clamped_cosine(a, b)?;
    let denom = (s * s + (1.0 - s) * (1.0 - s) + 2.0 * s * (1.0 - s) * c).sqrt();
    let mut g = a.grid().clone();
    g.scale((1.0 - s) / denom);
    g.axpy(s / denom, b.grid())?;
    SqrtDensity::from_grid(g)
}

/// Cellwise average projected back onto the sphere.
pub fn extrinsic_mean(set: &[SqrtDensity]) -> Result<SqrtDensity> {
    let first = set.first().ok_or(Error::Empty("density set"))?;
    let mut acc = Grid::zeros(first.k());
    for psi in set {
        acc.axpy(1.0, psi.grid())?;
    }
    acc.scale(1.0 / set.len() as f64);
    if acc.norm() == 0.0 {
        return Err(Error::param("Euclidean mean is the zero grid"));
    }
    SqrtDensity::from_grid(acc)
}

/// Principal geodesic analysis model: PCA on tangent vectors at the mean.
#[derive(Debug, Clone)]
pub struct PgaModel {
    pub mean: SqrtDensity,
    /// Orthonormal tangent vectors at `mean`, by decreasing variance.
    pub components: Vec<TangentVector>,
    /// Sample variance (divisor N−1) of the training coordinates along each component.
    pub variances: Vec<f64>,
}

impl PgaModel {
    pub fn dims(&self) -> usize {
        self.components.len()
    }

    /// Tangent coordinates `⟨log_mean(ψ), component_k⟩`.
    pub fn project(&self, psi: &SqrtDensity) -> Result<Vec<f64>> {
        project_coords(self, psi)
    }

    /// `exp_mean(Σ coords_k · component_k)`.
    pub fn reconstruct(&self, coords: &[f64]) -> Result<Mapped> {
        if coords.len() > self.components.len() {
            return Err(Error::Shape {
                expected: self.components.len(),
                found: coords.len(),
            });
        }
        let mut v = TangentVector::zero(&self.mean);
        for (c, comp) in coords.iter().zip(&self.components) {
            v.values.axpy(*c, &comp.values)?;
        }
        exp_map(&self.mean, &v)
    }
}

/// Fits a `d`-component PGA model.
///
/// The tangent covariance is diagonalized through the N×N Gram matrix of the
/// centered tangent vectors. Directions with (numerically) zero variance are
/// completed to an orthonormal tangent basis deterministically.
pub fn pga(set: &[SqrtDensity], d: usize) -> Result<PgaModel> {
    let n = set.len();
    if n < 2 {
        return Err(Error::param("PGA needs at least two densities"));
    }
    let k = set[0].k();
    let max_d = (n - 1).min(k * k - 1);
    if d > max_d {
        return Err(Error::param(format!(
            "requested {d} components but at most {max_d} are available"
        )));
    }

    let mean = extrinsic_mean(set)?;
    let mut tangents = set
        .iter()
        .map(|psi| log_map(&mean, psi).map(|t| t.values))
        .collect::<Result<Vec<Grid>>>()?;
    let mut centroid = Grid::zeros(k);
    for t in &tangents {
        centroid.axpy(1.0 / n as f64, t)?;
    }
    for t in &mut tangents {
        t.axpy(-1.0, &centroid)?;
    }

    let gram = DMatrix::from_fn(n, n, |i, j| {
        tangents[i].inner(&tangents[j]).expect("common grid size")
    });
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let trace: f64 = eig.eigenvalues.iter().map(|l| l.max(0.0)).sum();
    // tangent vectors below ~1e-10 in norm are rounding noise from acos near 1
    let floor = (1e-14 * trace).max(1e-20);

    let mut components: Vec<TangentVector> = Vec::with_capacity(d);
    let mut variances = Vec::with_capacity(d);
    for &idx in order.iter().take(d) {
        let lambda = eig.eigenvalues[idx];
        if lambda <= floor {
            break;
        }
        let mut dir = Grid::zeros(k);
        for (i, t) in tangents.iter().enumerate() {
            dir.axpy(eig.eigenvectors[(i, idx)], t)?;
        }
        if let Some(unit) = orthonormalize(&mean, &components, dir)? {
            components.push(unit);
            variances.push(lambda / (n - 1) as f64);
        }
    }

    let mut cell = 0;
    while components.len() < d {
        let mut e = Grid::zeros(k);
        e.as_mut_slice()[cell] = 1.0;
        cell += 1;
        if let Some(unit) = orthonormalize(&mean, &components, e)? {
            components.push(unit);
            variances.push(0.0);
        }
    }

    Ok(PgaModel {
        mean,
        components,
        variances,
    })
}

/// Gram-Schmidt step against the base point and existing components; `None`
/// when the remainder is negligible.
fn orthonormalize(
    base: &SqrtDensity,
    existing: &[TangentVector],
    mut dir: Grid,
) -> Result<Option<TangentVector>> {
    let start = dir.norm();
    // two passes for numerical orthogonality
    for _ in 0..2 {
        let along = base.grid().inner(&dir)?;
        dir.axpy(-along, base.grid())?;
        for c in existing {
            let along = c.values.inner(&dir)?;
            dir.axpy(-along, &c.values)?;
        }
    }
    let norm = dir.norm();
    if norm <= 1e-6 * start || norm == 0.0 {
        return Ok(None);
    }
    dir.scale(1.0 / norm);
    Ok(Some(TangentVector {
        base: base.clone(),
        values: dir,
    }))
}

/// Coordinates of `psi` in the model's principal directions.
pub fn project_coords(model: &PgaModel, psi: &SqrtDensity) -> Result<Vec<f64>> {
    model.mean.grid().check_same_k(psi.grid())?;
    let v = log_map(&model.mean, psi)?;
    model.components.iter().map(|c| v.inner(c)).collect()
}
