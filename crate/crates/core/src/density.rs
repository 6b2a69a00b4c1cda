//! Persistence diagrams as discrete densities on `[0,1]²`.
//!
//! A normalized diagram is smoothed with an isotropic Gaussian kernel
//! evaluated at grid-cell centers. Each kernel is cut off beyond
//! [`KERNEL_RADIUS`] standard deviations (the cell containing the point is
//! always kept), and the grid is then divided by its sum. The cutoff makes
//! diagrams whose kernel supports do not meet exactly orthogonal after the
//! square-root transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::persistence::PersistenceDiagram;

/// Kernel support radius in units of σ.
pub const KERNEL_RADIUS: f64 = 5.0;

pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_SIGMA: f64 = 0.05;

const NORM_TOLERANCE: f64 = 1e-9;

/// Grid resolution and kernel bandwidth shared by every density in a comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub k: usize,
    pub sigma: f64,
}

impl Default for DensityParams {
    fn default() -> Self {
        DensityParams {
            k: DEFAULT_GRID,
            sigma: DEFAULT_SIGMA,
        }
    }
}

impl DensityParams {
    pub fn new(k: usize, sigma: f64) -> Result<Self> {
        let p = DensityParams { k, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::param(format!(
                "grid size K must be >= 2, got {}",
                self.k
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::param(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// A K×K probability mass grid summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePdf {
    grid: Grid,
    sigma: f64,
}

impl PersistencePdf {
    /// Wraps a nonnegative grid, rescaling it to unit total mass.
    pub fn from_grid(mut grid: Grid, sigma: f64) -> Result<Self> {
        if grid.k() < 2 {
            return Err(Error::param("grid size K must be >= 2"));
        }
        check_nonnegative(&grid)?;
        let total = grid.sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Range {
                value: total,
                what: "density mass must be positive and finite",
            });
        }
        grid.scale(1.0 / total);
        debug_assert!((grid.sum() - 1.0).abs() < NORM_TOLERANCE);
        Ok(PersistencePdf { grid, sigma })
    }

    /// The uniform density, `1/K²` per cell.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::from_grid(Grid::filled(k, 1.0), f64::INFINITY)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.k()
    }

    /// Bandwidth the grid was estimated with (infinite for the uniform density).
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Unit-norm square-root density, a point on the Hilbert sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SqrtDensity {
    grid: Grid,
}

impl SqrtDensity {
    /// Rescales a nonnegative, nonzero grid to unit discrete norm.
    pub fn from_grid(mut grid: Grid) -> Result<Self> {
        check_nonnegative(&grid)?;
        let norm = grid.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Range {
                value: norm,
                what: "square-root density must have positive finite norm",
            });
        }
        grid.scale(1.0 / norm);
        debug_assert!((grid.norm() - 1.0).abs() < NORM_TOLERANCE);
        Ok(SqrtDensity { grid })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.grid.k()
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }

    /// Squares cellwise and renormalizes to unit mass.
    pub fn to_pdf(&self, sigma: f64) -> Result<PersistencePdf> {
        let mut g = self.grid.clone();
        g.as_mut_slice().iter_mut().for_each(|v| *v *= *v);
        PersistencePdf::from_grid(g, sigma)
    }
}

fn check_nonnegative(grid: &Grid) -> Result<()> {
    match grid
        .as_slice()
        .iter()
        .find(|v| !(**v >= 0.0) || !v.is_finite())
    {
        Some(&v) => Err(Error::Range {
            value: v,
            what: "grid cells must be finite and nonnegative",
        }),
        None => Ok(()),
    }
}

/// Gaussian kernel density estimate of a normalized diagram.
pub fn kde(pd: &PersistenceDiagram, sigma: f64, k: usize) -> Result<PersistencePdf> {
    DensityParams { k, sigma }.validate()?;
    if !pd.is_finite() {
        return Err(Error::param(
            "diagram has essential bars; normalize it before density estimation",
        ));
    }
    kde_points(pd.pairs(), sigma, k)
}

/// Kernel density estimate of an arbitrary point set in the unit square.
///
/// Points are `(x, y)` = `(birth, death)`; diagonal points are allowed.
pub fn kde_points(points: &[(f64, f64)], sigma: f64, k: usize) -> Result<PersistencePdf> {
    DensityParams { k, sigma }.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    for &(b, d) in points {
        for v in [b, d] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Range {
                    value: v,
                    what: "normalized diagram coordinates must lie in [0, 1]",
                });
            }
        }
    }

    let mut grid = Grid::zeros(k);
    let radius = KERNEL_RADIUS * sigma;
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);
    let kf = k as f64;
    // cells whose centers lie within `radius` of c along one axis
    let span = |c: f64| {
        let lo = ((c - radius) * kf - 0.5).ceil().max(0.0) as usize;
        let hi = ((c + radius) * kf - 0.5).floor().min(kf - 1.0);
        let hi = if hi < 0.0 { None } else { Some(hi as usize) };
        hi.filter(|&hi| hi >= lo).map(|hi| lo..=hi)
    };

    for &(x, y) in points {
        let home = (Grid::cell_of(k, y), Grid::cell_of(k, x));
        if let (Some(rows), Some(cols)) = (span(y), span(x)) {
            for row in rows {
                let dy = Grid::cell_center(k, row) - y;
                for col in cols.clone() {
                    let dx = Grid::cell_center(k, col) - x;
                    let r2 = dx * dx + dy * dy;
                    if r2 <= radius * radius && (row, col) != home {
                        let v = grid.get(row, col);
                        grid.set(row, col, v + (-r2 * inv_two_var).exp());
                    }
                }
            }
        }
        let (row, col) = home;
        let dy = Grid::cell_center(k, row) - y;
        let dx = Grid::cell_center(k, col) - x;
        let v = grid.get(row, col);
        grid.set(row, col, v + (-(dx * dx + dy * dy) * inv_two_var).exp());
    }

    if grid.sum() <= 0.0 {
        // Only possible when σ is so small that every kernel underflows.
        return Err(Error::param(format!(
            "sigma {sigma} too small for grid size {k}: all kernel values underflow"
        )));
    }
    PersistencePdf::from_grid(grid, sigma)
}

/// Cellwise square root of the density, rescaled to unit discrete norm.
pub fn sqrt_transform(p: &PersistencePdf) -> SqrtDensity {
    let mut g = p.grid().clone();
    g.as_mut_slice().iter_mut().for_each(|v| *v = v.sqrt());
    SqrtDensity::from_grid(g).expect("sqrt of a valid pdf has positive norm")
}

/// KDE followed by the square-root transform.
pub fn densify(pd: &PersistenceDiagram, params: DensityParams) -> Result<SqrtDensity> {
    Ok(sqrt_transform(&kde(pd, params.sigma, params.k)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_pairs(points.to_vec()).unwrap()
    }

    fn center(k: usize, i: usize) -> f64 {
        Grid::cell_center(k, i)
    }

    /// Direct evaluation of the truncated mixture at every cell, independent of
    /// the windowed loop in `kde`.
    fn mixture_oracle(points: &[(f64, f64)], sigma: f64, k: usize) -> Vec<f64> {
        let mut out = vec![0.0; k * k];
        for row in 0..k {
            for col in 0..k {
                let (cx, cy) = (Grid::cell_center(k, col), Grid::cell_center(k, row));
                for &(x, y) in points {
                    let r2 = (cx - x).powi(2) + (cy - y).powi(2);
                    let home = Grid::cell_of(k, x) == col && Grid::cell_of(k, y) == row;
                    if home || r2 <= (KERNEL_RADIUS * sigma).powi(2) {
                        out[row * k + col] += (-r2 / (2.0 * sigma * sigma)).exp();
                    }
                }
            }
        }
        let total: f64 = out.iter().sum();
        out.iter().map(|v| v / total).collect()
    }

    #[test]
    fn single_point_is_symmetric_unimodal() {
        let p = kde_points(&[(0.5, 0.5)], 0.05, 64).unwrap();
        let g = p.grid();
        assert!((g.sum() - 1.0).abs() < 1e-12);
        assert_eq!(g.get(32, 32), g.max());
        for a in 0..32 {
            for b in 0..32 {
                let v = g.get(32 + a, 32 + b);
                assert_eq!(v, g.get(31 - a, 32 + b));
                assert_eq!(v, g.get(32 + a, 31 - b));
                assert_eq!(v, g.get(31 - a, 31 - b));
            }
        }
    }

    #[test]
    fn matches_direct_mixture() {
        let pts = [
            (0.25, 0.75),
            (0.75, 0.25),
            (0.02, 0.98),
            (0.5, 0.51),
            (0.0, 1.0),
        ];
        for (sigma, k) in [(0.05, 64), (0.01, 50), (0.3, 17)] {
            let p = kde_points(&pts, sigma, k).unwrap();
            let oracle = mixture_oracle(&pts, sigma, k);
            for (a, b) in p.grid().as_slice().iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-15, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn two_modes_equal_and_order_free() {
        // mirror images under (x, y) -> (1 - y, 1 - x), both on cell centers
        let (p, q) = (
            (center(64, 17), center(64, 31)),
            (center(64, 32), center(64, 46)),
        );
        let a = kde(&diagram(&[p, q]), 0.05, 64).unwrap();
        let b = kde(&diagram(&[q, p]), 0.05, 64).unwrap();
        assert_eq!(a, b);
        let g = a.grid();
        let (m1, m2) = (g.get(31, 17), g.get(46, 32));
        assert!((m1 - m2).abs() < 1e-15 * m1);
        assert!(m1.max(m2) == g.max());
    }

    #[test]
    fn deterministic() {
        let d = diagram(&[(0.1, 0.3), (0.2, 0.9), (0.4, 0.45)]);
        assert_eq!(kde(&d, 0.07, 40).unwrap(), kde(&d, 0.07, 40).unwrap());
    }

    #[test]
    fn adding_a_point_changes_grid() {
        let a = kde(&diagram(&[(0.1, 0.3)]), 0.05, 32).unwrap();
        let b = kde(&diagram(&[(0.1, 0.3), (0.6, 0.9)]), 0.05, 32).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn kde_errors() {
        let empty = PersistenceDiagram::empty(Some(1));
        assert!(matches!(kde(&empty, 0.05, 64), Err(Error::EmptyDiagram)));
        let d = diagram(&[(0.1, 0.3)]);
        assert!(matches!(kde(&d, 0.0, 64), Err(Error::Parameter(_))));
        assert!(matches!(kde(&d, 0.05, 1), Err(Error::Parameter(_))));
        let outside = diagram(&[(0.1, 1.3)]);
        assert!(matches!(kde(&outside, 0.05, 64), Err(Error::Range { .. })));
        let essential = PersistenceDiagram::new(Some(0), vec![], vec![0.0]).unwrap();
        assert!(kde(&essential, 0.05, 64).is_err());
    }

    #[test]
    fn tiny_sigma_keeps_home_cell() {
        let p = kde(&diagram(&[(center(16, 8), center(16, 11))]), 1e-4, 16).unwrap();
        assert_eq!(p.grid().get(11, 8), 1.0);
        assert!(kde(&diagram(&[(0.5, 0.7)]), 1e-4, 16).is_err());
    }

    #[test]
    fn uniform_sqrt_is_one() {
        let u = PersistencePdf::uniform(8).unwrap();
        let s = sqrt_transform(&u);
        for &v in s.grid().as_slice() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!((s.grid().norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_round_trip_recovers_pdf() {
        let p = kde(&diagram(&[(0.3, 0.6), (0.1, 0.2)]), 0.08, 32).unwrap();
        let back = sqrt_transform(&p).to_pdf(p.sigma()).unwrap();
        assert!(back.grid().max_abs_diff(p.grid()).unwrap() < 1e-9);
    }

    #[test]
    fn sqrt_flattens_mode() {
        let p = kde_points(&[(0.5, 0.5)], 0.05, 64).unwrap();
        let s = sqrt_transform(&p);
        let (pg, sg) = (p.grid(), s.grid());
        assert_eq!(sg.get(32, 32), sg.max());
        let probe = (32, 38);
        let ratio_p = pg.get(probe.0, probe.1) / pg.max();
        let ratio_s = sg.get(probe.0, probe.1) / sg.max();
        assert!(ratio_s > ratio_p);
        assert!((ratio_s - ratio_p.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn far_apart_kernels_are_orthogonal() {
        let a = densify(&diagram(&[(0.1, 0.2)]), DensityParams::default()).unwrap();
        let b = densify(
            &diagram(&[(0.1, 0.2 + 10.0 * 0.05 + 1e-3)]),
            DensityParams::default(),
        )
        .unwrap();
        assert!(a.grid().inner(b.grid()).unwrap() < 1e-6);
    }

    #[test]
    fn sqrt_density_rejects_negative_and_zero() {
        let mut g = Grid::filled(4, 1.0);
        g.set(0, 0, -0.1);
        assert!(SqrtDensity::from_grid(g).is_err());
        assert!(SqrtDensity::from_grid(Grid::zeros(4)).is_err());
    }
}
