//! Persistence diagrams as points on the unit Hilbert sphere.
//!
//! A diagram is smoothed into a probability density on the unit square,
//! discretized on a `K x K` grid, and mapped to its square root. Square-root
//! densities have unit L2 norm, so distances, geodesics, means and principal
//! components are all closed-form spherical operations. Wasserstein distances
//! between the raw diagrams are provided as the reference metric.
//!
//! Pipeline:
//!
//! ```text
//! time series -> delay_embed -> build_rips -> compute_persistence
//!             -> normalize_diagram -> kde -> sqrt_transform -> sphere::*
//! ```

// `!(x > 0.0)` is used on purpose so NaN falls into the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod density;
pub mod embedding;
pub mod error;
pub mod grid;
pub mod io;
pub mod persistence;
pub mod pipeline;
pub mod sphere;
pub mod wasserstein;

pub use analysis::{DistanceMatrix, Metric};
pub use density::{
    densify, kde, kde_points, sqrt_transform, DensityParams, PersistencePdf, SqrtDensity,
};
pub use embedding::{delay_embed, PointCloud, TimeSeries};
pub use error::{Error, Result};
pub use grid::Grid;
pub use persistence::{
    build_rips, compute_persistence, h0_unionfind, normalize_diagram, Filtration,
    PersistenceDiagram, Simplex,
};
pub use pipeline::{HomologySelection, PersistenceParams};
pub use sphere::{PgaModel, TangentVector};
pub use wasserstein::{wasserstein, Order};
