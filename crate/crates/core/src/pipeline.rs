//! Glue between persistence and density estimation: choosing which homology
//! dimensions feed a density and normalizing a dataset on one shared scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::{densify, DensityParams, SqrtDensity};
use crate::embedding::PointCloud;
use crate::error::{Error, Result};
use crate::persistence::{cloud_diagrams, global_scale, normalize_diagram, PersistenceDiagram};

/// Which homology dimensions make up the diagram used downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HomologySelection {
    H0,
    H1,
    /// H0 and H1 pooled into one multiset.
    Both,
}

impl HomologySelection {
    pub fn select(self, h0: &PersistenceDiagram, h1: &PersistenceDiagram) -> PersistenceDiagram {
        match self {
            HomologySelection::H0 => h0.clone(),
            HomologySelection::H1 => h1.clone(),
            HomologySelection::Both => PersistenceDiagram::merge(&[h0, h1]),
        }
    }
}

impl FromStr for HomologySelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" | "h0" | "H0" => Ok(HomologySelection::H0),
            "1" | "h1" | "H1" => Ok(HomologySelection::H1),
            "all" | "both" => Ok(HomologySelection::Both),
            other => Err(Error::param(format!(
                "unknown homology selection '{other}' (use 0, 1 or all)"
            ))),
        }
    }
}

impl fmt::Display for HomologySelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HomologySelection::H0 => "0",
            HomologySelection::H1 => "1",
            HomologySelection::Both => "all",
        })
    }
}

/// Rips parameters for turning clouds into diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceParams {
    pub max_scale: f64,
    pub temporal_links: bool,
    pub selection: HomologySelection,
}

impl Default for PersistenceParams {
    fn default() -> Self {
        PersistenceParams {
            max_scale: f64::INFINITY,
            temporal_links: false,
            selection: HomologySelection::Both,
        }
    }
}

/// Raw (unnormalized) diagram of a cloud under the given selection.
pub fn cloud_diagram(cloud: &PointCloud, params: &PersistenceParams) -> Result<PersistenceDiagram> {
    let (h0, h1) = cloud_diagrams(cloud, params.max_scale, params.temporal_links)?;
    Ok(params.selection.select(&h0, &h1))
}

/// Normalizes every diagram by the dataset-wide scale and returns that scale.
pub fn normalize_all(diagrams: &[PersistenceDiagram]) -> Result<(f64, Vec<PersistenceDiagram>)> {
    let scale = global_scale(diagrams)?;
    let normalized = diagrams
        .iter()
        .map(|d| normalize_diagram(d, scale))
        .collect::<Result<Vec<_>>>()?;
    Ok((scale, normalized))
}

/// Densifies normalized diagrams, naming the offending index on failure.
pub fn densify_all(
    diagrams: &[PersistenceDiagram],
    params: DensityParams,
) -> Result<Vec<SqrtDensity>> {
    use rayon::prelude::*;
    diagrams
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            densify(d, params).map_err(|e| match e {
                Error::EmptyDiagram => Error::Config(format!("diagram #{i} is empty")),
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_parses_and_displays() {
        for s in ["0", "1", "all"] {
            let sel: HomologySelection = s.parse().unwrap();
            assert_eq!(sel.to_string(), s);
        }
        assert!("2".parse::<HomologySelection>().is_err());
    }

    #[test]
    fn both_pools_pairs() {
        let h0 = PersistenceDiagram::new(Some(0), vec![(0.0, 1.0)], vec![0.0]).unwrap();
        let h1 = PersistenceDiagram::new(Some(1), vec![(1.0, 1.5)], vec![]).unwrap();
        let both = HomologySelection::Both.select(&h0, &h1);
        assert_eq!(both.homology_dim, None);
        assert_eq!(both.len(), 2);
        assert_eq!(both.essential(), &[0.0]);
    }

    #[test]
    fn normalize_all_uses_one_scale() {
        let a = PersistenceDiagram::from_pairs(vec![(0.0, 2.0)]).unwrap();
        let b = PersistenceDiagram::from_pairs(vec![(1.0, 4.0)]).unwrap();
        let (scale, n) = normalize_all(&[a, b]).unwrap();
        assert_eq!(scale, 4.0);
        assert_eq!(n[0].pairs(), &[(0.0, 0.5)]);
        assert_eq!(n[1].pairs(), &[(0.25, 1.0)]);
    }
}
