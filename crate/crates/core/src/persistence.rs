//! Vietoris-Rips persistence in homology dimensions 0 and 1.
//!
//! [`build_rips`] produces a [`Filtration`] of vertices, edges and triangles;
//! [`compute_persistence`] extracts the H0 and H1 pairs over Z/2.
//! [`h0_unionfind`] is an independent Kruskal-based route to the H0 diagram.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::embedding::PointCloud;
use crate::error::{Error, Result};

/// A vertex, edge or triangle with its filtration value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex {
    verts: [usize; 3],
    dim: usize,
    birth: f64,
}

impl Simplex {
    pub fn vertex(v: usize) -> Self {
        Simplex {
            verts: [v, 0, 0],
            dim: 0,
            birth: 0.0,
        }
    }

    pub fn edge(a: usize, b: usize, birth: f64) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Simplex {
            verts: [a, b, 0],
            dim: 1,
            birth,
        }
    }

    pub fn triangle(a: usize, b: usize, c: usize, birth: f64) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        Simplex {
            verts: v,
            dim: 2,
            birth,
        }
    }

    /// Sorted vertex indices.
    pub fn vertices(&self) -> &[usize] {
        &self.verts[..=self.dim]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn birth(&self) -> f64 {
        self.birth
    }

    fn order(&self, other: &Simplex) -> Ordering {
        self.birth
            .total_cmp(&other.birth)
            .then(self.dim.cmp(&other.dim))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

/// Simplices sorted by `(birth, dimension, vertices)`.
#[derive(Debug, Clone, Default)]
pub struct Filtration {
    simplices: Vec<Simplex>,
}

impl Filtration {
    /// Sorts the given simplices into filtration order. Face closure is not
    /// checked here; [`compute_persistence`] rejects filtrations that lack it.
    pub fn from_simplices(mut simplices: Vec<Simplex>) -> Self {
        simplices.sort_by(Simplex::order);
        Filtration { simplices }
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn count_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim == dim).count()
    }

    /// True if every simplex is born no earlier than each of its faces and
    /// every face precedes it.
    pub fn is_monotone(&self) -> bool {
        self.face_indices().is_ok()
    }

    /// Boundary of every simplex as sorted positions in the filtration.
    fn face_indices(&self) -> Result<Vec<Vec<usize>>> {
        let mut vertex_at: HashMap<usize, usize> = HashMap::new();
        let mut edge_at: HashMap<(usize, usize), usize> = HashMap::new();
        let mut boundaries = Vec::with_capacity(self.simplices.len());

        for (idx, s) in self.simplices.iter().enumerate() {
            let faces: Vec<usize> = match s.dim {
                0 => Vec::new(),
                1 => {
                    let [a, b, _] = s.verts;
                    vec![lookup(&vertex_at, &a, s)?, lookup(&vertex_at, &b, s)?]
                }
                2 => {
                    let [a, b, c] = s.verts;
                    vec![
                        lookup(&edge_at, &(a, b), s)?,
                        lookup(&edge_at, &(a, c), s)?,
                        lookup(&edge_at, &(b, c), s)?,
                    ]
                }
                d => {
                    return Err(Error::Structural(format!("unsupported dimension {d}")));
                }
            };
            for &f in &faces {
                if self.simplices[f].birth > s.birth {
                    return Err(Error::Structural(format!(
                        "simplex {:?} born before its face {:?}",
                        s.vertices(),
                        self.simplices[f].vertices()
                    )));
                }
            }
            let mut faces = faces;
            faces.sort_unstable();

            let dup = match s.dim {
                0 => vertex_at.insert(s.verts[0], idx).is_some(),
                1 => edge_at.insert((s.verts[0], s.verts[1]), idx).is_some(),
                _ => false,
            };
            if dup {
                return Err(Error::Structural(format!(
                    "duplicate simplex {:?}",
                    s.vertices()
                )));
            }
            boundaries.push(faces);
        }
        Ok(boundaries)
    }
}

fn lookup<K: std::hash::Hash + Eq>(map: &HashMap<K, usize>, key: &K, s: &Simplex) -> Result<usize> {
    map.get(key).copied().ok_or_else(|| {
        Error::Structural(format!(
            "face of simplex {:?} missing or ordered after it",
            s.vertices()
        ))
    })
}

/// Vietoris-Rips filtration truncated at `max_scale`, up to triangles.
///
/// With `temporal_links`, consecutive points `(t, t+1)` are joined by an
/// edge born at 0 regardless of their distance.
pub fn build_rips(cloud: &PointCloud, max_scale: f64, temporal_links: bool) -> Result<Filtration> {
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if max_scale.is_nan() || max_scale <= 0.0 {
        return Err(Error::param("max_scale must be positive"));
    }
    let n = cloud.len();
    let edge_birth = edge_births(cloud, Some(max_scale), temporal_links);

    let mut simplices: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(b) = edge_birth[i * n + j] {
                simplices.push(Simplex::edge(i, j, b));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let Some(bij) = edge_birth[i * n + j] else {
                continue;
            };
            for k in j + 1..n {
                if let (Some(bik), Some(bjk)) = (edge_birth[i * n + k], edge_birth[j * n + k]) {
                    simplices.push(Simplex::triangle(i, j, k, bij.max(bik).max(bjk)));
                }
            }
        }
    }
    Ok(Filtration::from_simplices(simplices))
}

/// Dense upper-triangular table of edge births; `None` for absent edges.
fn edge_births(
    cloud: &PointCloud,
    max_scale: Option<f64>,
    temporal_links: bool,
) -> Vec<Option<f64>> {
    let n = cloud.len();
    let mut births = vec![None; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = cloud.distance(i, j);
            if max_scale.is_none_or(|m| d <= m) {
                births[i * n + j] = Some(d);
            }
        }
    }
    if temporal_links {
        for t in 1..n {
            births[(t - 1) * n + t] = Some(0.0);
        }
    }
    births
}

/// Persistence pairs in one homology dimension.
///
/// `homology_dim` is `None` for diagrams merged across dimensions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    pub homology_dim: Option<usize>,
    pairs: Vec<(f64, f64)>,
    essential: Vec<f64>,
}

impl PersistenceDiagram {
    pub fn new(
        homology_dim: Option<usize>,
        pairs: Vec<(f64, f64)>,
        essential: Vec<f64>,
    ) -> Result<Self> {
        for &(b, d) in &pairs {
            if !b.is_finite() || !d.is_finite() {
                return Err(Error::NonFinite("persistence pair"));
            }
            if b < 0.0 || d <= b {
                return Err(Error::Range {
                    value: d,
                    what: "pair needs 0 <= birth < death",
                });
            }
        }
        for &b in &essential {
            if !b.is_finite() || b < 0.0 {
                return Err(Error::Range {
                    value: b,
                    what: "essential birth must be finite and >= 0",
                });
            }
        }
        Ok(PersistenceDiagram {
            homology_dim,
            pairs,
            essential,
        })
    }

    /// Finite diagram from `(birth, death)` points.
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(None, pairs, Vec::new())
    }

    pub fn empty(homology_dim: Option<usize>) -> Self {
        PersistenceDiagram {
            homology_dim,
            pairs: Vec::new(),
            essential: Vec::new(),
        }
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn essential(&self) -> &[f64] {
        &self.essential
    }

    /// Number of finite pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty() && self.essential.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.essential.is_empty()
    }

    /// Largest finite coordinate (the largest death), or 0 when there are none.
    pub fn max_finite(&self) -> f64 {
        self.pairs
            .iter()
            .map(|&(_, d)| d)
            .chain(self.essential.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Pairs sorted by `(birth, death)`, for multiset comparison.
    pub fn sorted_pairs(&self) -> Vec<(f64, f64)> {
        let mut p = self.pairs.clone();
        p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        p
    }

    pub fn sorted_essential(&self) -> Vec<f64> {
        let mut e = self.essential.clone();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Union of several diagrams as one multiset, dimension labels dropped.
    pub fn merge(diagrams: &[&PersistenceDiagram]) -> Self {
        let homology_dim = match diagrams {
            [] => None,
            [first, rest @ ..] if rest.iter().all(|d| d.homology_dim == first.homology_dim) => {
                first.homology_dim
            }
            _ => None,
        };
        PersistenceDiagram {
            homology_dim,
            pairs: diagrams
                .iter()
                .flat_map(|d| d.pairs.iter().copied())
                .collect(),
            essential: diagrams
                .iter()
                .flat_map(|d| d.essential.iter().copied())
                .collect(),
        }
    }
}

/// Persistence pairs of `f` over Z/2.
///
/// H0 comes from reducing the edge columns of the boundary matrix. H1 comes
/// from reducing edge coboundaries in reverse filtration order, skipping edges
/// already paired in H0 (clearing); the pairs are the same as those of the
/// boundary matrix, but far fewer columns need work on Rips complexes.
/// Zero-persistence pairs are discarded. Unpaired vertices and edges become
/// essential bars.
pub fn compute_persistence(f: &Filtration) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    let boundaries = f.face_indices()?;
    let simplices = f.simplices();
    let n = simplices.len();

    let mut h0 = PersistenceDiagram::empty(Some(0));
    let mut h1 = PersistenceDiagram::empty(Some(1));

    // H0: edge columns, pivot = latest vertex
    let mut vertex_owner: Vec<Option<usize>> = vec![None; n];
    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut negative_edge = vec![false; n];
    for j in (0..n).filter(|&j| simplices[j].dim == 1) {
        let col = reduce(boundaries[j].clone(), &vertex_owner, &reduced);
        if let Some(&low) = col.last() {
            vertex_owner[low] = Some(j);
            negative_edge[j] = true;
            let (birth, death) = (simplices[low].birth, simplices[j].birth);
            if death > birth {
                h0.pairs.push((birth, death));
            }
            reduced[j] = col;
        }
    }
    for (v, s) in simplices.iter().enumerate() {
        if s.dim == 0 && vertex_owner[v].is_none() {
            h0.essential.push(s.birth);
        }
    }

    // H1: coboundary columns, rows keyed by `n - 1 - position` so that the
    // earliest coface is the last entry
    let mut cofaces: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (t, faces) in boundaries.iter().enumerate() {
        if simplices[t].dim == 2 {
            for &e in faces {
                cofaces[e].push(n - 1 - t);
            }
        }
    }
    let mut triangle_owner: Vec<Option<usize>> = vec![None; n];
    let mut coreduced: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in (0..n).rev() {
        if simplices[e].dim != 1 || negative_edge[e] {
            continue;
        }
        let mut col = std::mem::take(&mut cofaces[e]);
        col.reverse();
        let col = reduce(col, &triangle_owner, &coreduced);
        match col.last() {
            Some(&low) => {
                triangle_owner[low] = Some(e);
                let (birth, death) = (simplices[e].birth, simplices[n - 1 - low].birth);
                if death > birth {
                    h1.pairs.push((birth, death));
                }
                coreduced[e] = col;
            }
            None => h1.essential.push(simplices[e].birth),
        }
    }
    Ok((h0, h1))
}

/// Adds earlier reduced columns until the lowest entry of `col` is unclaimed.
fn reduce(mut col: Vec<usize>, owner: &[Option<usize>], reduced: &[Vec<usize>]) -> Vec<usize> {
    while let Some(&low) = col.last() {
        match owner[low] {
            Some(o) => col = symmetric_difference(&col, &reduced[o]),
            None => break,
        }
    }
    col
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// H0 diagram from the minimum spanning tree of the complete distance graph.
pub fn h0_unionfind(cloud: &PointCloud, temporal_links: bool) -> Result<PersistenceDiagram> {
    if cloud.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    let n = cloud.len();
    let births = edge_births(cloud, None, temporal_links);
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            if let Some(b) = births[i * n + j] {
                edges.push((b, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut sets = DisjointSet::new(n);
    let mut pairs = Vec::with_capacity(n - 1);
    for (w, i, j) in edges {
        if sets.union(i, j) && w > 0.0 {
            pairs.push((0.0, w));
        }
    }
    Ok(PersistenceDiagram {
        homology_dim: Some(0),
        pairs,
        essential: vec![0.0; sets.components],
    })
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        self.components -= 1;
        true
    }
}

/// Divides every coordinate by `scale`; essential bars are capped at death 1.
pub fn normalize_diagram(pd: &PersistenceDiagram, scale: f64) -> Result<PersistenceDiagram> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::param(
            "normalization scale must be positive and finite",
        ));
    }
    let max = pd.max_finite();
    if max > scale {
        return Err(Error::Range {
            value: max,
            what: "diagram coordinate exceeds normalization scale",
        });
    }
    let pairs = pd
        .pairs
        .iter()
        .map(|&(b, d)| (b / scale, d / scale))
        .chain(pd.essential.iter().map(|&b| (b / scale, 1.0)))
        .filter(|&(b, d)| d > b)
        .collect();
    Ok(PersistenceDiagram {
        homology_dim: pd.homology_dim,
        pairs,
        essential: Vec::new(),
    })
}

/// Dataset-wide normalization scale: the largest finite coordinate across
/// all diagrams.
pub fn global_scale<'a>(diagrams: impl IntoIterator<Item = &'a PersistenceDiagram>) -> Result<f64> {
    let scale = diagrams
        .into_iter()
        .map(PersistenceDiagram::max_finite)
        .fold(0.0, f64::max);
    if scale > 0.0 {
        Ok(scale)
    } else {
        Err(Error::param(
            "cannot derive a normalization scale: no diagram has a positive coordinate",
        ))
    }
}

/// Both diagrams of a cloud, straight from the Rips filtration.
pub fn cloud_diagrams(
    cloud: &PointCloud,
    max_scale: f64,
    temporal_links: bool,
) -> Result<(PersistenceDiagram, PersistenceDiagram)> {
    compute_persistence(&build_rips(cloud, max_scale, temporal_links)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud(points: &[&[f64]]) -> PointCloud {
        PointCloud::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    type Bars = Vec<(f64, f64)>;

    /// Plain left-to-right reduction of the full boundary matrix.
    fn boundary_oracle(f: &Filtration) -> (Bars, Bars, usize) {
        let boundaries = f.face_indices().unwrap();
        let s = f.simplices();
        let n = s.len();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        let (mut h0, mut h1) = (Vec::new(), Vec::new());
        for j in 0..n {
            let col = reduce(boundaries[j].clone(), &owner, &cols);
            if let Some(&low) = col.last() {
                owner[low] = Some(j);
                let pair = (s[low].birth, s[j].birth);
                if pair.1 > pair.0 {
                    if s[j].dim == 1 {
                        h0.push(pair)
                    } else {
                        h1.push(pair)
                    }
                }
            }
            cols[j] = col;
        }
        let essential_h1 = (0..n)
            .filter(|&j| s[j].dim == 1 && cols[j].is_empty() && owner[j].is_none())
            .count();
        let sort = |mut v: Vec<(f64, f64)>| {
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            v
        };
        (sort(h0), sort(h1), essential_h1)
    }

    #[test]
    fn cohomology_matches_boundary_reduction() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for trial in 0..60 {
            let n = rng.random_range(3..=22);
            let points = (0..n)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let c = PointCloud::new(points).unwrap();
            let scale = if trial % 3 == 0 { 0.35 } else { f64::INFINITY };
            let f = build_rips(&c, scale, trial % 2 == 0).unwrap();
            let (h0, h1) = compute_persistence(&f).unwrap();
            let (o0, o1, ess) = boundary_oracle(&f);
            assert_eq!(h0.sorted_pairs(), o0);
            assert_eq!(h1.sorted_pairs(), o1);
            assert_eq!(h1.essential().len(), ess);
        }
    }

    fn unit_square() -> PointCloud {
        cloud(&[&[0., 0.], &[1., 0.], &[1., 1.], &[0., 1.]])
    }

    #[test]
    fn two_point_rips() {
        let c = cloud(&[&[0.0], &[0.4]]);
        let f = build_rips(&c, 1.0, false).unwrap();
        assert_eq!(f.count_dim(0), 2);
        assert_eq!(f.count_dim(1), 1);
        assert_eq!(f.count_dim(2), 0);
        assert_eq!(f.simplices()[2].birth(), 0.4);
    }

    #[test]
    fn temporal_link_overrides_distance() {
        let c = cloud(&[&[0.0], &[0.4]]);
        let f = build_rips(&c, 1.0, true).unwrap();
        let edge = f.simplices().iter().find(|s| s.dim() == 1).unwrap();
        assert_eq!(edge.birth(), 0.0);
    }

    #[test]
    fn temporal_link_added_beyond_max_scale() {
        let c = cloud(&[&[0.0], &[5.0], &[10.0]]);
        let f = build_rips(&c, 1.0, true).unwrap();
        assert_eq!(f.count_dim(1), 2);
        let (h0, _) = compute_persistence(&f).unwrap();
        assert!(h0.pairs().is_empty());
        assert_eq!(h0.essential(), &[0.0]);
    }

    #[test]
    fn unit_square_filtration_counts() {
        let f = build_rips(&unit_square(), 3.0, false).unwrap();
        let sides: Vec<_> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1 && s.birth() == 1.0)
            .collect();
        let diagonals: Vec<_> = f
            .simplices()
            .iter()
            .filter(|s| s.dim() == 1 && s.birth() == 2f64.sqrt())
            .collect();
        assert_eq!(sides.len(), 4);
        assert_eq!(diagonals.len(), 2);
        let triangles: Vec<_> = f.simplices().iter().filter(|s| s.dim() == 2).collect();
        assert_eq!(triangles.len(), 4);
        assert!(triangles.iter().all(|t| t.birth() == 2f64.sqrt()));
        assert!(f.is_monotone());
    }

    #[test]
    fn unit_square_h1_bar() {
        let f = build_rips(&unit_square(), 3.0, false).unwrap();
        let (h0, h1) = compute_persistence(&f).unwrap();
        assert_eq!(h1.pairs(), &[(1.0, 2f64.sqrt())]);
        assert!(h1.essential().is_empty());
        assert_eq!(h0.sorted_pairs(), vec![(0.0, 1.0); 3]);
        assert_eq!(h0.essential(), &[0.0]);
    }

    #[test]
    fn unfilled_cycle_is_essential() {
        let f = build_rips(&unit_square(), 1.2, false).unwrap();
        let (_, h1) = compute_persistence(&f).unwrap();
        assert!(h1.pairs().is_empty());
        assert_eq!(h1.essential(), &[1.0]);
    }

    #[test]
    fn two_points_merge_at_their_distance() {
        let c = cloud(&[&[0.0, 0.0], &[3.0, 4.0]]);
        let (h0, h1) = cloud_diagrams(&c, 10.0, false).unwrap();
        assert_eq!(h0.pairs(), &[(0.0, 5.0)]);
        assert_eq!(h0.essential(), &[0.0]);
        assert!(h1.is_empty());
    }

    #[test]
    fn missing_face_is_structural_error() {
        let f = Filtration::from_simplices(vec![Simplex::vertex(0), Simplex::edge(0, 1, 0.5)]);
        assert!(matches!(compute_persistence(&f), Err(Error::Structural(_))));
        assert!(!f.is_monotone());
    }

    #[test]
    fn face_born_later_is_structural_error() {
        let f = Filtration::from_simplices(vec![
            Simplex::vertex(0),
            Simplex::vertex(1),
            Simplex::vertex(2),
            Simplex::edge(0, 1, 0.1),
            Simplex::edge(0, 2, 0.1),
            Simplex::edge(1, 2, 0.9),
            Simplex::triangle(0, 1, 2, 0.5),
        ]);
        assert!(matches!(compute_persistence(&f), Err(Error::Structural(_))));
    }

    #[test]
    fn collinear_unionfind() {
        let c = cloud(&[&[0.0], &[1.0], &[2.0]]);
        let h0 = h0_unionfind(&c, false).unwrap();
        assert_eq!(h0.sorted_pairs(), vec![(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(h0.essential().len(), 1);
    }

    #[test]
    fn single_point_unionfind() {
        let c = cloud(&[&[2.0, 3.0]]);
        let h0 = h0_unionfind(&c, false).unwrap();
        assert!(h0.pairs().is_empty());
        assert_eq!(h0.essential(), &[0.0]);
    }

    #[test]
    fn normalize_divides_and_caps() {
        let pd = PersistenceDiagram::new(Some(1), vec![(1.0, 2f64.sqrt())], vec![]).unwrap();
        let n = normalize_diagram(&pd, 2.0).unwrap();
        assert_eq!(n.pairs()[0].0, 0.5);
        assert!((n.pairs()[0].1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let pd = PersistenceDiagram::new(Some(0), vec![(0.0, 3.0)], vec![0.5]).unwrap();
        let n = normalize_diagram(&pd, 4.0).unwrap();
        assert_eq!(n.sorted_pairs(), vec![(0.0, 0.75), (0.125, 1.0)]);
        assert!(n.is_finite());
    }

    #[test]
    fn normalize_empty_and_out_of_range() {
        let e = PersistenceDiagram::empty(Some(1));
        assert!(normalize_diagram(&e, 3.0).unwrap().is_empty());
        let pd = PersistenceDiagram::from_pairs(vec![(0.0, 3.0)]).unwrap();
        assert!(matches!(
            normalize_diagram(&pd, 2.0),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            normalize_diagram(&pd, 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn diagram_rejects_inverted_pair() {
        assert!(PersistenceDiagram::from_pairs(vec![(0.5, 0.5)]).is_err());
        assert!(PersistenceDiagram::from_pairs(vec![(0.5, 0.2)]).is_err());
    }

    #[test]
    fn bad_max_scale_rejected() {
        assert!(build_rips(&unit_square(), 0.0, false).is_err());
        assert!(build_rips(&unit_square(), f64::NAN, false).is_err());
    }
}
