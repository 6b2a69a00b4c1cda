//! L1/L2 Wasserstein distances between persistence diagrams.
//!
//! Points may be matched to each other or to their orthogonal projection onto
//! the diagonal. The problem is solved as a square assignment of size
//! `|X| + |Y|` with the Hungarian algorithm.

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

/// Ground norm and exponent: `L1` sums L1 costs, `L2` is the square root of
/// summed squared Euclidean costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    L1,
    L2,
}

impl Order {
    pub fn from_q(q: u32) -> Result<Self> {
        match q {
            1 => Ok(Order::L1),
            2 => Ok(Order::L2),
            _ => Err(Error::param(format!(
                "Wasserstein order must be 1 or 2, got {q}"
            ))),
        }
    }

    /// Cost of moving `a` onto `b`, raised to the order's power.
    fn cost(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let (dx, dy) = (a.0 - b.0, a.1 - b.1);
        match self {
            Order::L1 => dx.abs() + dy.abs(),
            Order::L2 => dx * dx + dy * dy,
        }
    }

    /// Cost of sending a point to the nearest diagonal point under this norm.
    fn diagonal_cost(self, p: (f64, f64)) -> f64 {
        let gap = p.1 - p.0;
        match self {
            Order::L1 => gap.abs(),
            Order::L2 => gap * gap / 2.0,
        }
    }

    fn finish(self, total: f64) -> f64 {
        match self {
            Order::L1 => total,
            Order::L2 => total.sqrt(),
        }
    }
}

/// One side of a matched pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Point(usize),
    Diagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// `(slot in X, slot in Y)` for every off-diagonal point of either diagram.
    pub pairs: Vec<(Slot, Slot)>,
    /// Optimal objective: sum of per-pair costs (squared for L2).
    pub cost: f64,
}

/// Orthogonal projection onto the diagonal.
pub fn diagonal_projection(p: (f64, f64)) -> (f64, f64) {
    let m = (p.0 + p.1) / 2.0;
    (m, m)
}

fn require_finite(pd: &PersistenceDiagram) -> Result<()> {
    if pd.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            "diagram has essential bars; cap them with normalize_diagram first",
        ))
    }
}

/// Optimal Wasserstein distance and a matching attaining it.
pub fn wasserstein(
    x: &PersistenceDiagram,
    y: &PersistenceDiagram,
    q: Order,
) -> Result<(f64, Matching)> {
    require_finite(x)?;
    require_finite(y)?;
    let (xs, ys) = (x.pairs(), y.pairs());
    let (n, m) = (xs.len(), ys.len());
    let size = n + m;
    if size == 0 {
        return Ok((
            0.0,
            Matching {
                pairs: Vec::new(),
                cost: 0.0,
            },
        ));
    }

    // rows: X points then Y's diagonal slots; cols: Y points then X's diagonal slots
    let mut cost = vec![f64::INFINITY; size * size];
    for i in 0..n {
        for j in 0..m {
            cost[i * size + j] = q.cost(xs[i], ys[j]);
        }
        cost[i * size + m + i] = q.diagonal_cost(xs[i]);
    }
    for j in 0..m {
        cost[(n + j) * size + j] = q.diagonal_cost(ys[j]);
        for i in 0..n {
            cost[(n + j) * size + m + i] = 0.0;
        }
    }

    let assignment = hungarian(&cost, size);
    let mut pairs = Vec::with_capacity(size);
    let mut total = 0.0;
    for (row, &col) in assignment.iter().enumerate() {
        let c = cost[row * size + col];
        let pair = match (row < n, col < m) {
            (true, true) => (Slot::Point(row), Slot::Point(col)),
            (true, false) => (Slot::Point(row), Slot::Diagonal),
            (false, true) => (Slot::Diagonal, Slot::Point(col)),
            (false, false) => continue,
        };
        total += c;
        pairs.push(pair);
    }
    Ok((q.finish(total), Matching { pairs, cost: total }))
}

/// Minimum-cost perfect assignment on a dense `size × size` matrix; returns
/// the column assigned to each row.
fn hungarian(cost: &[f64], size: usize) -> Vec<usize> {
    // potentials and matching, 1-indexed with a virtual column 0
    let mut u = vec![0.0f64; size + 1];
    let mut v = vec![0.0f64; size + 1];
    let mut row_of_col = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];

    for i in 1..=size {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; size + 1];
        let mut used = vec![false; size + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * size + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; size];
    for j in 1..=size {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

/// Largest `|X| + |Y|` accepted by [`brute_force`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Exhaustive minimum over every partial matching of X into Y, unmatched
/// points of either diagram paying their diagonal cost.
pub fn brute_force(x: &PersistenceDiagram, y: &PersistenceDiagram, q: Order) -> Result<f64> {
    require_finite(x)?;
    require_finite(y)?;
    if x.len() + y.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::param(format!(
            "brute force limited to |X|+|Y| <= {BRUTE_FORCE_LIMIT}, got {}",
            x.len() + y.len()
        )));
    }

    fn search(
        xs: &[(f64, f64)],
        ys: &[(f64, f64)],
        q: Order,
        i: usize,
        used: &mut Vec<bool>,
        acc: f64,
        best: &mut f64,
    ) {
        if i == xs.len() {
            let rest: f64 = ys
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(&p, _)| q.diagonal_cost(p))
                .sum();
            *best = best.min(acc + rest);
            return;
        }
        search(xs, ys, q, i + 1, used, acc + q.diagonal_cost(xs[i]), best);
        for j in 0..ys.len() {
            if !used[j] {
                used[j] = true;
                search(xs, ys, q, i + 1, used, acc + q.cost(xs[i], ys[j]), best);
                used[j] = false;
            }
        }
    }

    let mut best = f64::INFINITY;
    search(
        x.pairs(),
        y.pairs(),
        q,
        0,
        &mut vec![false; y.len()],
        0.0,
        &mut best,
    );
    Ok(q.finish(best))
}

/// Diagram at fraction `s` along the L2 geodesic from `x` to `y`: each matched
/// pair is interpolated linearly; diagonal partners are the orthogonal
/// projections. Points that land on the diagonal are dropped.
pub fn alexandrov_geodesic(
    x: &PersistenceDiagram,
    y: &PersistenceDiagram,
    s: f64,
) -> Result<PersistenceDiagram> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Range {
            value: s,
            what: "geodesic parameter must lie in [0, 1]",
        });
    }
    let (_, matching) = wasserstein(x, y, Order::L2)?;
    let (xs, ys) = (x.pairs(), y.pairs());
    let lerp =
        |a: (f64, f64), b: (f64, f64)| ((1.0 - s) * a.0 + s * b.0, (1.0 - s) * a.1 + s * b.1);

    let pairs = matching
        .pairs
        .iter()
        .filter_map(|pair| match *pair {
            (Slot::Point(i), Slot::Point(j)) => Some(lerp(xs[i], ys[j])),
            (Slot::Point(i), Slot::Diagonal) => Some(lerp(xs[i], diagonal_projection(xs[i]))),
            (Slot::Diagonal, Slot::Point(j)) => Some(lerp(diagonal_projection(ys[j]), ys[j])),
            (Slot::Diagonal, Slot::Diagonal) => None,
        })
        .filter(|&(b, d)| d > b)
        .collect();
    let dim = if x.homology_dim == y.homology_dim {
        x.homology_dim
    } else {
        None
    };
    PersistenceDiagram::new(dim, pairs, Vec::new())
}
