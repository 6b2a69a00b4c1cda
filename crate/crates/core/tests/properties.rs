use proptest::prelude::*;

use pdsphere::analysis::{knn_vote, loo_regression, pga_features, DistanceMatrix};
use pdsphere::density::{kde_points, SqrtDensity};
use pdsphere::sphere::{self, exp_map, geodesic, log_map};
use pdsphere::wasserstein::{alexandrov_geodesic, brute_force, Slot};
use pdsphere::{
    build_rips, compute_persistence, delay_embed, h0_unionfind, kde, wasserstein, Grid, Metric,
    Order, PersistenceDiagram, PointCloud, TimeSeries,
};

const K: usize = 8;

fn cloud_strategy(max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 3..=max)
}

fn diagram_strategy(max: usize) -> impl Strategy<Value = PersistenceDiagram> {
    prop::collection::vec((0.0..0.5f64, 0.01..0.5f64), 0..=max).prop_map(|v| {
        PersistenceDiagram::from_pairs(v.into_iter().map(|(b, l)| (b, b + l)).collect()).unwrap()
    })
}

fn root_strategy() -> impl Strategy<Value = SqrtDensity> {
    prop::collection::vec(0.0..1.0f64, K * K)
        .prop_filter("nonzero", |v| v.iter().any(|&x| x > 1e-3))
        .prop_map(|v| SqrtDensity::from_grid(Grid::from_vec(K, v).unwrap()).unwrap())
}

fn diagrams_of(points: &[Vec<f64>]) -> (PersistenceDiagram, PersistenceDiagram) {
    let cloud = PointCloud::new(points.to_vec()).unwrap();
    compute_persistence(&build_rips(&cloud, f64::INFINITY, false).unwrap()).unwrap()
}

fn close(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol)
}

/// Kuhn matching feasibility of the bottleneck distance at threshold `delta`.
fn bottleneck_at_most(x: &[(f64, f64)], y: &[(f64, f64)], delta: f64) -> bool {
    let (n, m) = (x.len(), y.len());
    let half = |p: &(f64, f64)| (p.1 - p.0) / 2.0;
    // left: x points then diagonal copies of y; right: y points then diagonal copies of x
    let edge = |l: usize, r: usize| match (l < n, r < m) {
        (true, true) => (x[l].0 - y[r].0).abs().max((x[l].1 - y[r].1).abs()) <= delta,
        (true, false) => r - m == l && half(&x[l]) <= delta,
        (false, true) => l - n == r && half(&y[r]) <= delta,
        (false, false) => true,
    };
    let size = n + m;
    let mut owner: Vec<Option<usize>> = vec![None; size];
    fn augment(
        l: usize,
        seen: &mut [bool],
        owner: &mut [Option<usize>],
        edge: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        for r in 0..owner.len() {
            if !seen[r] && edge(l, r) {
                seen[r] = true;
                if owner[r].is_none_or(|o| augment(o, seen, owner, edge)) {
                    owner[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }
    (0..size).all(|l| augment(l, &mut vec![false; size], &mut owner, &edge))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn embedding_count_and_coordinates(
        samples in prop::collection::vec(-10.0..10.0f64, 1..120),
        m in 1usize..5,
        tau in 1usize..8,
    ) {
        let series = TimeSeries::new(samples.clone()).unwrap();
        match delay_embed(&series, m, tau) {
            Ok(cloud) => {
                prop_assert_eq!(cloud.len(), samples.len() - (m - 1) * tau);
                for t in 0..cloud.len() {
                    for j in 0..m {
                        prop_assert_eq!(cloud.point(t)[j].to_bits(), samples[t + j * tau].to_bits());
                    }
                }
            }
            Err(_) => prop_assert!(samples.len() <= (m - 1) * tau),
        }
    }

    #[test]
    fn persistence_ignores_point_order(points in cloud_strategy(12), seed in any::<u64>()) {
        let mut shuffled = points.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize);
        }
        let (a0, a1) = diagrams_of(&points);
        let (b0, b1) = diagrams_of(&shuffled);
        prop_assert!(close(&a0.sorted_pairs(), &b0.sorted_pairs(), 1e-12));
        prop_assert!(close(&a1.sorted_pairs(), &b1.sorted_pairs(), 1e-12));
        prop_assert_eq!(a0.essential().len(), 1);
    }

    #[test]
    fn persistence_is_stable(
        points in cloud_strategy(10),
        noise in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 10),
        eps in 0.0..0.05f64,
    ) {
        let moved: Vec<Vec<f64>> = points
            .iter()
            .zip(&noise)
            .map(|(p, d)| {
                // every point moves by at most eps in the Euclidean norm
                let len = d[0].hypot(d[1]).max(1.0);
                vec![p[0] + eps * d[0] / len, p[1] + eps * d[1] / len]
            })
            .collect();
        let (a0, a1) = diagrams_of(&points);
        let (b0, b1) = diagrams_of(&moved);
        let slack = 2.0 * eps + 1e-12;
        prop_assert!(bottleneck_at_most(&a0.sorted_pairs(), &b0.sorted_pairs(), slack));
        prop_assert!(bottleneck_at_most(&a1.sorted_pairs(), &b1.sorted_pairs(), slack));
    }

    #[test]
    fn unionfind_matches_reduction(points in cloud_strategy(25), links in any::<bool>()) {
        let cloud = PointCloud::new(points).unwrap();
        let uf = h0_unionfind(&cloud, links).unwrap();
        let (h0, _) = compute_persistence(&build_rips(&cloud, f64::INFINITY, links).unwrap()).unwrap();
        prop_assert_eq!(uf.sorted_pairs(), h0.sorted_pairs());
        prop_assert_eq!(uf.sorted_essential(), h0.sorted_essential());
    }

    #[test]
    fn wasserstein_matches_exhaustive(x in diagram_strategy(4), y in diagram_strategy(4)) {
        for q in [Order::L1, Order::L2] {
            let (fast, matching) = wasserstein(&x, &y, q).unwrap();
            let slow = brute_force(&x, &y, q).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-12, "{} vs {}", fast, slow);
            let (mut seen_x, mut seen_y) = (vec![0; x.len()], vec![0; y.len()]);
            for (a, b) in &matching.pairs {
                if let Slot::Point(i) = a { seen_x[*i] += 1; }
                if let Slot::Point(j) = b { seen_y[*j] += 1; }
            }
            prop_assert!(seen_x.iter().chain(&seen_y).all(|&c| c == 1));
        }
    }

    #[test]
    fn wasserstein_is_a_metric(x in diagram_strategy(6), y in diagram_strategy(6), z in diagram_strategy(6)) {
        for q in [Order::L1, Order::L2] {
            let d = |a: &PersistenceDiagram, b: &PersistenceDiagram| wasserstein(a, b, q).unwrap().0;
            prop_assert_eq!(d(&x, &x), 0.0);
            prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12);
            prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
        }
    }

    #[test]
    fn alexandrov_geodesic_has_proportional_length(
        x in diagram_strategy(5),
        y in diagram_strategy(5),
        s in 0.0..=1.0f64,
    ) {
        let total = wasserstein(&x, &y, Order::L2).unwrap().0;
        let mid = alexandrov_geodesic(&x, &y, s).unwrap();
        let part = wasserstein(&x, &mid, Order::L2).unwrap().0;
        prop_assert!((part - s * total).abs() <= 1e-6, "{} vs {}", part, s * total);
    }

    #[test]
    fn far_point_increases_distance_to_empty(x in diagram_strategy(5), b in 0.0..0.3f64) {
        let empty = PersistenceDiagram::empty(Some(1));
        let mut pairs = x.pairs().to_vec();
        pairs.push((b, b + 0.6));
        let bigger = PersistenceDiagram::from_pairs(pairs).unwrap();
        for q in [Order::L1, Order::L2] {
            prop_assert!(wasserstein(&bigger, &empty, q).unwrap().0 > wasserstein(&x, &empty, q).unwrap().0);
        }
    }

    #[test]
    fn kde_ignores_point_order(x in diagram_strategy(8).prop_filter("nonempty", |d| !d.is_empty())) {
        let reversed = PersistenceDiagram::from_pairs(x.pairs().iter().rev().copied().collect()).unwrap();
        let a = kde(&x, 0.05, 16).unwrap();
        let b = kde(&reversed, 0.05, 16).unwrap();
        prop_assert!(a.grid().max_abs_diff(b.grid()).unwrap() < 1e-14);
        prop_assert!((a.grid().sum() - 1.0).abs() < 1e-9);
        prop_assert!(a.grid().as_slice().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn kde_changes_when_a_point_is_added(
        x in diagram_strategy(5).prop_filter("nonempty", |d| !d.is_empty()),
        b in 0.0..0.5f64,
    ) {
        let pts: Vec<(f64, f64)> = x.pairs().to_vec();
        let mut more = pts.clone();
        more.push((b, b + 0.45));
        let a = kde_points(&pts, 0.05, 16).unwrap();
        let c = kde_points(&more, 0.05, 16).unwrap();
        prop_assert!(a.grid().max_abs_diff(c.grid()).unwrap() > 0.0);
    }

    #[test]
    fn sphere_distance_is_a_metric(a in root_strategy(), b in root_strategy(), c in root_strategy()) {
        let d = |x: &SqrtDensity, y: &SqrtDensity| sphere::distance(x, y).unwrap();
        prop_assert!(d(&a, &a).abs() < 1e-7);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
        prop_assert!(d(&a, &b) <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn sphere_operations_stay_on_the_sphere(a in root_strategy(), b in root_strategy(), s in 0.0..=1.0f64) {
        let unit = |p: &SqrtDensity| (p.grid().norm() - 1.0).abs() < 1e-9;
        prop_assert!(unit(&geodesic(&a, &b, s).unwrap()));
        prop_assert!(unit(&sphere::chord_point(&a, &b, s).unwrap()));
        prop_assert!(unit(&sphere::extrinsic_mean(&[a.clone(), b.clone()]).unwrap()));
        let v = log_map(&a, &b).unwrap();
        prop_assert!(unit(&exp_map(&a, &v.scaled(3.0)).unwrap().point));

        let back = exp_map(&a, &v).unwrap();
        let cell = back.point.grid().max_abs_diff(b.grid()).unwrap();
        prop_assert!(cell <= 1e-6, "round trip error {}", cell);

        let total = sphere::distance(&a, &b).unwrap();
        let part = sphere::distance(&a, &geodesic(&a, &b, s).unwrap()).unwrap();
        prop_assert!((part - s * total).abs() <= 1e-6 * total.max(1e-6));
    }

    #[test]
    fn pga_is_self_consistent(set in prop::collection::vec(root_strategy(), 4..9), probe in root_strategy()) {
        let n = set.len();
        let d = n - 1;
        let (model, coords) = pga_features(&set, d).unwrap();
        for k in 0..d {
            let mean = coords.iter().map(|c| c[k]).sum::<f64>() / n as f64;
            let var = coords.iter().map(|c| (c[k] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            prop_assert!((var - model.variances[k]).abs() <= 1e-8, "{} vs {}", var, model.variances[k]);
            prop_assert!(k == 0 || model.variances[k] <= model.variances[k - 1] + 1e-15);
        }
        for i in 0..d {
            for j in 0..d {
                let dot = model.components[i].inner(&model.components[j]).unwrap();
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - expected).abs() <= 1e-8);
            }
        }
        let c = model.project(&probe).unwrap();
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(norm <= sphere::distance(&model.mean, &probe).unwrap() + 1e-9);
    }

    #[test]
    fn pga_reconstruction_improves_with_components(set in prop::collection::vec(root_strategy(), 4..8)) {
        let d = set.len() - 1;
        let (model, coords) = pga_features(&set, d).unwrap();
        let error = |dims: usize| -> f64 {
            set.iter()
                .zip(&coords)
                .map(|(psi, c)| {
                    let r = model.reconstruct(&c[..dims]).unwrap().point;
                    sphere::distance(&r, psi).unwrap().powi(2)
                })
                .sum()
        };
        let errors: Vec<f64> = (0..=d).map(error).collect();
        for w in errors.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9, "{:?}", errors);
        }
        prop_assert!(errors[d] < 1e-6);
    }

    #[test]
    fn regression_ignores_affine_feature_rescaling(
        rows in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 2), 6..15),
        scores_seed in prop::collection::vec(-1.0..1.0f64, 15),
        a in 0.1..10.0f64,
        b in -5.0..5.0f64,
    ) {
        let scores: Vec<f64> = scores_seed[..rows.len()].to_vec();
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| vec![a * r[0] + b, r[1]]).collect();
        let p = loo_regression(&rows, &scores).unwrap().predictions;
        let q = loo_regression(&scaled, &scores).unwrap().predictions;
        for (x, y) in p.iter().zip(&q) {
            prop_assert!((x - y).abs() <= 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn nearest_neighbour_on_training_set_is_exact(values in prop::collection::vec(0.0..100.0f64, 3..20)) {
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        prop_assume!(distinct.len() >= 2);
        let n = distinct.len();
        let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let values = (0..n * n).map(|t| (distinct[t / n] - distinct[t % n]).abs()).collect();
        let m = DistanceMatrix::from_values(names, values, Metric::W1).unwrap();
        for i in 0..n {
            prop_assert_eq!(knn_vote(m.row(i), &labels, 1, None).unwrap(), labels[i]);
        }
    }
}
