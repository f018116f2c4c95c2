use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::dt::{delaunay, greedy_legalize};
use crate::testutil::{grid_points, pts, random_flips, random_points};
use crate::tri::PointSet;

/// Non-locally-Delaunay edges by brute force: for each edge, scan the
/// triangle list for the two triangles holding it.
fn d_local_oracle(g: &Triangulation) -> u64 {
    let ps = g.points();
    let tris: Vec<[PointId; 3]> = g.triangles().collect();
    let mut bad = 0;
    for e in g.canonical_edge_set() {
        let apexes: Vec<PointId> = tris
            .iter()
            .filter(|t| t.contains(&e.lo()) && t.contains(&e.hi()))
            .map(|t| *t.iter().find(|&&v| v != e.lo() && v != e.hi()).unwrap())
            .collect();
        if let [x, y] = apexes[..] {
            if geom::in_circle(ps.get(e.lo()), ps.get(e.hi()), ps.get(x), ps.get(y)) {
                bad += 1;
            }
        }
    }
    bad
}

fn flipped_square() -> (Triangulation, Triangulation) {
    // The long diagonal of a kite is not Delaunay.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 1.0), (2.0, -1.0)]);
    let dt = delaunay(&ps, 1).unwrap();
    let mut g = dt.clone();
    g.flip(EdgeKey::new(2, 3)).unwrap();
    (g, dt)
}

#[test]
fn delaunay_reports_zero() {
    for seed in 0..5 {
        let ps = random_points(300, seed);
        let dt = delaunay(&ps, seed).unwrap();
        let r = full_report(&dt, &dt).unwrap();
        assert!(r.is_zero(), "{r:?}");
        assert_eq!(r.n, 300);
    }
    let ps = grid_points(150, 14, 3);
    let dt = delaunay(&ps, 0).unwrap();
    assert!(full_report(&dt, &dt).unwrap().is_zero());
}

#[test]
fn flipped_diagonal() {
    let (g, dt) = flipped_square();
    assert!(g.has_edge(EdgeKey::new(0, 1)));
    let r = full_report(&g, &dt).unwrap();
    assert_eq!(r.d, 1);
    assert_eq!(r.d_local, 1);
    assert_eq!((r.d_cross_total, r.d_cross_max), (1, 1));
    assert!(r.d_vio_max >= 1);
    assert_eq!((r.d_vio_total, r.d_vio_max), (2, 1));
    assert_eq!(r.flip_upper, Some(1));
    assert!(!r.is_zero());
}

#[test]
fn mismatched_vertices() {
    let a = delaunay(&random_points(20, 1), 0).unwrap();
    let b = delaunay(&random_points(20, 2), 0).unwrap();
    assert!(matches!(metric_d(&a, &b), Err(Error::VertexMismatch)));
}

#[test]
fn one_bad_flip_local_count() {
    let ps = random_points(200, 7);
    let dt = delaunay(&ps, 0).unwrap();
    let mut checked = 0;
    for e in dt.canonical_edge_set().into_iter().take(60) {
        let mut g = dt.clone();
        if g.flip(e).is_err() {
            continue;
        }
        let d_local = metric_d_local(&g);
        assert_eq!(d_local, d_local_oracle(&g));
        assert!((1..=5).contains(&d_local), "{d_local}");
        assert_eq!(metric_d(&g, &dt).unwrap(), 1);
        checked += 1;
    }
    assert!(checked > 30);
}

#[test]
fn d_local_paths_agree() {
    for seed in 0..20 {
        let ps = if seed % 2 == 0 { random_points(120, seed) } else { grid_points(100, 12, seed) };
        let mut g = delaunay(&ps, seed).unwrap();
        random_flips(&mut g, 40, seed);
        let tris: Vec<[PointId; 3]> = g.triangles().collect();
        let oracle = d_local_oracle(&g);
        assert_eq!(metric_d_local(&g), oracle);
        assert_eq!(metric_d_local_triangles(&ps, &tris), oracle);
    }
}

#[test]
fn d_local_of_folded_pair() {
    // Both apexes above edge 0-1. The near apex 3 lies inside the circle
    // through 0, 1, 2 but 2 lies outside the circle through 0, 1, 3.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 4.0), (2.0, 1.0)]);
    let (a, b, p2, p3) = (ps.get(0), ps.get(1), ps.get(2), ps.get(3));
    assert!(geom::in_circle(a, b, p2, p3) && !geom::in_circle(a, b, p3, p2));
    for tris in [[[0, 1, 2], [1, 0, 3]], [[0, 1, 3], [1, 0, 2]]] {
        assert_eq!(metric_d_local_triangles(&ps, &tris), 1);
    }
}

#[test]
fn crossings_match_naive() {
    for seed in 0..20 {
        let ps = if seed % 2 == 0 { random_points(150, seed) } else { grid_points(120, 13, seed) };
        let dt = delaunay(&ps, seed).unwrap();
        let mut g = dt.clone();
        random_flips(&mut g, 80, seed + 100);
        let edges = g.canonical_edge_set();
        let dt_edges = dt.canonical_edge_set();
        assert_eq!(metric_crossings(&edges, &dt), naive_crossings(&ps, &edges, &dt_edges));
    }
}

#[test]
fn violations_match_naive() {
    for seed in 0..20 {
        let ps = if seed % 2 == 0 { random_points(200, seed) } else { grid_points(150, 14, seed) };
        let mut g = delaunay(&ps, seed).unwrap();
        random_flips(&mut g, 100, seed + 7);
        let tris: Vec<[PointId; 3]> = g.triangles().collect();
        assert_eq!(metric_violations(&ps, &tris), naive_violations(&ps, &tris));
    }
}

#[test]
fn violations_with_far_and_thin_triangles() {
    // Nearly collinear triples give huge circles; clustered points stress
    // the grid cells.
    let mut c = vec![(0.0, 0.0), (1.0, 1e-9), (2.0, 0.0), (1.0, -5.0), (1.0, 5.0)];
    for i in 0..40 {
        let t = i as f64 * 0.15;
        c.push((1.0 + 0.3 * t.cos(), 2.0 + 0.3 * t.sin()));
    }
    let ps = pts(&c);
    let mut g = delaunay(&ps, 0).unwrap();
    random_flips(&mut g, 60, 4);
    let tris: Vec<[PointId; 3]> = g.triangles().collect();
    assert_eq!(metric_violations(&ps, &tris), naive_violations(&ps, &tris));
}

#[test]
fn two_difference_paths_agree() {
    for seed in 0..10 {
        let ps = random_points(200, seed);
        let dt = delaunay(&ps, 0).unwrap();
        let mut g = dt.clone();
        random_flips(&mut g, 20, seed);
        let d = metric_d(&g, &dt).unwrap();
        assert!(d <= 20);
        let reverse = crate::tri::edge_difference(&dt.canonical_edge_set(), &g.canonical_edge_set());
        assert_eq!(d, reverse.len() as u64);
        assert_eq!(d, metric_d_edges(&g.canonical_edge_set(), &dt));
    }
}

#[test]
fn delaunay_basis_is_zero() {
    let ps = random_points(100, 5);
    let dt = delaunay(&ps, 0).unwrap();
    let mut g = dt.clone();
    random_flips(&mut g, 30, 1);
    let r = full_report_with(&g, &dt, ViolationBasis::Delaunay).unwrap();
    assert_eq!((r.d_vio_total, r.d_vio_max), (0, 0));
    assert!(full_report(&g, &dt).unwrap().d_vio_total > 0);
}

#[test]
fn combinatorial_report_of_plane_graph() {
    let ps = random_points(80, 9);
    let dt = delaunay(&ps, 0).unwrap();
    let mut g = dt.clone();
    random_flips(&mut g, 25, 2);
    let full = full_report(&g, &dt).unwrap();
    let tris: Vec<[PointId; 3]> = g.triangles().collect();
    let comb = combinatorial_report(&ps, &g.canonical_edge_set(), &tris, &dt);
    assert_eq!(comb, ClosenessReport { flip_upper: None, ..full });
}

#[test]
fn csv_row_layout() {
    let (g, dt) = flipped_square();
    let r = full_report(&g, &dt).unwrap();
    assert_eq!(ClosenessReport::CSV_HEADER.split(',').count(), r.csv_row(3).split(',').count());
    assert_eq!(r.csv_row(3), "4,1,1,1,1,2,1,1,3");
    let none = ClosenessReport { flip_upper: None, ..r };
    assert_eq!(none.csv_row(0), "4,1,1,1,1,2,1,,0");
}

fn check_chain(g: &Triangulation, dt: &Triangulation) {
    let r = full_report(g, dt).unwrap();
    let flips = r.flip_upper.unwrap();
    assert!(r.d_local <= r.d, "{r:?}");
    assert!(r.d <= flips, "{r:?}");
    assert!(r.d <= r.d_cross_total, "{r:?}");
    assert_eq!(r.is_zero(), r.d == 0);
    assert!(circle0_witness(g, dt, r.d_vio_max).is_none());
    assert!(r.d_cross_max <= 32 * (r.d_vio_max * r.d_vio_max).max(1), "{r:?}");
}

#[test]
fn chain_on_fuzz_instances() {
    for seed in 0..1000u64 {
        let n = 20 + (seed % 60) as usize;
        let ps = if seed % 3 == 0 { grid_points(n, 10, seed) } else { random_points(n, seed) };
        let dt = delaunay(&ps, seed).unwrap();
        let mut g = dt.clone();
        random_flips(&mut g, (seed % 25) as usize, seed);
        check_chain(&g, &dt);
    }
}

#[test]
fn legalized_prediction_reaches_zero() {
    let ps = random_points(150, 12);
    let dt = delaunay(&ps, 0).unwrap();
    let mut g = dt.clone();
    random_flips(&mut g, 200, 12);
    let (fixed, _) = greedy_legalize(&g);
    assert!(full_report(&fixed, &dt).unwrap().is_zero());
}

fn arb_points() -> impl Strategy<Value = Arc<PointSet>> {
    prop::collection::hash_set((0i32..24, 0i32..24), 4..60).prop_map(|s| {
        let c: Vec<(f64, f64)> = s.into_iter().map(|(x, y)| (x as f64, y as f64)).collect();
        Arc::new(PointSet::new(&c).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chain_holds(ps in arb_points(), flips in 0usize..40, seed in any::<u64>()) {
        let dt = delaunay(&ps, seed).unwrap();
        let mut g = dt.clone();
        random_flips(&mut g, flips, seed);
        check_chain(&g, &dt);
    }

    #[test]
    fn grid_violations_exact(ps in arb_points(), flips in 0usize..40, seed in any::<u64>()) {
        let mut g = delaunay(&ps, seed).unwrap();
        random_flips(&mut g, flips, seed);
        let tris: Vec<[PointId; 3]> = g.triangles().collect();
        prop_assert_eq!(metric_violations(&ps, &tris), naive_violations(&ps, &tris));
    }
}
