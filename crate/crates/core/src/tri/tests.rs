use std::sync::Arc;

use proptest::prelude::*;

use super::*;

fn pts(c: &[(f64, f64)]) -> Arc<PointSet> {
    Arc::new(PointSet::new(c).unwrap())
}

fn keys(e: &[(u32, u32)]) -> Vec<EdgeKey> {
    e.iter().map(|&(a, b)| EdgeKey::new(a, b)).collect()
}

const SQUARE: [(f64, f64); 4] = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];

fn square_tri() -> Triangulation {
    let g = build_from_edges(pts(&SQUARE), &keys(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])).unwrap();
    g.to_triangulation().unwrap()
}

#[test]
fn point_set_rejects_duplicates_and_nan() {
    assert_eq!(PointSet::new(&[(0.0, 0.0), (1.0, 0.0), (-0.0, 0.0)]), Err(Error::DuplicatePoint(0, 2)));
    assert_eq!(PointSet::new(&[(0.0, f64::NAN)]), Err(Error::NonFinite(0)));
    let ps = PointSet::new(&[(1.0, -2.0), (3.0, 5.0)]).unwrap();
    assert_eq!(ps.bbox(), ((1.0, -2.0), (3.0, 5.0)));
}

#[test]
fn edge_key_is_canonical() {
    assert_eq!(EdgeKey::new(5, 2), EdgeKey::new(2, 5));
    assert_eq!(EdgeKey::new(5, 2).lo(), 2);
    assert_eq!(EdgeKey::new(5, 2).other(5), 2);
}

#[test]
fn square_with_diagonal_is_triangulation() {
    let g = build_from_edges(pts(&SQUARE), &keys(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])).unwrap();
    assert!(g.is_triangulation());
    let t = g.to_triangulation().unwrap();
    assert_eq!(t.triangle_count(), 2);
    assert_eq!(t.edge_count(), 5);
    assert_eq!(t.hull().len(), 4);
    t.validate().unwrap();
}

#[test]
fn crossing_diagonals_rejected() {
    let e = keys(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]);
    assert_eq!(build_from_edges(pts(&SQUARE), &e).unwrap_err(), Error::NotPlanar(EdgeKey::new(0, 2), EdgeKey::new(1, 3)));
}

#[test]
fn hull_only_is_quad_face() {
    let g = build_from_edges(pts(&SQUARE), &keys(&[(0, 1), (1, 2), (2, 3), (3, 0)])).unwrap();
    assert!(!g.is_triangulation());
    let mut lens: Vec<usize> = g.cycles().iter().map(Vec::len).collect();
    lens.sort();
    assert_eq!(lens, vec![4, 4]);
    assert!(g.to_triangulation().is_err());
}

#[test]
fn build_errors() {
    let ps = pts(&SQUARE);
    assert_eq!(build_from_edges(ps.clone(), &keys(&[(0, 1), (1, 0)])).unwrap_err(), Error::DuplicateEdge(EdgeKey::new(0, 1)));
    assert_eq!(build_from_edges(ps.clone(), &keys(&[(0, 7)])).unwrap_err(), Error::InvalidVertex(7));
    assert_eq!(build_from_edges(ps, &keys(&[(2, 2)])).unwrap_err(), Error::SelfLoop(2));
}

#[test]
fn wrong_orientation_triangle_is_not_triangulation() {
    // Hull plus an interior vertex joined to only two corners.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, 1.0)]);
    let g = build_from_edges(ps, &keys(&[(0, 1), (1, 2), (2, 0), (3, 0), (3, 1)])).unwrap();
    assert!(!g.is_triangulation());
}

#[test]
fn non_convex_outer_boundary_is_not_triangulation() {
    // Two triangles sharing an edge, forming a reflex boundary.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 1.0), (2.0, 3.0)]);
    let g = build_from_edges(ps, &keys(&[(0, 2), (2, 1), (1, 3), (3, 0), (2, 3)])).unwrap();
    assert!(!g.is_triangulation());
}

#[test]
fn flip_square_and_back() {
    let mut t = square_tri();
    let before = t.canonical_edge_set();
    t.flip(EdgeKey::new(0, 2)).unwrap();
    t.validate().unwrap();
    t.validate_no_crossings().unwrap();
    assert!(t.has_edge(EdgeKey::new(1, 3)));
    assert!(!t.has_edge(EdgeKey::new(0, 2)));
    assert_eq!(edge_difference(&t.canonical_edge_set(), &before), vec![EdgeKey::new(1, 3)]);
    t.flip(EdgeKey::new(1, 3)).unwrap();
    t.validate().unwrap();
    assert_eq!(t.canonical_edge_set(), before);
}

#[test]
fn flip_errors() {
    let mut t = square_tri();
    assert_eq!(t.flip(EdgeKey::new(0, 1)), Err(Error::NotFlippable(EdgeKey::new(0, 1))));
    assert_eq!(t.flip(EdgeKey::new(1, 3)), Err(Error::NotAnEdge(EdgeKey::new(1, 3))));
}

#[test]
fn flip_non_convex_quad() {
    // (0,0)-(4,0) is a hull edge here: both apexes lie above it, so the
    // only triangulation is the fan around the interior point 2 = (2,1).
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 1.0), (2.0, 3.0)]);
    let g = build_from_edges(ps, &keys(&[(0, 1), (1, 3), (3, 0), (0, 2), (1, 2), (3, 2)])).unwrap();
    let mut t = g.to_triangulation().unwrap();
    // Flipping (0,0)-(2,1) would need diagonal (4,0)-(2,3). With c=(4,0),
    // d=(2,3): orient(c,d,(0,0)) = (-2)(0)-(3)(-4) = 12 and
    // orient(c,d,(2,1)) = (-2)(1)-(3)(-2) = 4. Same sign: not convex.
    let od = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    assert_eq!(od((4, 0), (2, 3), (0, 0)), 12);
    assert_eq!(od((4, 0), (2, 3), (2, 1)), 4);
    for e in [(0, 2), (1, 2), (3, 2), (0, 1), (1, 3), (3, 0)] {
        let e = EdgeKey::new(e.0, e.1);
        assert_eq!(t.flip(e), Err(Error::NotFlippable(e)));
    }
}

/// Exact incircle determinant for small integer points; positive means
/// `d` is inside the circle through counterclockwise `a, b, c`.
fn incircle_i64(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> i64 {
    let r = |p: (i64, i64)| {
        let (x, y) = (p.0 - d.0, p.1 - d.1);
        (x, y, x * x + y * y)
    };
    let (a, b, c) = (r(a), r(b), r(c));
    a.0 * (b.1 * c.2 - b.2 * c.1) - a.1 * (b.0 * c.2 - b.2 * c.0) + a.2 * (b.0 * c.1 - b.1 * c.0)
}

#[test]
fn locally_delaunay_kite() {
    let ps = pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 2.0), (1.0, -2.0)]);
    let g = build_from_edges(ps, &keys(&[(0, 1), (1, 2), (2, 0), (0, 3), (3, 1)])).unwrap();
    let t = g.to_triangulation().unwrap();
    // Circle through (0,0),(2,0),(1,2) has center (1, 3/4); (1,-2) is outside.
    assert!(incircle_i64((0, 0), (2, 0), (1, 2), (1, -2)) < 0);
    assert!(t.is_locally_delaunay(EdgeKey::new(0, 1)).unwrap());
    assert!(t.is_locally_delaunay(EdgeKey::new(1, 2)).unwrap());
}

#[test]
fn locally_delaunay_rectangle_picks_one_diagonal() {
    let ps = pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 1.0)]);
    // The four corners are cocircular, so only the perturbation decides.
    assert_eq!(incircle_i64((0, 0), (3, 0), (3, 1), (0, 1)), 0);
    let g = build_from_edges(ps, &keys(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])).unwrap();
    let mut t = g.to_triangulation().unwrap();
    let first = t.is_locally_delaunay(EdgeKey::new(0, 2)).unwrap();
    let p = |i| *t.point(i);
    assert_eq!(first, !geom::in_circle(&p(0), &p(1), &p(2), &p(3)));
    t.flip(EdgeKey::new(0, 2)).unwrap();
    let second = t.is_locally_delaunay(EdgeKey::new(1, 3)).unwrap();
    assert_ne!(first, second);
    // Hull edges are locally Delaunay by convention.
    assert!(t.is_locally_delaunay(EdgeKey::new(0, 1)).unwrap());
}

#[test]
fn locally_delaunay_wide_rectangle_diagonal_violation() {
    // Move one corner off the circle so the answer is geometric.
    let ps = pts(&[(0.0, 0.0), (3.0, 0.0), (3.0, 1.0), (0.0, 0.5)]);
    let g = build_from_edges(ps, &keys(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])).unwrap();
    let mut t = g.to_triangulation().unwrap();
    let inside = incircle_i64((0, 0), (6, 0), (6, 2), (0, 1)) > 0;
    assert!(inside);
    assert!(!t.is_locally_delaunay(EdgeKey::new(0, 2)).unwrap());
    t.flip(EdgeKey::new(0, 2)).unwrap();
    assert!(t.is_locally_delaunay(EdgeKey::new(1, 3)).unwrap());
}

#[test]
fn rings() {
    // Fan: center 0 with four neighbors on the axes.
    let ps = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]);
    let g = build_from_edges(ps.clone(), &keys(&[(0, 3), (0, 1), (0, 4), (0, 2)])).unwrap();
    assert_eq!(g.vertex_ring(0), vec![1, 2, 3, 4]);
    assert_eq!(g.vertex_ring(3), vec![0]);
    let g = build_from_edges(ps.clone(), &keys(&[(0, 1)])).unwrap();
    assert!(g.vertex_ring(2).is_empty());
    assert_eq!(g.isolated_vertices(), vec![2, 3, 4]);

    let e = keys(&[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (4, 1)]);
    let t = build_from_edges(ps, &e).unwrap().to_triangulation().unwrap();
    let r = t.vertex_ring(0);
    assert_eq!(r, vec![1, 2, 3, 4]);
    // Hull vertex: starts right after the outer face, counterclockwise.
    assert_eq!(t.vertex_ring(1), vec![2, 0, 4]);
    assert_eq!(t.vertex_ring(2), vec![3, 0, 1]);
}

#[test]
fn hull_is_counterclockwise() {
    let t = square_tri();
    let h = t.hull();
    let start = h.iter().position(|&v| v == 0).unwrap();
    let rot: Vec<u32> = (0..4).map(|i| h[(start + i) % 4]).collect();
    assert_eq!(rot, vec![0, 1, 2, 3]);
}

#[test]
fn canonical_edge_sets() {
    let t = square_tri();
    assert_eq!(t.canonical_edge_set(), t.clone().canonical_edge_set());
    let g = build_from_edges(pts(&SQUARE), &[]).unwrap();
    assert!(g.canonical_edge_set().is_empty());
}

#[test]
fn from_triangles_rejects_clockwise() {
    let ps = pts(&SQUARE);
    assert!(Triangulation::from_triangles(ps.clone(), &[[0, 2, 1]]).is_err());
    assert!(Triangulation::from_triangles(ps, &[[0, 1, 2], [0, 2, 3]]).is_ok());
}

#[test]
fn compacted_matches() {
    let mut t = square_tri();
    t.flip(EdgeKey::new(0, 2)).unwrap();
    let c = t.compacted();
    c.validate().unwrap();
    assert_eq!(c.canonical_edge_set(), t.canonical_edge_set());
}

#[test]
fn io_errors_name_the_line() {
    let err = read_points("3\n0 0\n1 x\n2 2\n".as_bytes()).unwrap_err();
    assert_eq!(err, Error::Parse { line: 3, msg: "bad y \"x\"".into() });
    let err = read_edges("0 1\n2\n".as_bytes()).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }));
}

/// Fan triangulation of points in convex position sorted by angle.
fn convex_polygon(k: usize, jitter: &[f64]) -> Vec<(f64, f64)> {
    (0..k)
        .map(|i| {
            let a = std::f64::consts::TAU * (i as f64 + 0.3 * jitter[i % jitter.len()]) / k as f64;
            (a.cos() * 10.0, a.sin() * 10.0)
        })
        .collect()
}

proptest! {
    #[test]
    fn points_round_trip(c in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..40)) {
        let Ok(ps) = PointSet::new(&c) else { return Ok(()); };
        let mut buf = Vec::new();
        write_points(&mut buf, &ps).unwrap();
        let back = read_points(buf.as_slice()).unwrap();
        for (p, q) in ps.points().iter().zip(back.points()) {
            prop_assert_eq!(p.x.to_bits(), q.x.to_bits());
            prop_assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
    }

    #[test]
    fn edges_round_trip(e in prop::collection::vec((0u32..50, 0u32..50), 0..40)) {
        let e: Vec<EdgeKey> = e.into_iter().map(|(a, b)| EdgeKey::new(a, b)).collect();
        let mut buf = Vec::new();
        write_edges(&mut buf, &e).unwrap();
        prop_assert_eq!(read_edges(buf.as_slice()).unwrap(), e);
    }

    #[test]
    fn fan_flips_keep_invariants(
        k in 4usize..14,
        jitter in prop::collection::vec(0.0f64..1.0, 1..5),
        picks in prop::collection::vec(any::<u32>(), 0..30),
    ) {
        let ps = pts(&convex_polygon(k, &jitter));
        let mut e: Vec<EdgeKey> = (0..k as u32).map(|i| EdgeKey::new(i, (i + 1) % k as u32)).collect();
        e.extend((2..k as u32 - 1).map(|i| EdgeKey::new(0, i)));
        let g = build_from_edges(ps.clone(), &e).unwrap();
        prop_assert!(g.is_triangulation());
        prop_assert_eq!(g.canonical_edge_set(), { let mut s = e.clone(); s.sort(); s });
        let mut t = g.to_triangulation().unwrap();
        let (n, h) = (k, k);
        for pick in picks {
            let edges = t.canonical_edge_set();
            let e = edges[pick as usize % edges.len()];
            let _ = t.flip(e);
            t.validate().unwrap();
            t.validate_no_crossings().unwrap();
            prop_assert_eq!(t.edge_count(), 3 * n - 3 - h);
            prop_assert_eq!(t.triangle_count(), 2 * n - 2 - h);
            prop_assert_eq!(t.vertex_count(), n);
        }
        // Rebuilding from the edge list gives the same triangulation.
        let g2 = build_from_edges(ps, &t.canonical_edge_set()).unwrap();
        prop_assert!(g2.is_triangulation());
        prop_assert_eq!(g2.to_triangulation().unwrap().canonical_edge_set(), t.canonical_edge_set());
    }

    #[test]
    fn grid_crossing_check_matches_naive(
        c in prop::collection::vec((0i32..20, 0i32..20), 4..25),
        e in prop::collection::vec((0usize..25, 0usize..25), 1..30),
    ) {
        let mut c: Vec<(f64, f64)> = c.into_iter().map(|(x, y)| (x as f64, y as f64)).collect();
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        c.dedup();
        let n = c.len();
        let ps = PointSet::new(&c).unwrap();
        let mut edges: Vec<EdgeKey> = e.into_iter()
            .map(|(a, b)| EdgeKey::new((a % n) as u32, (b % n) as u32))
            .filter(|k| k.lo() != k.hi())
            .collect();
        edges.sort();
        edges.dedup();
        let naive = naive_crossings(&ps, &edges);
        let grid = pslg::find_crossing(&ps, &edges);
        prop_assert_eq!(grid.is_some(), !naive.is_empty());
        if let Some(pair) = grid {
            prop_assert_eq!(Some(&pair), naive.iter().min());
        }
    }
}
