use std::collections::HashSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dt::delaunay;
use crate::testutil::{grid_points, pts, random_flips, random_points};
use crate::tri::{build_from_edges, PointSet};

#[test]
fn delaunay_output_is_delaunay() {
    for seed in 0..10 {
        let ps = if seed % 2 == 0 { random_points(200, seed) } else { grid_points(100, 12, seed) };
        assert!(is_delaunay(&delaunay(&ps, seed).unwrap()));
    }
    assert!(is_delaunay(&delaunay(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]), 0).unwrap()));
}

#[test]
fn any_flip_breaks_delaunay() {
    let ps = random_points(60, 3);
    let dt = delaunay(&ps, 0).unwrap();
    let mut flipped = 0;
    for e in dt.canonical_edge_set() {
        let mut g = dt.clone();
        if g.flip(e).is_ok() {
            assert!(!is_delaunay(&g));
            assert!(!dt_equal(&g, &dt));
            flipped += 1;
        }
    }
    assert!(flipped > 50);
}

#[test]
fn is_delaunay_agrees_with_recomputation() {
    for seed in 0..200 {
        let ps = if seed % 2 == 0 { random_points(40, seed) } else { grid_points(40, 8, seed) };
        let dt = delaunay(&ps, seed).unwrap();
        let mut g = dt.clone();
        random_flips(&mut g, (seed % 4) as usize, seed);
        assert_eq!(is_delaunay(&g), dt_equal(&g, &dt));
    }
}

#[test]
fn equality_ignores_construction_order() {
    let ps = random_points(100, 8);
    let a = delaunay(&ps, 1).unwrap();
    assert!(dt_equal(&a, &a));
    assert!(dt_equal(&a, &delaunay(&ps, 99).unwrap()));
    let mut tris: Vec<[PointId; 3]> = a.triangles().collect();
    tris.reverse();
    tris.shuffle(&mut ChaCha8Rng::seed_from_u64(2));
    let b = Triangulation::from_triangles(ps.clone(), &tris).unwrap();
    assert!(dt_equal(&a, &b));
    let other = delaunay(&random_points(100, 9), 0).unwrap();
    assert!(!dt_equal(&a, &other));
}

fn pslg_of(t: &Triangulation) -> Pslg {
    build_from_edges(t.points().clone(), &t.canonical_edge_set()).unwrap()
}

#[test]
fn delaunay_graph_is_certified() {
    for seed in 0..10 {
        let ps = if seed % 2 == 0 { random_points(300, seed) } else { grid_points(150, 14, seed) };
        let r = certify_subgraph(&pslg_of(&delaunay(&ps, seed).unwrap()));
        assert!(r.certified, "{r:?}");
    }
}

/// Points strictly inside triangle `t`.
fn points_inside(ps: &PointSet, t: [PointId; 3]) -> usize {
    let [a, b, c] = t.map(|v| ps.get(v));
    ps.points()
        .iter()
        .filter(|p| ![a.id, b.id, c.id].contains(&p.id))
        .filter(|p| geom::ccw(a, b, p) && geom::ccw(b, c, p) && geom::ccw(c, a, p))
        .count()
}

#[test]
fn missing_interior_edge_is_certified() {
    let ps = random_points(120, 4);
    let dt = delaunay(&ps, 0).unwrap();
    let hull: HashSet<EdgeKey> = {
        let h = dt.hull();
        (0..h.len()).map(|i| EdgeKey::new(h[i], h[(i + 1) % h.len()])).collect()
    };
    for e in dt.canonical_edge_set().into_iter().filter(|e| !hull.contains(e)).take(40) {
        let g = subgraph_without(&dt, &[e]).unwrap();
        let r = certify_subgraph(&g);
        assert!(r.certified, "{e}: {r:?}");
    }
}

#[test]
fn flipped_diagonal_has_witness() {
    let ps = random_points(80, 6);
    let dt = delaunay(&ps, 0).unwrap();
    let mut checked = 0;
    for e in dt.canonical_edge_set() {
        let mut t = dt.clone();
        if t.flip(e).is_err() {
            continue;
        }
        let r = certify_subgraph(&pslg_of(&t));
        assert!(!r.certified);
        let (tri, p) = r.witness.expect("a circle witness");
        let [a, b, c] = tri.map(|v| ps.get(v));
        assert!(geom::in_circle(a, b, c, ps.get(p)));
        assert!(geom::ccw(a, b, c));
        assert_eq!(points_inside(&ps, tri), 0);
        // The witness is a vertex of a triangle sharing an edge with `tri`,
        // or a hull vertex seen across a hull edge of `tri`.
        let shares = t.triangles().any(|u| u.contains(&p) && tri.iter().filter(|v| u.contains(v)).count() == 2);
        let hull = t.hull();
        let on_hull = |v: PointId| hull.contains(&v);
        let hull_side = (0..3).any(|i| {
            let (u, w) = (tri[i], tri[(i + 1) % 3]);
            on_hull(u) && on_hull(w) && t.find_half_edge(w, u).is_some_and(|h| t.is_hull_half_edge(h))
        });
        assert!(shares || (on_hull(p) && hull_side));
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn isolated_vertex_in_neighbor_face_is_a_witness() {
    // Triangle abc over a face abd that holds an isolated point inside the
    // circle through a, b, c. Edge ab is not a Delaunay edge.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 1.0), (2.0, -10.0), (2.0, -0.5)]);
    let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3)].map(|(a, b)| EdgeKey::new(a, b));
    let g = build_from_edges(ps.clone(), &edges).unwrap();
    let r = certify_subgraph(&g);
    assert_eq!(r.witness, Some(([0, 1, 2], 4)), "{r:?}");
    assert!(!delaunay(&ps, 0).unwrap().has_edge(EdgeKey::new(0, 1)));
}

#[test]
fn hole_component_counts_as_neighbor() {
    // Same layout, with a short segment in place of the isolated point.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 1.0), (2.0, -10.0), (2.0, -0.5), (2.1, -3.0)]);
    let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (4, 5)].map(|(a, b)| EdgeKey::new(a, b));
    let g = build_from_edges(ps, &edges).unwrap();
    let r = certify_subgraph(&g);
    // Edge (4, 5) sits in a non-triangular face away from the hull.
    assert_eq!(r.uncovered_edge, Some(EdgeKey::new(4, 5)));
    assert!(!r.certified);
}

#[test]
fn hole_inside_triangle_spoils_it() {
    // A point inside the three-edge cycle 0 1 2 makes it a non-triangular
    // face; the point is then a neighbor of the triangle 0 1 4 below.
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, 1.0), (2.0, -3.0)]);
    let edges = [(0, 1), (1, 2), (2, 0), (0, 4), (1, 4)].map(|(a, b)| EdgeKey::new(a, b));
    let r = certify_subgraph(&build_from_edges(ps, &edges).unwrap());
    assert_eq!(r.uncovered_edge, None);
    let (tri, p) = r.witness.unwrap();
    assert_eq!(crate::tri::triangle_key(tri), [0, 1, 4]);
    assert_eq!(p, 3);
}

#[test]
fn lone_interior_edge_is_uncovered() {
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (1.5, 1.0), (2.5, 1.0)]);
    let r = certify_subgraph(&build_from_edges(ps, &[EdgeKey::new(3, 4)]).unwrap());
    assert_eq!(r.uncovered_edge, Some(EdgeKey::new(3, 4)));
    let ps = pts(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (1.5, 1.0)]);
    let r = certify_subgraph(&build_from_edges(ps, &[EdgeKey::new(0, 1)]).unwrap());
    assert!(r.certified, "a lone hull edge needs no triangle");
}

/// Random plane graph: a subset of the Delaunay edges plus a few other
/// edges that cross nothing already chosen.
fn fuzz_graph(seed: u64) -> (Pslg, Triangulation) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(8..50);
    let ps = if seed.is_multiple_of(3) { grid_points(n, 9, seed) } else { random_points(n, seed) };
    let dt = delaunay(&ps, seed).unwrap();
    let keep = [0.6, 0.85, 0.95, 1.0][rng.gen_range(0..4)];
    let mut edges: Vec<EdgeKey> = dt.canonical_edge_set().into_iter().filter(|_| rng.gen_bool(keep)).collect();
    let extra = rng.gen_range(0..3);
    let mut added = 0;
    for _ in 0..200 {
        if added == extra {
            break;
        }
        let (a, b) = (rng.gen_range(0..n as PointId), rng.gen_range(0..n as PointId));
        let e = EdgeKey::new(a, b);
        if a == b || dt.has_edge(e) || edges.contains(&e) {
            continue;
        }
        let (p, q) = (ps.get(a), ps.get(b));
        let blocked = edges.iter().any(|f| geom::segments_properly_cross(p, q, ps.get(f.lo()), ps.get(f.hi())))
            || ps.points().iter().any(|r| r.id != a && r.id != b && on_segment(p, q, r));
        if !blocked {
            edges.push(e);
            added += 1;
        }
    }
    (build_from_edges(ps, &edges).unwrap(), dt)
}

/// Whether `r` lies on the closed segment `pq` in the unperturbed plane.
fn on_segment(p: &geom::Point, q: &geom::Point, r: &geom::Point) -> bool {
    geom::orient_sign_unperturbed(p, q, r) == 0 && r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

#[test]
fn certificate_is_sound() {
    let (mut certified, mut witnessed, mut uncovered) = (0, 0, 0);
    for seed in 0..1000 {
        let (g, dt) = fuzz_graph(seed);
        let r = certify_subgraph(&g);
        if r.certified {
            certified += 1;
            for &e in g.edges() {
                assert!(dt.has_edge(e), "seed {seed}: certified non-Delaunay edge {e}");
            }
        } else if r.witness.is_some() {
            witnessed += 1;
        } else {
            uncovered += 1;
        }
    }
    assert!(certified > 100 && witnessed > 20 && uncovered > 100, "{certified} {witnessed} {uncovered}");
}

fn cascade_ratio(seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(20..150);
    let ps = random_points(n, seed);
    let mut t = delaunay(&ps, seed).unwrap();
    random_flips(&mut t, n, seed);
    let mut edges = t.canonical_edge_set();
    edges.shuffle(&mut rng);
    let k = rng.gen_range(1..=edges.len() / 3);
    let removed = removal_cascade(&t, &edges[..k]).unwrap();
    (k, removed.len())
}

#[test]
fn cascade_stays_linear_in_removed_edges() {
    let mut worst: f64 = 0.0;
    for seed in 0..1000 {
        let (k, total) = cascade_ratio(seed);
        assert!(total >= k);
        worst = worst.max(total as f64 / k as f64);
        assert!(total <= CASCADE_FACTOR * k, "seed {seed}: {total} removed for {k}");
    }
    println!("worst cascade ratio {worst:.3}");
}

const CASCADE_FACTOR: usize = 3;

#[test]
fn cascade_small_cases() {
    let ps = random_points(60, 1);
    let t = delaunay(&ps, 0).unwrap();
    let hull: HashSet<EdgeKey> = {
        let h = t.hull();
        (0..h.len()).map(|i| EdgeKey::new(h[i], h[(i + 1) % h.len()])).collect()
    };
    let inner = t.canonical_edge_set().into_iter().find(|e| !hull.contains(e)).unwrap();
    assert_eq!(removal_cascade(&t, &[inner]).unwrap(), vec![inner]);
    assert_eq!(removal_cascade(&t, &[]).unwrap(), Vec::<EdgeKey>::new());
    // All edges at an interior vertex: the two faces left over merge.
    let v = (0..60).find(|&v| t.vertex_ring(v).iter().all(|&w| w != GHOST)).unwrap();
    let star: Vec<EdgeKey> = t.vertex_ring(v).iter().map(|&w| EdgeKey::new(v, w)).collect();
    let out = removal_cascade(&t, &star[1..]).unwrap();
    assert_eq!(out.len(), star.len());
    assert!(matches!(removal_cascade(&t, &[EdgeKey::new(0, 0)]), Err(Error::NotAnEdge(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certified_edges_are_delaunay(seed in any::<u64>()) {
        let (g, dt) = fuzz_graph(seed);
        if certify_subgraph(&g).certified {
            prop_assert!(g.edges().iter().all(|&e| dt.has_edge(e)));
        }
    }

    #[test]
    fn cascade_bound(seed in any::<u64>()) {
        let (k, total) = cascade_ratio(seed);
        prop_assert!(total >= k && total <= CASCADE_FACTOR * k);
    }
}
