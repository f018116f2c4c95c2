use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::dt::delaunay;
use crate::gen::{edge_sample_model, flip_model, Completion};
use crate::geom::{counters, in_circle};
use crate::metrics::metric_d;
use crate::testutil::{grid_points, random_flips, random_points};
use crate::tri::{triangle_key, EdgeKey, PointSet};
use crate::verify::dt_equal;

fn dt_of(ps: &Arc<PointSet>) -> Triangulation {
    delaunay(ps, 3).unwrap()
}

fn checked() -> SeparatorOptions {
    SeparatorOptions { certify_patch: true, ..Default::default() }
}

fn bounded(g: &Triangulation) -> Vec<TriangleId> {
    g.triangle_ids().filter(|&t| !g.is_ghost(t)).collect()
}

fn assert_division(g: &Triangulation, rd: &RDivision, slack: f64) {
    let mut seen = HashSet::new();
    for i in 0..rd.region_count() {
        let r = rd.region(i);
        assert!(!r.is_empty());
        assert!(r.len() as f64 <= slack * rd.t() as f64, "region {i} has {} triangles", r.len());
        assert!(rd.boundary(i).len() as f64 <= slack * (rd.t() as f64).sqrt(), "region {i} boundary {}", rd.boundary(i).len());
        for &t in r {
            assert!(seen.insert(t), "triangle {t} in two regions");
            assert_eq!(rd.region_of(t), Some(i));
        }
        // Dual connectivity.
        let inside: HashSet<TriangleId> = r.iter().copied().collect();
        let mut reached = HashSet::from([r[0]]);
        let mut stack = vec![r[0]];
        while let Some(t) = stack.pop() {
            for h in 3 * t..3 * t + 3 {
                let u = g.twin(h) / 3;
                if inside.contains(&u) && reached.insert(u) {
                    stack.push(u);
                }
            }
        }
        assert_eq!(reached.len(), r.len(), "region {i} is not connected");
    }
    let all: HashSet<TriangleId> = bounded(g).into_iter().collect();
    assert_eq!(seen, all);
    let several = rd.region_count() > 1;
    for &t in &all {
        let direct = several && (3 * t..3 * t + 3).any(|h| rd.region_of(g.twin(h) / 3) != rd.region_of(t));
        assert_eq!(rd.is_boundary(t), direct, "triangle {t}");
    }
    let union: HashSet<TriangleId> = (0..rd.region_count()).flat_map(|i| rd.boundary(i).to_vec()).collect();
    let flagged: HashSet<TriangleId> = rd.boundary_triangles().collect();
    assert_eq!(union, flagged);
}

/// Good flags computed straight from the definition.
fn classify_direct(g: &Triangulation, rd: &RDivision, dt_b: Option<&Triangulation>) -> Vec<bool> {
    let keys: HashSet<[PointId; 3]> = dt_b.map(|d| d.triangles().map(triangle_key).collect()).unwrap_or_default();
    let locally_delaunay = |t: TriangleId, k: u32| {
        let h = 3 * t + k;
        let f = g.twin(h);
        if g.is_ghost(f / 3) {
            return true;
        }
        let [a, b, c] = g.triangle_vertices(t);
        let far = g.triangle_vertices(f / 3).into_iter().find(|&v| v != a && v != b && v != c).unwrap();
        !in_circle(g.point(a), g.point(b), g.point(c), g.point(far))
    };
    (0..rd.region_count())
        .map(|i| {
            let boundary_ok = dt_b.is_none() || rd.boundary(i).iter().all(|&t| keys.contains(&triangle_key(g.triangle_vertices(t))));
            let local_ok = rd.region(i).iter().all(|&t| (0..3).all(|k| locally_delaunay(t, k)));
            boundary_ok && local_ok
        })
        .collect()
}

fn dt_b_of(g: &Triangulation, rd: &RDivision) -> Option<Triangulation> {
    let v = rd.boundary_vertices(g);
    (!v.is_empty()).then(|| crate::dt::delaunay_of(g.points(), &v, 0).unwrap())
}

#[test]
fn few_triangles_make_one_region() {
    let g = dt_of(&random_points(12, 1));
    let rd = t_division(&g, 64);
    assert_eq!(rd.region_count(), 1);
    assert_eq!(rd.boundary_triangles().count(), 0);
    assert!(rd.boundary_vertices(&g).is_empty());
    assert_division(&g, &rd, 8.0);
}

#[test]
fn division_of_thousand_points() {
    let g = dt_of(&random_points(1000, 2));
    let rd = t_division(&g, 64);
    assert!(rd.region_count() > 1);
    assert_division(&g, &rd, 8.0);
    assert!(rd.size_factor() <= 8.0);
    assert!(rd.boundary_factor() <= 8.0);
}

#[test]
fn region_parameter_values() {
    assert_eq!(region_parameter(2), 4);
    assert_eq!(region_parameter(16), 16);
    assert_eq!(region_parameter(1000), 100);
    assert_eq!(region_parameter(1024), 100);
    assert_eq!(region_parameter(1025), 121);
}

#[test]
fn delaunay_regions_are_all_good() {
    let g = dt_of(&random_points(800, 4));
    let rd = t_division(&g, 36);
    let dt_b = dt_b_of(&g, &rd);
    assert!(classify_regions(&g, &rd, dt_b.as_ref()).iter().all(|&x| x));
}

#[test]
fn one_interior_flip_spoils_one_region() {
    let mut g = dt_of(&random_points(800, 5));
    let rd0 = t_division(&g, 36);
    // An edge with both triangles interior to the same region.
    let h = g
        .edge_half_edges()
        .find(|&h| {
            let (s, t) = (h / 3, g.twin(h) / 3);
            !g.is_ghost(t) && !rd0.is_boundary(s) && !rd0.is_boundary(t) && g.is_flippable_half_edge(h)
        })
        .unwrap();
    let e = EdgeKey::new(g.origin(h), g.dest(h));
    g.flip(e).unwrap();
    let rd = t_division(&g, 36);
    let dt_b = dt_b_of(&g, &rd);
    let good = classify_regions(&g, &rd, dt_b.as_ref());
    assert_eq!(good, classify_direct(&g, &rd, dt_b.as_ref()));
    let bad: Vec<usize> = (0..good.len()).filter(|&i| !good[i]).collect();
    assert!(!bad.is_empty() && bad.len() <= 2, "{bad:?}");
}

#[test]
fn classification_matches_definition() {
    let mut spoiled_by_boundary = 0;
    for seed in 0..30 {
        let mut g = dt_of(&random_points(600, 100 + seed));
        random_flips(&mut g, 1 + seed as usize, seed);
        let rd = t_division(&g, 25);
        let dt_b = dt_b_of(&g, &rd);
        let good = classify_regions(&g, &rd, dt_b.as_ref());
        assert_eq!(good, classify_direct(&g, &rd, dt_b.as_ref()), "seed {seed}");
        let keys: HashSet<[PointId; 3]> = dt_b.as_ref().unwrap().triangles().map(triangle_key).collect();
        spoiled_by_boundary += (0..rd.region_count())
            .filter(|&i| rd.boundary(i).iter().any(|&t| !keys.contains(&triangle_key(g.triangle_vertices(t)))))
            .count();
    }
    assert!(spoiled_by_boundary > 0);
}

#[test]
fn boundary_flip_not_in_boundary_delaunay_is_bad() {
    // Flip an edge shared by two boundary triangles of one region; the new
    // triangles cannot both be Delaunay in the boundary vertex set.
    let mut hits = 0;
    for seed in 0..20 {
        let mut g = dt_of(&random_points(600, 200 + seed));
        let rd = t_division(&g, 25);
        let Some(h) = g.edge_half_edges().find(|&h| {
            let (s, t) = (h / 3, g.twin(h) / 3);
            !g.is_ghost(t) && rd.is_boundary(s) && rd.is_boundary(t) && rd.region_of(s) == rd.region_of(t) && g.is_flippable_half_edge(h)
        }) else {
            continue;
        };
        let r = rd.region_of(h / 3).unwrap();
        g.flip(EdgeKey::new(g.origin(h), g.dest(h))).unwrap();
        let rd = t_division(&g, 25);
        let dt_b = dt_b_of(&g, &rd);
        let good = classify_regions(&g, &rd, dt_b.as_ref());
        assert_eq!(good, classify_direct(&g, &rd, dt_b.as_ref()));
        if rd.region_of(h / 3) == Some(r) {
            assert!(!good[r]);
            hits += 1;
        }
    }
    assert!(hits >= 5);
}

#[test]
fn repair_of_delaunay() {
    let ps = random_points(500, 6);
    let dt = dt_of(&ps);
    let (out, stats) = repair_with(&dt, &checked()).unwrap();
    assert!(dt_equal(&out, &dt));
    assert_eq!(stats.bad_regions, 0);
    assert_eq!(stats.bad_vertices, 0);
    assert_eq!(stats.good_vertices + stats.boundary_vertices, 500);
}

#[test]
fn repair_of_five_flips() {
    for seed in 0..10 {
        let ps = random_points(500, 7 + seed);
        let dt = dt_of(&ps);
        let g = flip_model(&dt, 5, seed).unwrap().triangulation;
        let d = metric_d(&g, &dt).unwrap();
        let (out, stats) = repair_with(&g, &checked()).unwrap();
        assert!(dt_equal(&out, &dt), "seed {seed}");
        assert!(stats.bad_regions as u64 <= 16 * d.max(1), "{} bad regions for D = {d}", stats.bad_regions);
        assert!(stats.bad_regions <= 5 * 4);
    }
}

#[test]
fn repair_of_sampled_edges() {
    let ps = random_points(500, 8);
    let dt = dt_of(&ps);
    for c in [Completion::Random, Completion::LongestFirst] {
        let g = edge_sample_model(&dt, 0.2, c, 1).unwrap().triangulation;
        let out = repair_with(&g, &checked()).unwrap().0;
        assert!(dt_equal(&out, &dt));
        assert!(dt_equal(&repair(&g).unwrap(), &dt));
    }
}

#[test]
fn repair_rejects_invalid_input() {
    let ps = random_points(50, 9);
    let mut g = dt_of(&ps);
    let t = g.triangle_ids().find(|&t| !g.is_ghost(t)).unwrap();
    g.kill(t);
    assert!(repair(&g).is_err());
}

#[test]
fn repair_on_degenerate_points() {
    for seed in 0..10 {
        let ps = grid_points(300, 20, seed);
        let dt = dt_of(&ps);
        let mut g = dt.clone();
        random_flips(&mut g, 40, seed);
        for t in [4, 9, 30] {
            let opts = SeparatorOptions { t: Some(t), ..checked() };
            let out = repair_with(&g, &opts).unwrap().0;
            assert!(dt_equal(&out, &dt), "seed {seed} t {t}");
        }
    }
}

#[test]
fn bounds_on_fuzz_corpus() {
    let (mut worst_bad, mut worst_vb, mut worst_work) = (0f64, 0f64, 0f64);
    for seed in 0..40u64 {
        let n = 500 + 100 * seed as usize;
        let ps = random_points(n, 300 + seed);
        let dt = dt_of(&ps);
        let k = [0, 3, 10, 30, 100][seed as usize % 5];
        let g = flip_model(&dt, k, seed).unwrap().triangulation;
        let d = metric_d(&g, &dt).unwrap() as f64;
        let (out, stats) = repair_with(&g, &checked()).unwrap();
        assert!(dt_equal(&out, &dt));
        let t = stats.t as f64;
        let lg = (n as f64).log2();
        if d > 0.0 {
            worst_bad = worst_bad.max(stats.bad_regions as f64 / d);
        }
        worst_vb = worst_vb.max(stats.boundary_vertices as f64 / (n as f64 / t.sqrt()));
        let scale = n as f64 / t.sqrt() * lg + d * t * lg;
        worst_work = worst_work.max(stats.rebuild_ops.incircle as f64 / scale);
    }
    eprintln!("bad/D {worst_bad:.2}, |V_B|/(n/sqrt t) {worst_vb:.2}, work {worst_work:.2}");
    assert!(worst_bad <= 16.0);
    assert!(worst_vb <= BOUNDARY_VERTEX_FACTOR);
    assert!(worst_work <= WORK_FACTOR);
}

#[test]
fn stats_count_rebuild_work() {
    let ps = random_points(2000, 10);
    let dt = dt_of(&ps);
    let (_, total) = counters::measure(|| repair(&dt).unwrap());
    let (_, stats) = repair_with(&dt, &SeparatorOptions::default()).unwrap();
    assert!(stats.rebuild_ops.incircle > 0);
    assert!(stats.rebuild_ops.incircle <= total.incircle);
}

const BOUNDARY_VERTEX_FACTOR: f64 = 8.0;
const WORK_FACTOR: f64 = 8.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn repair_is_delaunay(seed in any::<u64>(), n in 3usize..400, flips in 0usize..200, t in prop::option::of(4usize..80)) {
        let ps = random_points(n, seed);
        let dt = dt_of(&ps);
        let mut g = dt.clone();
        random_flips(&mut g, flips, seed);
        let d = metric_d(&g, &dt).unwrap();
        let opts = SeparatorOptions { t, seed, certify_patch: true };
        let (out, stats) = repair_with(&g, &opts).unwrap();
        prop_assert!(dt_equal(&out, &dt));
        prop_assert!(stats.bad_regions as u64 <= 16 * d);
        prop_assert_eq!(stats.good_vertices + stats.bad_vertices + stats.boundary_vertices, n);
    }

    #[test]
    fn division_invariants(seed in any::<u64>(), n in 3usize..1500, t in 4usize..200) {
        let g = dt_of(&random_points(n, seed));
        let rd = t_division(&g, t);
        assert_division(&g, &rd, 8.0);
    }
}
