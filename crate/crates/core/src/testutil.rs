//! Point and triangulation generators shared by unit tests.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tri::{PointSet, Triangulation};

pub fn pts(c: &[(f64, f64)]) -> Arc<PointSet> {
    Arc::new(PointSet::new(c).unwrap())
}

pub fn random_points(n: usize, seed: u64) -> Arc<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
    pts(&c)
}

/// Distinct points of a small integer grid: many collinear and cocircular
/// subsets.
pub fn grid_points(n: usize, side: i32, seed: u64) -> Arc<PointSet> {
    assert!(n <= (side * side) as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut c = Vec::new();
    while c.len() < n {
        let p = (rng.gen_range(0..side), rng.gen_range(0..side));
        if seen.insert(p) {
            c.push((p.0 as f64, p.1 as f64));
        }
    }
    pts(&c)
}

/// Applies `steps` random flip attempts; returns how many succeeded.
pub fn random_flips(t: &mut Triangulation, steps: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    for _ in 0..steps {
        let edges = t.canonical_edge_set();
        let e = edges[rng.gen_range(0..edges.len())];
        if t.flip(e).is_ok() {
            done += 1;
        }
    }
    done
}
