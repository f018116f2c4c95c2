//! Greedy completion of a set of Delaunay edges to a full triangulation.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Completion;
use crate::dt::{walk_segment_while, wedge, WalkEnd, Wedge};
use crate::error::Result;
use crate::geom::{self, PointId};
use crate::tri::{EdgeKey, HalfEdge, TriangleId, Triangulation};

/// Below this many points every pair is a candidate edge.
const ALL_PAIRS_MAX: usize = 2000;

/// Starts from `dt` and, in priority order, forces in every candidate edge
/// that crosses no edge forced so far. The edges in `keep` are forced
/// first and survive to the output.
pub fn complete_triangulation(dt: &Triangulation, keep: &[EdgeKey], order: Completion, seed: u64) -> Result<Triangulation> {
    dt.validate()?;
    let mut t = dt.compacted();
    let mut fixed: HashSet<EdgeKey> = keep.iter().copied().collect();
    let mut candidates = candidate_pool(&t);
    match order {
        Completion::Random => candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
        Completion::LongestFirst => {
            let len2 = |e: &EdgeKey| {
                let (a, b) = (t.point(e.lo()), t.point(e.hi()));
                (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
            };
            candidates.sort_by(|e, f| len2(f).total_cmp(&len2(e)).then(e.cmp(f)));
        }
    }
    let mut crossed = Vec::new();
    for e in candidates {
        if fixed.contains(&e) {
            continue;
        }
        if try_insert(&mut t, e, &fixed, &mut crossed) {
            fixed.insert(e);
        }
    }
    Ok(t.compacted())
}

fn candidate_pool(t: &Triangulation) -> Vec<EdgeKey> {
    let vs: Vec<PointId> = t.vertices().collect();
    if vs.len() <= ALL_PAIRS_MAX {
        let mut out = Vec::with_capacity(vs.len() * (vs.len() - 1) / 2);
        for (i, &a) in vs.iter().enumerate() {
            out.extend(vs[i + 1..].iter().map(|&b| EdgeKey::new(a, b)));
        }
        return out;
    }
    // Pairs two steps apart in the Delaunay graph.
    let mut out = Vec::new();
    for &v in &vs {
        let ring = t.vertex_ring(v);
        for &w in &ring {
            for x in t.vertex_ring(w) {
                if x > v && !ring.contains(&x) {
                    out.push(EdgeKey::new(v, x));
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Inserts `e` by removing the edges it crosses and retriangulating both
/// sides. Leaves `t` unchanged and returns false when `e` would cross a
/// fixed edge or pass through a vertex.
fn try_insert(t: &mut Triangulation, e: EdgeKey, fixed: &HashSet<EdgeKey>, crossed: &mut Vec<HalfEdge>) -> bool {
    let (u, v) = (e.lo(), e.hi());
    let (pu, pv) = (t.point(u), t.point(v));
    let start = match wedge(t, u, pv) {
        Wedge::Edge(_) => return true,
        Wedge::Triangle(s) => s,
        Wedge::Exterior(_) => return false,
    };
    crossed.clear();
    let clear = |h: HalfEdge| {
        let (a, b) = (t.origin(h), t.dest(h));
        !fixed.contains(&EdgeKey::new(a, b))
            && geom::orient_sign_unperturbed(pu, pv, t.point(a)) != 0
            && geom::orient_sign_unperturbed(pu, pv, t.point(b)) != 0
    };
    let (end, _) = walk_segment_while(t, start, pu, pv, u32::MAX, |h| {
        let ok = clear(h);
        if ok {
            crossed.push(h);
        }
        ok
    });
    if !matches!(end, WalkEnd::Vertex(_)) {
        debug_assert!(matches!(end, WalkEnd::Capped(_)));
        return false;
    }
    // Crossed half-edges run from right of u->v to left of it.
    let mut left = vec![u, v];
    let mut right = vec![v, u];
    for &h in crossed.iter() {
        let r = t.origin(h);
        if right.last() != Some(&r) {
            right.push(r);
        }
    }
    for &h in crossed.iter().rev() {
        let l = t.dest(h);
        if left.last() != Some(&l) {
            left.push(l);
        }
    }
    let mut old: Vec<TriangleId> = Vec::with_capacity(crossed.len() + 1);
    old.push(start);
    old.extend(crossed.iter().map(|&h| t.twin(h) / 3));
    let mut new = Vec::with_capacity(crossed.len() + 1);
    triangulate_pseudo_polygon(t, &left, &mut new);
    triangulate_pseudo_polygon(t, &right, &mut new);
    t.replace_triangles(&old, &new);
    true
}

/// `poly` is a counter-clockwise polygon whose first edge `poly[0]->poly[1]`
/// sees every other vertex. Emits the triangles of its constrained
/// Delaunay triangulation.
fn triangulate_pseudo_polygon(t: &Triangulation, poly: &[PointId], out: &mut Vec<[PointId; 3]>) {
    if poly.len() < 3 {
        return;
    }
    let (a, b) = (t.point(poly[0]), t.point(poly[1]));
    let mut pick = 2;
    for i in 3..poly.len() {
        if geom::in_circle(a, b, t.point(poly[pick]), t.point(poly[i])) {
            pick = i;
        }
    }
    let c = poly[pick];
    debug_assert!(geom::ccw(a, b, t.point(c)));
    out.push([poly[0], poly[1], c]);
    let mut side = Vec::with_capacity(pick);
    side.push(c);
    side.push(poly[1]);
    side.extend_from_slice(&poly[2..pick]);
    triangulate_pseudo_polygon(t, &side, out);
    side.clear();
    side.push(poly[0]);
    side.push(c);
    side.extend_from_slice(&poly[pick + 1..]);
    triangulate_pseudo_polygon(t, &side, out);
}
