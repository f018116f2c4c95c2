//! Delaunay construction: randomized incremental insertion with a history
//! DAG, walk-based insertion, merging, Lawson legalization and the MST.

mod mst;
mod walk;

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{self, counters, Point, PointId};
use crate::tri::mesh::{next, prev};
use crate::tri::{HalfEdge, PointSet, TriangleId, Triangulation, GHOST, NONE};

pub(crate) use mst::UnionFind;
pub use mst::{planar_mst, SpanningTree};
pub use walk::{segment_crossings, walk_segment, walk_segment_while, wedge, WalkEnd, Wedge};

const EPOCH_LIMIT: u32 = 1 << 31;

/// Triangles replaced by one insertion, kept as DAG nodes.
#[derive(Clone, Debug)]
struct History {
    /// For each triangle slot, the contiguous range of triangles that
    /// replaced it, or `(NONE, 0)` while it is alive.
    children: Vec<(u32, u32)>,
    roots: Vec<TriangleId>,
    /// Centroid of the first triangle; ghost regions are cones from it.
    anchor: [Point; 3],
}

/// A Delaunay triangulation under construction.
///
/// With history enabled, triangle slots are never reused and every killed
/// triangle points at the triangles that replaced it, so any point can be
/// located by descending from the first four triangles.
#[derive(Clone, Debug)]
pub struct Delaunay {
    tri: Triangulation,
    history: Option<History>,
    /// Cavity members carry `epoch`, triangles tested and rejected `epoch | 1`.
    stamp: Vec<u32>,
    epoch: u32,
    last: TriangleId,
    // Scratch buffers reused across insertions.
    cavity: Vec<TriangleId>,
    boundary: Vec<HalfEdge>,
}

impl Delaunay {
    /// Starts from the triangle on three vertices.
    pub fn new(points: Arc<PointSet>, first: [PointId; 3], with_history: bool) -> Self {
        let [a, mut b, mut c] = first;
        if !geom::ccw(points.get(a), points.get(b), points.get(c)) {
            std::mem::swap(&mut b, &mut c);
        }
        let mut tri = Triangulation::empty(points.clone());
        let t = tri.push_triangle(a, b, c);
        // Ghosts (b, a, G), (c, b, G), (a, c, G).
        let g0 = tri.push_triangle(b, a, GHOST);
        let g1 = tri.push_triangle(c, b, GHOST);
        let g2 = tri.push_triangle(a, c, GHOST);
        tri.link(3 * t, 3 * g0);
        tri.link(3 * t + 1, 3 * g1);
        tri.link(3 * t + 2, 3 * g2);
        tri.link(3 * g0 + 1, 3 * g2 + 2); // a->G with G->a
        tri.link(3 * g1 + 1, 3 * g0 + 2); // b->G with G->b
        tri.link(3 * g2 + 1, 3 * g1 + 2); // c->G with G->c
        tri.set_vertex_edge(a, 3 * t);
        tri.set_vertex_edge(b, 3 * t + 1);
        tri.set_vertex_edge(c, 3 * t + 2);
        let history = with_history.then(|| History {
            children: vec![(NONE, 0); 4],
            roots: vec![t, g0, g1, g2],
            anchor: [*points.get(a), *points.get(b), *points.get(c)],
        });
        Delaunay { tri, history, stamp: vec![0; 4], epoch: 0, last: t, cavity: Vec::new(), boundary: Vec::new() }
    }

    /// Wraps an existing Delaunay triangulation; locating walks from the
    /// previous insertion.
    pub fn from_triangulation(tri: Triangulation) -> Self {
        let last = tri.triangle_ids().find(|&t| !tri.is_ghost(t)).unwrap_or(0);
        let slots = tri.triangle_slots() as usize;
        Delaunay { tri, history: None, stamp: vec![0; slots], epoch: 0, last, cavity: Vec::new(), boundary: Vec::new() }
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn into_triangulation(self) -> Triangulation {
        self.tri
    }

    pub fn has_history(&self) -> bool {
        self.history.is_some()
    }

    fn pt(&self, v: PointId) -> &Point {
        self.tri.point(v)
    }

    /// Whether `q` lies in the region of triangle `t`. Ghost `(a, b, G)` owns
    /// the part beyond edge `ab` of the cone from the anchor between the rays
    /// through `b` (inclusive) and `a` (exclusive).
    fn region_contains(&self, t: TriangleId, q: &Point) -> bool {
        let [a, b, c] = self.tri.triangle_vertices(t);
        if c == GHOST || a == GHOST || b == GHOST {
            let h = self.tri.ghost_edge(t);
            let (a, b) = (self.pt(self.tri.origin(h)), self.pt(self.tri.dest(h)));
            if !geom::ccw(a, b, q) {
                return false;
            }
            let anchor = &self.history.as_ref().expect("ghost regions need history").anchor;
            let tri = [&anchor[0], &anchor[1], &anchor[2]];
            geom::orient_from_centroid(tri, b, q) >= 0 && geom::orient_from_centroid(tri, a, q) < 0
        } else {
            let (a, b, c) = (self.pt(a), self.pt(b), self.pt(c));
            geom::ccw(a, b, q) && geom::ccw(b, c, q) && geom::ccw(c, a, q)
        }
    }

    /// Descends the history from node `t`, whose region must contain `q`.
    fn descend(&self, mut t: TriangleId, q: &Point) -> TriangleId {
        let h = self.history.as_ref().expect("descend needs history");
        loop {
            let (start, len) = h.children[t as usize];
            if start == NONE {
                return t;
            }
            t = (start..start + len).find(|&c| self.region_contains(c, q)).expect("history children cover the parent region");
        }
    }

    /// Triangle containing `q`, or a ghost triangle when `q` is outside the
    /// hull. For a vertex of the triangulation, the triangle of its stored
    /// outgoing half-edge.
    pub fn locate(&self, q: PointId) -> TriangleId {
        if self.tri.contains_vertex(q) {
            return self.tri.vertex_edge[q as usize] / 3;
        }
        let p = self.pt(q);
        match &self.history {
            Some(h) => {
                let root = *h.roots.iter().find(|&&r| self.region_contains(r, p)).expect("roots cover the plane");
                self.descend(root, p)
            }
            None => self.walk(self.last, q),
        }
    }

    /// Visibility walk from `from` towards point `q`. Stops at the triangle
    /// containing `q` or at the first ghost reached; either is in conflict
    /// with `q`.
    pub fn walk(&self, from: TriangleId, q: PointId) -> TriangleId {
        let p = self.pt(q);
        let mut t = from;
        if self.tri.is_ghost(t) {
            // Step inside through the hull edge.
            let h = self.tri.ghost_edge(t);
            let (a, b) = (self.pt(self.tri.origin(h)), self.pt(self.tri.dest(h)));
            if geom::ccw(a, b, p) {
                return t;
            }
            t = self.tri.twin(h) / 3;
        }
        let mut k = 0u32;
        'outer: loop {
            if self.tri.is_ghost(t) {
                return t;
            }
            // Rotate the first edge checked to keep the walk from favoring one side.
            for i in 0..3 {
                let h = 3 * t + (k + i) % 3;
                let (a, b) = (self.pt(self.tri.origin(h)), self.pt(self.tri.dest(h)));
                if !geom::ccw(a, b, p) {
                    counters::bump_walk();
                    t = self.tri.twin(h) / 3;
                    k = k.wrapping_add(1);
                    continue 'outer;
                }
            }
            return t;
        }
    }

    pub(crate) fn in_conflict(&self, t: TriangleId, q: &Point) -> bool {
        let [a, b, c] = self.tri.triangle_vertices(t);
        if a == GHOST || b == GHOST || c == GHOST {
            let h = self.tri.ghost_edge(t);
            geom::ccw(self.pt(self.tri.origin(h)), self.pt(self.tri.dest(h)), q)
        } else {
            geom::in_circle(self.pt(a), self.pt(b), self.pt(c), q)
        }
    }

    /// Inserts vertex `p` of the point set.
    pub fn insert(&mut self, p: PointId) -> Result<()> {
        let t = self.locate(p);
        self.insert_from(p, t)
    }

    /// Inserts `p` starting from a hint triangle. A live hint in conflict
    /// with `p` is used directly; a dead hint is refined through the history;
    /// anything else is walked from.
    pub fn insert_seeded(&mut self, p: PointId, hint: TriangleId) -> Result<()> {
        if self.tri.contains_vertex(p) {
            return Err(Error::DuplicatePoint(p, p));
        }
        let q = *self.pt(p);
        let seed = if (hint as usize) < self.tri.dead.len() && self.tri.is_alive(hint) {
            if self.in_conflict(hint, &q) {
                hint
            } else {
                self.walk(hint, p)
            }
        } else if self.history.is_some() && (hint as usize) < self.tri.dead.len() && self.region_contains(hint, &q) {
            self.descend(hint, &q)
        } else {
            self.locate(p)
        };
        self.insert_at(p, seed)
    }

    /// Inserts `p` given a triangle whose region contained it at some
    /// earlier time. A live one still does and needs no test; a dead one is
    /// refined through the history.
    pub fn insert_located(&mut self, p: PointId, was: TriangleId) -> Result<()> {
        if self.tri.contains_vertex(p) {
            return Err(Error::DuplicatePoint(p, p));
        }
        // Without history, slots are reused and `was` means nothing.
        let seed = if self.history.is_none() {
            self.locate(p)
        } else if self.tri.is_alive(was) {
            was
        } else {
            self.descend(was, self.pt(p))
        };
        self.insert_at(p, seed)
    }

    fn insert_from(&mut self, p: PointId, t: TriangleId) -> Result<()> {
        if self.tri.contains_vertex(p) {
            return Err(Error::DuplicatePoint(p, p));
        }
        self.insert_at(p, t)
    }

    /// Bowyer-Watson step: `seed` must be in conflict with `p`.
    fn insert_at(&mut self, p: PointId, seed: TriangleId) -> Result<()> {
        let q = *self.pt(p);
        self.epoch += 2;
        if self.epoch >= EPOCH_LIMIT {
            self.stamp.fill(0);
            self.epoch = 2;
        }
        let epoch = self.epoch;
        let mut cavity = std::mem::take(&mut self.cavity);
        let mut boundary = std::mem::take(&mut self.boundary);
        cavity.clear();
        boundary.clear();
        cavity.push(seed);
        self.stamp[seed as usize] = epoch;
        let mut i = 0;
        while i < cavity.len() {
            let t = cavity[i];
            i += 1;
            for h in 3 * t..3 * t + 3 {
                let n = self.tri.twin(h) / 3;
                let s = self.stamp[n as usize];
                if s == epoch {
                    continue;
                }
                if s != epoch | 1 && self.in_conflict(n, &q) {
                    self.stamp[n as usize] = epoch;
                    cavity.push(n);
                } else {
                    self.stamp[n as usize] = epoch | 1;
                    boundary.push(h);
                }
            }
        }

        let mut fresh: Vec<(PointId, TriangleId)> = Vec::with_capacity(boundary.len());
        let mut outside: Vec<HalfEdge> = Vec::with_capacity(boundary.len());
        for &h in &boundary {
            fresh.push((self.tri.origin(h), 0));
            outside.push(self.tri.twin(h));
        }
        let ends: Vec<(PointId, PointId)> = boundary.iter().map(|&h| (self.tri.origin(h), self.tri.dest(h))).collect();
        let first_new = self.tri.triangle_slots();
        for &t in &cavity {
            if self.history.is_some() {
                self.tri.kill(t);
            } else {
                self.tri.release(t);
            }
        }
        for (k, &(u, v)) in ends.iter().enumerate() {
            let t = if self.history.is_some() { self.tri.push_triangle(u, v, p) } else { self.tri.alloc_triangle(u, v, p) };
            fresh[k].1 = t;
            self.tri.link(3 * t, outside[k]);
            self.tri.set_vertex_edge(u, 3 * t);
        }
        fresh.sort_unstable_by_key(|&(u, _)| u);
        for &(_, t) in &fresh {
            // v->p of (u, v, p) pairs with p->v of the triangle starting at v.
            let v = self.tri.origin(3 * t + 1);
            let j = fresh.binary_search_by_key(&v, |&(u, _)| u).expect("cavity boundary is a cycle");
            let other = fresh[j].1;
            self.tri.link(3 * t + 1, 3 * other + 2);
        }
        let any = fresh[0].1;
        self.tri.set_vertex_edge(p, 3 * any + 2);
        if self.stamp.len() < self.tri.dead.len() {
            self.stamp.resize(self.tri.dead.len(), 0);
        }
        if let Some(h) = &mut self.history {
            let count = self.tri.triangle_slots() - first_new;
            h.children.resize(self.tri.triangle_slots() as usize, (NONE, 0));
            for &t in &cavity {
                h.children[t as usize] = (first_new, count);
            }
        }
        // Prefer a bounded triangle as the next walk start.
        self.last = fresh.iter().map(|&(_, t)| t).find(|&t| !self.tri.is_ghost(t)).unwrap_or(any);
        self.cavity = cavity;
        self.boundary = boundary;
        Ok(())
    }
}

fn shuffled(ids: &[PointId], seed: u64) -> Vec<PointId> {
    let mut order = ids.to_vec();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Delaunay triangulation of the whole point set.
pub fn delaunay(ps: &Arc<PointSet>, seed: u64) -> Result<Triangulation> {
    let ids: Vec<PointId> = (0..ps.len() as PointId).collect();
    delaunay_of(ps, &ids, seed)
}

/// Delaunay triangulation of the points with the given ids.
pub fn delaunay_of(ps: &Arc<PointSet>, ids: &[PointId], seed: u64) -> Result<Triangulation> {
    Ok(delaunay_with_history(ps, ids, seed)?.into_triangulation().compacted())
}

/// Randomized incremental construction keeping the history DAG. When all
/// points lie on one line the history cannot anchor its outer regions and
/// the result locates by walking instead.
pub fn delaunay_with_history(ps: &Arc<PointSet>, ids: &[PointId], seed: u64) -> Result<Delaunay> {
    if ids.len() < 3 {
        return Err(Error::TooFewPoints(ids.len()));
    }
    let mut order = shuffled(ids, seed);
    // The first triangle must have positive area without the perturbation.
    let (a, b) = (ps.get(order[0]), ps.get(order[1]));
    let third = (2..order.len()).find(|&i| geom::orient_sign_unperturbed(a, b, ps.get(order[i])) != 0);
    let with_history = third.is_some();
    if let Some(i) = third {
        order.swap(2, i);
    }
    let mut d = Delaunay::new(ps.clone(), [order[0], order[1], order[2]], with_history);
    for &p in &order[3..] {
        d.insert(p)?;
    }
    Ok(d)
}

/// Delaunay triangulation of the union of two vertex-disjoint Delaunay
/// triangulations over the same points. The smaller one's vertices are
/// inserted into the larger one in breadth-first order, each walk starting
/// next to an already inserted neighbor.
pub fn merge_dt(a: &Triangulation, b: &Triangulation) -> Result<Triangulation> {
    if !Arc::ptr_eq(a.points(), b.points()) && a.points() != b.points() {
        return Err(Error::VertexMismatch);
    }
    let (big, small) = if a.vertex_count() >= b.vertex_count() { (a, b) } else { (b, a) };
    if let Some(v) = small.vertices().find(|&v| big.contains_vertex(v)) {
        return Err(Error::IdCollision(v));
    }
    if small.vertex_count() == 0 {
        return Ok(big.clone());
    }
    let order = bfs_order(small);
    let mut d = Delaunay::from_triangulation(big.clone());
    insert_near(&mut d, &order)?;
    Ok(d.into_triangulation().compacted())
}

/// Inserts `(vertex, parent)` pairs; each walk starts at the parent's
/// triangle when the parent is already present.
pub(crate) fn insert_near(d: &mut Delaunay, order: &[(PointId, PointId)]) -> Result<()> {
    for &(v, parent) in order {
        let from = if parent != NONE && d.tri.contains_vertex(parent) { d.tri.vertex_edge[parent as usize] / 3 } else { d.last };
        let t = d.walk(from, v);
        d.insert_from(v, t)?;
    }
    Ok(())
}

/// Vertices of `t` in breadth-first order with their BFS parent.
fn bfs_order(t: &Triangulation) -> Vec<(PointId, PointId)> {
    let n = t.points().len();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(t.vertex_count());
    for s in t.vertices() {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let start = out.len();
        out.push((s, NONE));
        let mut i = start;
        while i < out.len() {
            let v = out[i].0;
            i += 1;
            for h in t.outgoing(v) {
                let w = t.dest(h);
                if w != GHOST && !seen[w as usize] {
                    seen[w as usize] = true;
                    out.push((w, v));
                }
            }
        }
    }
    out
}

/// Inserts isolated vertices (fewer than three, or any count) into `t`.
pub fn insert_vertices(t: &Triangulation, ids: &[PointId]) -> Result<Triangulation> {
    let mut d = Delaunay::from_triangulation(t.clone());
    let order: Vec<(PointId, PointId)> = ids.iter().map(|&v| (v, NONE)).collect();
    insert_near(&mut d, &order)?;
    Ok(d.into_triangulation().compacted())
}

/// Lawson's procedure: flips edges that are not locally Delaunay until none
/// remain. Returns the Delaunay triangulation and the number of flips.
pub fn greedy_legalize(g: &Triangulation) -> (Triangulation, u64) {
    let mut t = g.clone();
    let mut stack: Vec<HalfEdge> = t.edge_half_edges().collect();
    let mut flips = 0;
    while let Some(h) = stack.pop() {
        if !t.is_alive(h / 3) || t.is_hull_half_edge(h) || t.is_locally_delaunay_half_edge(h) {
            continue;
        }
        // A non-locally-Delaunay interior edge always has a convex quadrilateral.
        debug_assert!(t.is_flippable_half_edge(h));
        t.flip_half_edge(h);
        flips += 1;
        let tw = t.twin(h);
        stack.extend([next(h), prev(h), next(tw), prev(tw)]);
    }
    (t, flips)
}

/// Whether every interior edge is locally Delaunay.
pub fn is_locally_delaunay_everywhere(t: &Triangulation) -> bool {
    t.edge_half_edges().all(|h| t.is_locally_delaunay_half_edge(h))
}
