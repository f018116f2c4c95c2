use std::collections::HashSet;
use std::sync::Arc;

use super::{EdgeKey, PointSet};
use crate::error::{Error, Result};
use crate::geom::{self, counters, Point, PointId};

/// Half-edge index. Half-edge `h` belongs to triangle `h / 3`.
pub type HalfEdge = u32;
pub type TriangleId = u32;

/// The vertex at infinity. Triangles that use it tile the outer face.
pub const GHOST: PointId = u32::MAX;
pub const NONE: u32 = u32::MAX;

/// Triangle mesh over a subset of a [`PointSet`].
///
/// Half-edges are grouped in threes: triangle `t` owns `3t`, `3t+1`, `3t+2`
/// and lists its vertices counterclockwise, so `next` is implicit. The outer
/// face is split into ghost triangles `(a, b, GHOST)`, one per hull edge,
/// where `a -> b` has the exterior on its left. With them every edge has two
/// sides and every vertex a closed ring.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub(crate) points: Arc<PointSet>,
    pub(crate) origin: Vec<PointId>,
    pub(crate) twin: Vec<HalfEdge>,
    pub(crate) dead: Vec<bool>,
    pub(crate) free: Vec<TriangleId>,
    pub(crate) vertex_edge: Vec<HalfEdge>,
    pub(crate) num_vertices: usize,
}

#[inline]
pub(crate) fn next(h: HalfEdge) -> HalfEdge {
    if h % 3 == 2 {
        h - 2
    } else {
        h + 1
    }
}

#[inline]
pub(crate) fn prev(h: HalfEdge) -> HalfEdge {
    if h.is_multiple_of(3) {
        h + 2
    } else {
        h - 1
    }
}

impl Triangulation {
    pub(crate) fn empty(points: Arc<PointSet>) -> Self {
        let n = points.len();
        Triangulation {
            points,
            origin: Vec::new(),
            twin: Vec::new(),
            dead: Vec::new(),
            free: Vec::new(),
            vertex_edge: vec![NONE; n],
            num_vertices: 0,
        }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    #[inline]
    pub fn point(&self, v: PointId) -> &Point {
        self.points.get(v)
    }

    pub fn vertex_count(&self) -> usize {
        self.num_vertices
    }

    pub fn contains_vertex(&self, v: PointId) -> bool {
        (v as usize) < self.vertex_edge.len() && self.vertex_edge[v as usize] != NONE
    }

    /// Vertex ids in increasing order.
    pub fn vertices(&self) -> impl Iterator<Item = PointId> + '_ {
        self.vertex_edge.iter().enumerate().filter(|(_, &h)| h != NONE).map(|(v, _)| v as PointId)
    }

    #[inline]
    pub fn origin(&self, h: HalfEdge) -> PointId {
        self.origin[h as usize]
    }

    #[inline]
    pub fn dest(&self, h: HalfEdge) -> PointId {
        self.origin[next(h) as usize]
    }

    #[inline]
    pub fn twin(&self, h: HalfEdge) -> HalfEdge {
        self.twin[h as usize]
    }

    #[inline]
    pub fn is_alive(&self, t: TriangleId) -> bool {
        !self.dead[t as usize]
    }

    #[inline]
    pub fn triangle_vertices(&self, t: TriangleId) -> [PointId; 3] {
        let b = 3 * t as usize;
        [self.origin[b], self.origin[b + 1], self.origin[b + 2]]
    }

    #[inline]
    pub fn is_ghost(&self, t: TriangleId) -> bool {
        self.triangle_vertices(t).contains(&GHOST)
    }

    pub(crate) fn triangle_slots(&self) -> u32 {
        self.dead.len() as u32
    }

    /// Live triangle ids, ghosts included.
    pub fn triangle_ids(&self) -> impl Iterator<Item = TriangleId> + '_ {
        (0..self.triangle_slots()).filter(|&t| !self.dead[t as usize])
    }

    /// Bounded triangles, counterclockwise.
    pub fn triangles(&self) -> impl Iterator<Item = [PointId; 3]> + '_ {
        self.triangle_ids().filter(|&t| !self.is_ghost(t)).map(|t| self.triangle_vertices(t))
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles().count()
    }

    /// One half-edge per edge, ghost edges excluded.
    pub fn edge_half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        self.triangle_ids().flat_map(move |t| {
            (3 * t..3 * t + 3).filter(move |&h| {
                let (a, b) = (self.origin(h), self.dest(h));
                a < b && b != GHOST
            })
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeKey> + '_ {
        self.edge_half_edges().map(move |h| EdgeKey::new(self.origin(h), self.dest(h)))
    }

    pub fn edge_count(&self) -> usize {
        self.edge_half_edges().count()
    }

    /// Deterministic sorted edge list; equal lists mean equal triangulations.
    pub fn canonical_edge_set(&self) -> Vec<EdgeKey> {
        let mut v: Vec<EdgeKey> = self.edges().collect();
        v.sort_unstable();
        v
    }

    /// Hull vertices in counterclockwise order.
    pub fn hull(&self) -> Vec<PointId> {
        let Some(g) = self.triangle_ids().find(|&t| self.is_ghost(t)) else {
            return Vec::new();
        };
        // Ghost (a, b, GHOST): the hull runs b -> a counterclockwise.
        let start = self.ghost_edge(g);
        let mut out = Vec::new();
        let mut h = start;
        loop {
            out.push(self.dest(h));
            // Next ghost clockwise along the outer face shares vertex origin(h).
            let to_ghost = prev(h); // GHOST -> a
            let across = self.twin(to_ghost); // a -> GHOST in neighbor ghost
            h = prev(across); // that ghost's real edge
            if h == start {
                break;
            }
        }
        out
    }

    /// The real half-edge `a -> b` of ghost triangle `g`.
    pub(crate) fn ghost_edge(&self, g: TriangleId) -> HalfEdge {
        (3 * g..3 * g + 3).find(|&h| self.origin(h) != GHOST && self.dest(h) != GHOST).expect("ghost triangle has one real edge")
    }

    /// Outgoing half-edge of `v` that comes next counterclockwise after `h`.
    #[inline]
    pub fn ccw_around_origin(&self, h: HalfEdge) -> HalfEdge {
        self.twin(prev(h))
    }

    #[inline]
    pub fn cw_around_origin(&self, h: HalfEdge) -> HalfEdge {
        next(self.twin(h))
    }

    /// All outgoing half-edges of `v`, counterclockwise, ghost spoke included.
    pub fn outgoing(&self, v: PointId) -> Vec<HalfEdge> {
        let start = self.vertex_edge[v as usize];
        if start == NONE {
            return Vec::new();
        }
        let mut out = vec![start];
        let mut h = self.ccw_around_origin(start);
        while h != start {
            out.push(h);
            h = self.ccw_around_origin(h);
        }
        out
    }

    /// Neighbors of `v` in counterclockwise order. For a hull vertex the list
    /// starts right after the outer face; otherwise it starts at the neighbor
    /// with the smallest id.
    pub fn vertex_ring(&self, v: PointId) -> Vec<PointId> {
        let out = self.outgoing(v);
        let ghost = out.iter().position(|&h| self.dest(h) == GHOST);
        let start = match ghost {
            Some(g) => (g + 1) % out.len(),
            None => (0..out.len()).min_by_key(|&i| self.dest(out[i])).unwrap_or(0),
        };
        (0..out.len()).map(|i| self.dest(out[(start + i) % out.len()])).filter(|&w| w != GHOST).collect()
    }

    pub fn degree(&self, v: PointId) -> usize {
        self.vertex_ring(v).len()
    }

    /// Half-edge `u -> v` if the edge exists.
    pub fn find_half_edge(&self, u: PointId, v: PointId) -> Option<HalfEdge> {
        if !self.contains_vertex(u) {
            return None;
        }
        let start = self.vertex_edge[u as usize];
        let mut h = start;
        loop {
            if self.dest(h) == v {
                return Some(h);
            }
            h = self.ccw_around_origin(h);
            if h == start {
                return None;
            }
        }
    }

    pub fn has_edge(&self, e: EdgeKey) -> bool {
        self.find_half_edge(e.lo(), e.hi()).is_some()
    }

    /// Whether half-edge `h` lies on the hull (one side is a ghost triangle).
    pub fn is_hull_half_edge(&self, h: HalfEdge) -> bool {
        self.is_ghost(h / 3) || self.is_ghost(self.twin(h) / 3)
    }

    /// Local Delaunay test on a half-edge. Hull edges pass by convention.
    pub fn is_locally_delaunay_half_edge(&self, h: HalfEdge) -> bool {
        if self.is_hull_half_edge(h) {
            return true;
        }
        let a = self.point(self.origin(h));
        let b = self.point(self.dest(h));
        let c = self.point(self.origin(prev(h)));
        let d = self.point(self.origin(prev(self.twin(h))));
        !geom::in_circle(a, b, c, d)
    }

    pub fn is_locally_delaunay(&self, e: EdgeKey) -> Result<bool> {
        let h = self.find_half_edge(e.lo(), e.hi()).ok_or(Error::NotAnEdge(e))?;
        Ok(self.is_locally_delaunay_half_edge(h))
    }

    /// Whether the two triangles at interior half-edge `h` form a strictly
    /// convex quadrilateral.
    pub fn is_flippable_half_edge(&self, h: HalfEdge) -> bool {
        if self.is_hull_half_edge(h) {
            return false;
        }
        let a = self.point(self.origin(h));
        let b = self.point(self.dest(h));
        let c = self.point(self.origin(prev(h)));
        let d = self.point(self.origin(prev(self.twin(h))));
        // c is left of a->b and d right of it; the quad is convex iff the
        // other diagonal separates a from b.
        geom::ccw(c, d, b) && geom::ccw(d, c, a)
    }

    pub fn flip(&mut self, e: EdgeKey) -> Result<()> {
        let h = self.find_half_edge(e.lo(), e.hi()).ok_or(Error::NotAnEdge(e))?;
        if !self.is_flippable_half_edge(h) {
            return Err(Error::NotFlippable(e));
        }
        self.flip_half_edge(h);
        Ok(())
    }

    /// Replaces the diagonal at `h` by the opposite one. The caller checks
    /// convexity. Afterwards `h` runs between the two former apexes.
    pub(crate) fn flip_half_edge(&mut self, h: HalfEdge) {
        counters::bump_flip();
        let t = self.twin(h);
        // Triangle 1: a b c with h = a->b; triangle 2: b a d with t = b->a.
        let (h1, h2) = (next(h), prev(h)); // b->c, c->a
        let (t1, t2) = (next(t), prev(t)); // a->d, d->b
        let a = self.origin(h);
        let b = self.origin(t);
        let c = self.origin(h2);
        let d = self.origin(t2);
        let (o_h1, o_h2, o_t1, o_t2) = (self.twin(h1), self.twin(h2), self.twin(t1), self.twin(t2));

        // New triangle 1: d c a as (h, h1, h2) = d->c, c->a, a->d.
        // New triangle 2: c d b as (t, t1, t2) = c->d, d->b, b->c.
        self.origin[h as usize] = d;
        self.origin[h1 as usize] = c;
        self.origin[h2 as usize] = a;
        self.origin[t as usize] = c;
        self.origin[t1 as usize] = d;
        self.origin[t2 as usize] = b;
        self.link(h1, o_h2); // c->a
        self.link(h2, o_t1); // a->d
        self.link(t1, o_t2); // d->b
        self.link(t2, o_h1); // b->c
        self.vertex_edge[a as usize] = h2;
        self.vertex_edge[b as usize] = t2;
        self.vertex_edge[c as usize] = h1;
        self.vertex_edge[d as usize] = t1;
    }

    #[inline]
    pub(crate) fn link(&mut self, a: HalfEdge, b: HalfEdge) {
        self.twin[a as usize] = b;
        self.twin[b as usize] = a;
    }

    pub(crate) fn alloc_triangle(&mut self, a: PointId, b: PointId, c: PointId) -> TriangleId {
        if let Some(t) = self.free.pop() {
            let base = 3 * t as usize;
            self.origin[base..base + 3].copy_from_slice(&[a, b, c]);
            self.twin[base..base + 3].fill(NONE);
            self.dead[t as usize] = false;
            t
        } else {
            let t = self.dead.len() as TriangleId;
            self.origin.extend_from_slice(&[a, b, c]);
            self.twin.extend_from_slice(&[NONE; 3]);
            self.dead.push(false);
            t
        }
    }

    /// Appends a triangle without reusing freed slots.
    pub(crate) fn push_triangle(&mut self, a: PointId, b: PointId, c: PointId) -> TriangleId {
        let t = self.dead.len() as TriangleId;
        self.origin.extend_from_slice(&[a, b, c]);
        self.twin.extend_from_slice(&[NONE; 3]);
        self.dead.push(false);
        t
    }

    pub(crate) fn kill(&mut self, t: TriangleId) {
        self.dead[t as usize] = true;
    }

    pub(crate) fn release(&mut self, t: TriangleId) {
        self.dead[t as usize] = true;
        self.free.push(t);
    }

    pub(crate) fn set_vertex_edge(&mut self, v: PointId, h: HalfEdge) {
        if v == GHOST {
            return;
        }
        if self.vertex_edge[v as usize] == NONE {
            self.num_vertices += 1;
        }
        self.vertex_edge[v as usize] = h;
    }

    /// Replaces the triangles `old`, which must form a region with no
    /// holes, by `new`, which must tile the same region. Twins across the
    /// region boundary are kept.
    pub(crate) fn replace_triangles(&mut self, old: &[TriangleId], new: &[[PointId; 3]]) {
        use std::collections::HashMap;
        for &t in old {
            self.release(t);
        }
        let mut outside: HashMap<(PointId, PointId), HalfEdge> = HashMap::with_capacity(old.len() + 2);
        for &t in old {
            for h in 3 * t..3 * t + 3 {
                let tw = self.twin(h);
                if !self.dead[(tw / 3) as usize] {
                    outside.insert((self.origin(h), self.dest(h)), tw);
                }
            }
        }
        let mut inside: HashMap<(PointId, PointId), HalfEdge> = HashMap::with_capacity(3 * new.len());
        for &[a, b, c] in new {
            let t = self.alloc_triangle(a, b, c);
            for h in 3 * t..3 * t + 3 {
                let (u, v) = (self.origin(h), self.dest(h));
                if let Some(tw) = inside.remove(&(v, u)) {
                    self.link(h, tw);
                } else if let Some(&tw) = outside.get(&(u, v)) {
                    self.link(h, tw);
                } else {
                    inside.insert((u, v), h);
                }
                self.set_vertex_edge(u, h);
            }
        }
        debug_assert!(inside.is_empty(), "replacement does not close up");
    }

    /// Copy without dead slots.
    pub fn compacted(&self) -> Triangulation {
        let live: Vec<TriangleId> = self.triangle_ids().collect();
        let mut remap = vec![NONE; self.dead.len()];
        for (i, &t) in live.iter().enumerate() {
            remap[t as usize] = i as TriangleId;
        }
        let map_h = |h: HalfEdge| 3 * remap[(h / 3) as usize] + h % 3;
        let mut out = Triangulation::empty(self.points.clone());
        out.origin.reserve(3 * live.len());
        for &t in &live {
            let b = 3 * t;
            out.origin.extend_from_slice(&self.triangle_vertices(t));
            out.twin.extend((b..b + 3).map(|h| map_h(self.twin(h))));
            out.dead.push(false);
        }
        for (v, &h) in self.vertex_edge.iter().enumerate() {
            if h != NONE {
                out.vertex_edge[v] = map_h(h);
            }
        }
        out.num_vertices = self.num_vertices;
        out
    }

    /// Structural check: twins, orientation of every bounded triangle,
    /// convex outer boundary and the Euler relation. Linear time.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::NotATriangulation(m));
        for t in self.triangle_ids() {
            for h in 3 * t..3 * t + 3 {
                let tw = self.twin(h);
                if tw == NONE || self.twin(tw) != h {
                    return bad(format!("twin of half-edge {h} is inconsistent"));
                }
                if self.dead[(tw / 3) as usize] {
                    return bad(format!("half-edge {h} points into a dead triangle"));
                }
                if self.origin(tw) != self.dest(h) || self.dest(tw) != self.origin(h) {
                    return bad(format!("half-edge {h} and its twin disagree on endpoints"));
                }
            }
            if !self.is_ghost(t) {
                let [a, b, c] = self.triangle_vertices(t);
                if !geom::ccw(self.point(a), self.point(b), self.point(c)) {
                    return bad(format!("triangle ({a}, {b}, {c}) is clockwise"));
                }
            }
        }
        for v in self.vertices() {
            let h = self.vertex_edge[v as usize];
            if self.dead[(h / 3) as usize] || self.origin(h) != v {
                return bad(format!("vertex {v} has a stale incident half-edge"));
            }
        }
        let hull = self.hull();
        let k = hull.len();
        for i in 0..k {
            let (a, b, c) = (hull[i], hull[(i + 1) % k], hull[(i + 2) % k]);
            if !geom::ccw(self.point(a), self.point(b), self.point(c)) {
                return bad(format!("hull turns right at {b}"));
            }
        }
        let n = self.num_vertices;
        let m = self.edge_count();
        if n >= 3 && m + 3 + k != 3 * n {
            return bad(format!("Euler relation fails: n={n}, h={k}, m={m}"));
        }
        if n >= 3 && self.triangle_count() + 2 + k != 2 * n {
            return bad(format!("face count wrong: n={n}, h={k}"));
        }
        Ok(())
    }

    /// Quadratic check that no two edges properly cross.
    pub fn validate_no_crossings(&self) -> Result<()> {
        let edges = self.canonical_edge_set();
        match super::naive_crossings(&self.points, &edges).first() {
            Some(&(e, f)) => Err(Error::NotPlanar(e, f)),
            None => Ok(()),
        }
    }

    /// Hash set of sorted vertex triples of the bounded triangles.
    pub fn triangle_key_set(&self) -> HashSet<[PointId; 3]> {
        self.triangles().map(super::triangle_key).collect()
    }

    /// Builds a triangulation from counterclockwise triangles. The outer
    /// boundary is derived from edges used by only one triangle.
    pub fn from_triangles(points: Arc<PointSet>, tris: &[[PointId; 3]]) -> Result<Triangulation> {
        use std::collections::HashMap;
        let mut tri = Triangulation::empty(points);
        let mut by_edge: HashMap<(PointId, PointId), HalfEdge> = HashMap::with_capacity(3 * tris.len());
        for &[a, b, c] in tris {
            for v in [a, b, c] {
                if v as usize >= tri.points.len() {
                    return Err(Error::InvalidVertex(v));
                }
            }
            let t = tri.push_triangle(a, b, c);
            for h in 3 * t..3 * t + 3 {
                let key = (tri.origin(h), tri.dest(h));
                if by_edge.insert(key, h).is_some() {
                    return Err(Error::NotATriangulation(format!("directed edge {key:?} used twice")));
                }
            }
        }
        let real: Vec<HalfEdge> = (0..3 * tri.triangle_slots()).collect();
        let mut boundary = Vec::new();
        for &h in &real {
            let (a, b) = (tri.origin(h), tri.dest(h));
            match by_edge.get(&(b, a)) {
                Some(&t) => tri.twin[h as usize] = t,
                None => boundary.push(h),
            }
            tri.set_vertex_edge(a, h);
        }
        // One ghost per boundary half-edge a->b: ghost (b, a, GHOST).
        let mut ghost_from: HashMap<PointId, TriangleId> = HashMap::with_capacity(boundary.len());
        for &h in &boundary {
            let (a, b) = (tri.origin(h), tri.dest(h));
            let g = tri.push_triangle(b, a, GHOST);
            tri.link(3 * g, h);
            if ghost_from.insert(b, g).is_some() {
                return Err(Error::NotATriangulation(format!("boundary is not a simple cycle at {b}")));
            }
        }
        // Ghost (b, a, G) has a->G at 3g+1, which pairs with G->a in the ghost starting at a.
        for &g in ghost_from.values() {
            let a = tri.origin(3 * g + 1);
            let Some(&g2) = ghost_from.get(&a) else {
                return Err(Error::NotATriangulation(format!("boundary is open at {a}")));
            };
            // g2 = (a, x, G); its G->a half-edge is 3*g2+2.
            tri.link(3 * g + 1, 3 * g2 + 2);
        }
        tri.validate()?;
        Ok(tri)
    }
}
