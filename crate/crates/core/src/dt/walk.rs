//! Straight-line walks through a triangulation.

use crate::geom::{self, counters, Point, PointId};
use crate::tri::mesh::{next, prev};
use crate::tri::{HalfEdge, TriangleId, Triangulation, GHOST};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WalkEnd {
    /// The target lies strictly inside this triangle.
    Inside(TriangleId),
    /// The target is a vertex of this triangle.
    Vertex(TriangleId),
    /// The segment left the hull; this is the ghost triangle entered.
    Outside(TriangleId),
    /// The crossing budget ran out in this triangle.
    Capped(TriangleId),
}

/// Where the segment from vertex `u` towards `q` starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wedge {
    /// `u -> q` is already an edge.
    Edge(HalfEdge),
    /// The bounded triangle at `u` whose corner contains the direction.
    Triangle(TriangleId),
    /// The direction points out of the hull; a ghost triangle at `u`.
    Exterior(TriangleId),
}

/// Finds the corner of `u` that the segment towards `q` leaves through.
pub fn wedge(tri: &Triangulation, u: PointId, q: &Point) -> Wedge {
    let pu = tri.point(u);
    let mut exterior = None;
    for h in tri.outgoing(u) {
        let x = tri.dest(h);
        let y = tri.origin(prev(h));
        if x == q.id {
            return Wedge::Edge(h);
        }
        if x == GHOST || y == GHOST {
            exterior = Some(h / 3);
            continue;
        }
        if y == q.id {
            continue;
        }
        if geom::ccw(pu, tri.point(x), q) && !geom::ccw(pu, tri.point(y), q) {
            return Wedge::Triangle(h / 3);
        }
    }
    Wedge::Exterior(exterior.expect("a vertex outside every bounded corner is on the hull"))
}

/// Walks the segment from `p` to `q`. `p` is either strictly inside
/// `start` or the vertex of `start` whose corner contains the direction
/// (see [`wedge`]). Each crossed edge is reported to `on_cross` with the
/// half-edge on the side being left. Returns the end state and the number
/// of edges crossed; at most `cap` crossings are made.
pub fn walk_segment(
    tri: &Triangulation,
    start: TriangleId,
    p: &Point,
    q: &Point,
    cap: u32,
    mut on_cross: impl FnMut(HalfEdge),
) -> (WalkEnd, u32) {
    walk_segment_while(tri, start, p, q, cap, |h| {
        on_cross(h);
        true
    })
}

/// Like [`walk_segment`], but stops with [`WalkEnd::Capped`] as soon as
/// `on_cross` returns false. The refused edge is not crossed.
pub fn walk_segment_while(
    tri: &Triangulation,
    start: TriangleId,
    p: &Point,
    q: &Point,
    cap: u32,
    mut on_cross: impl FnMut(HalfEdge) -> bool,
) -> (WalkEnd, u32) {
    if tri.is_ghost(start) {
        return (WalkEnd::Outside(start), 0);
    }
    let pt = |v: PointId| tri.point(v);
    let left = |v: PointId| geom::ccw(p, q, pt(v));
    // Exit edge of the first triangle: origin right of p->q, dest left.
    let mut exit = NONE_EDGE;
    for h in 3 * start..3 * start + 3 {
        let (a, b) = (tri.origin(h), tri.dest(h));
        if a == q.id || b == q.id {
            return (WalkEnd::Vertex(start), 0);
        }
        if a == p.id || b == p.id {
            continue;
        }
        if !left(a) && left(b) {
            exit = h;
            break;
        }
    }
    debug_assert!(exit != NONE_EDGE, "segment does not leave the start triangle");
    let mut t = start;
    let mut crossed = 0;
    loop {
        let (a, b) = (tri.origin(exit), tri.dest(exit));
        if geom::ccw(pt(a), pt(b), q) {
            return (WalkEnd::Inside(t), crossed);
        }
        if crossed == cap || !on_cross(exit) {
            return (WalkEnd::Capped(t), crossed);
        }
        counters::bump_walk();
        crossed += 1;
        let f = tri.twin(exit);
        t = f / 3;
        if tri.is_ghost(t) {
            return (WalkEnd::Outside(t), crossed);
        }
        let z = tri.origin(prev(f));
        if z == q.id {
            return (WalkEnd::Vertex(t), crossed);
        }
        exit = if left(z) { next(f) } else { prev(f) };
    }
}

const NONE_EDGE: HalfEdge = HalfEdge::MAX;

/// Number of edges of `tri` properly crossed by the segment between
/// vertices `u` and `v`.
pub fn segment_crossings(tri: &Triangulation, u: PointId, v: PointId) -> u32 {
    let q = tri.point(v);
    match wedge(tri, u, q) {
        Wedge::Edge(_) => 0,
        Wedge::Triangle(t) => {
            let (end, n) = walk_segment(tri, t, tri.point(u), q, u32::MAX, |_| {});
            debug_assert!(matches!(end, WalkEnd::Vertex(_)));
            n
        }
        Wedge::Exterior(_) => unreachable!("both endpoints are vertices of the triangulation"),
    }
}
