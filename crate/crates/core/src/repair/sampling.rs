//! Randomized repair guided by a spanning tree of the prediction.
//!
//! Points are inserted in a few rounds of growing samples. Before each
//! round every point is located in the current triangulation by walking
//! along the tree edges from an already located neighbor, so a tree whose
//! edges are mostly Delaunay edges makes each walk short.

use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dt::{self, planar_mst, walk_segment, Delaunay, SpanningTree, WalkEnd, Wedge};
use crate::error::{Error, Result};
use crate::geom::counters::{self, OpCounts};
use crate::geom::{self, Point, PointId};
use crate::tri::mesh::prev;
use crate::tri::{EdgeKey, PointSet, TriangleId, Triangulation, GHOST, NONE};

/// Breadth-first spanning tree of `g`. Each vertex keeps its tree edges in
/// the counterclockwise order of `g`.
pub fn spanning_tree_of(g: &Triangulation) -> Result<SpanningTree> {
    g.validate()?;
    let ps = g.points().clone();
    let n = ps.len();
    if g.vertex_count() != n {
        return Err(Error::VertexMismatch);
    }
    let mut parent = vec![NONE; n];
    let root = g.vertices().next().ok_or(Error::TooFewPoints(0))?;
    parent[root as usize] = root;
    let mut queue = vec![root];
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        for w in g.vertex_ring(v) {
            if parent[w as usize] == NONE {
                parent[w as usize] = v;
                queue.push(w);
            }
        }
    }
    let mut rings = vec![Vec::new(); n];
    for v in 0..n as PointId {
        let ring: Vec<PointId> =
            g.vertex_ring(v).into_iter().filter(|&w| parent[w as usize] == v || (parent[v as usize] == w && v != root)).collect();
        rings[v as usize] = rotate_to_axis(&ps, v, ring);
    }
    Ok(SpanningTree::from_sorted_rings(ps, rings))
}

/// Rotates a counterclockwise ring to start at the +x direction.
fn rotate_to_axis(ps: &PointSet, v: PointId, mut ring: Vec<PointId>) -> Vec<PointId> {
    let c = ps.get(v);
    if let Some(first) = (0..ring.len()).min_by(|&a, &b| crate::tri::angular_cmp(c, ps.get(ring[a]), ps.get(ring[b]))) {
        ring.rotate_left(first);
    }
    ring
}

/// Breadth-first spanning tree of an arbitrary connected graph on the
/// points. Its edges may cross.
pub fn spanning_tree_of_edges(ps: &Arc<PointSet>, edges: &[EdgeKey]) -> Result<SpanningTree> {
    let n = ps.len();
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        if e.hi() as usize >= n {
            return Err(Error::InvalidVertex(e.hi()));
        }
        adj[e.lo() as usize].push(e.hi());
        adj[e.hi() as usize].push(e.lo());
    }
    let mut seen = vec![false; n];
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    let mut queue = vec![0];
    seen[0] = true;
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        for &w in &adj[v as usize] {
            if !std::mem::replace(&mut seen[w as usize], true) {
                tree.push(EdgeKey::new(v, w));
                queue.push(w);
            }
        }
    }
    if queue.len() != n {
        return Err(Error::NotATriangulation("graph is not connected".into()));
    }
    SpanningTree::new(ps.clone(), tree)
}

/// Nested samples of the tree's vertex multiset, where each vertex appears
/// once per incident tree edge.
#[derive(Clone, Debug)]
pub struct SampleLadder {
    schedule: Vec<usize>,
    /// A random permutation of the multiset.
    order: Vec<PointId>,
    prefix: Vec<usize>,
    /// Distinct vertices of each prefix, in order of first appearance.
    levels: Vec<Vec<PointId>>,
}

impl SampleLadder {
    /// Divisors `n, floor(log2 n), ..., 1`.
    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// The multiset sample of level `i`.
    pub fn multiset(&self, i: usize) -> &[PointId] {
        &self.order[..self.prefix[i]]
    }

    /// The distinct vertices of level `i`.
    pub fn level(&self, i: usize) -> &[PointId] {
        &self.levels[i]
    }
}

/// The divisor schedule for `n` points.
pub fn ladder_schedule(n: usize) -> Vec<usize> {
    let mut s = vec![n.max(1)];
    while *s.last().unwrap() > 1 {
        let last = *s.last().unwrap();
        s.push((last as f64).log2().floor() as usize);
    }
    s
}

/// Level `i` takes the first `ceil(|multiset| / s_i)` entries of one random
/// permutation of the multiset. The first level is extended until it has
/// three distinct vertices.
pub fn build_ladder(t: &SpanningTree, seed: u64) -> Result<SampleLadder> {
    let n = t.points().len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let mut order: Vec<PointId> = (0..n as PointId).flat_map(|v| std::iter::repeat_n(v, t.degree(v))).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let schedule = ladder_schedule(n);
    let mut seen = vec![false; n];
    let mut distinct: Vec<PointId> = Vec::new();
    let mut prefix = Vec::with_capacity(schedule.len());
    let mut levels = Vec::with_capacity(schedule.len());
    let mut taken = 0;
    for (i, &s) in schedule.iter().enumerate() {
        let mut want = order.len().div_ceil(s).max(taken);
        if i == 0 {
            let mut d = HashSet::new();
            let mut k = 0;
            while k < order.len() && (k < want || d.len() < 3) {
                d.insert(order[k]);
                k += 1;
            }
            want = k;
        }
        for &v in &order[taken..want] {
            if !std::mem::replace(&mut seen[v as usize], true) {
                distinct.push(v);
            }
        }
        taken = want;
        prefix.push(want);
        levels.push(distinct.clone());
    }
    Ok(SampleLadder { schedule, order, prefix, levels })
}

/// Where every point lies in a Delaunay triangulation of a sample, and
/// which triangles' circumcircles contain it.
#[derive(Clone, Debug)]
pub struct ConflictAssignment {
    /// For a point off the sample, a triangle containing it (a ghost
    /// triangle when outside the hull). For a sample vertex, the triangle
    /// at it in the direction of its first tree edge.
    pub location: Vec<TriangleId>,
    /// Conflicting points of each bounded triangle, by triangle slot.
    pub lists: Vec<Vec<PointId>>,
    pub walks: WalkStats,
}

impl ConflictAssignment {
    pub fn conflicts(&self, t: TriangleId) -> &[PointId] {
        self.lists.get(t as usize).map_or(&[], Vec::as_slice)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WalkStats {
    /// Triangle edges crossed by tree-edge walks.
    pub crossings: u64,
    /// Walks that were abandoned for a point location query.
    pub capped: u64,
    /// Walks that left the hull.
    pub outside: u64,
}

impl std::ops::AddAssign for WalkStats {
    fn add_assign(&mut self, o: WalkStats) {
        self.crossings += o.crossings;
        self.capped += o.capped;
        self.outside += o.outside;
    }
}

/// Walk budget for `n` points.
pub fn walk_cap(n: usize) -> u32 {
    (n.max(2) as f64).log2().ceil() as u32
}

/// For each tree target of `p`, given in counterclockwise order, the corner
/// of `p` in `tri` that its direction falls into. One pass over both rings.
fn ring_wedges(tri: &Triangulation, p: PointId, targets: &[PointId]) -> Vec<Wedge> {
    let pp = tri.point(p);
    // (x, y, half-edge, exterior): corner from x counterclockwise to y.
    let mut corners: Vec<(PointId, PointId, u32, bool)> = Vec::new();
    let mut ghost_y = None;
    for h in tri.outgoing(p) {
        let (x, y) = (tri.dest(h), tri.origin(prev(h)));
        if x == GHOST {
            ghost_y = Some(y);
            continue;
        }
        corners.push((x, y, h, y == GHOST));
    }
    if let Some(gy) = ghost_y {
        for c in corners.iter_mut().filter(|c| c.3) {
            c.1 = gy;
        }
    }
    let inside = |c: &(PointId, PointId, u32, bool), q: &Point| {
        let (x, y) = (tri.point(c.0), tri.point(c.1));
        if c.3 {
            geom::ccw(pp, x, q) || !geom::ccw(pp, y, q)
        } else {
            geom::ccw(pp, x, q) && !geom::ccw(pp, y, q)
        }
    };
    let mut out = Vec::with_capacity(targets.len());
    let mut j = 0;
    for &q in targets {
        let pq = tri.point(q);
        let mut steps = 0;
        let w = loop {
            let c = &corners[j];
            if c.0 == q {
                break Wedge::Edge(c.2);
            }
            if c.1 != q && inside(c, pq) {
                break if c.3 { Wedge::Exterior(c.2 / 3) } else { Wedge::Triangle(c.2 / 3) };
            }
            j = (j + 1) % corners.len();
            steps += 1;
            assert!(steps <= corners.len(), "corners cover every direction");
        };
        out.push(w);
    }
    out
}

/// Locates every point of the tree in `d` by walking tree edges outward
/// from the sample. A walk longer than `cap` crossings, or one that leaves
/// the hull, is replaced by a point location query.
pub fn locate_all(d: &Delaunay, t: &SpanningTree, cap: u32) -> (Vec<TriangleId>, WalkStats) {
    let tri = d.triangulation();
    let n = t.points().len();
    let mut loc = vec![NONE; n];
    let mut stats = WalkStats::default();
    let root = tri.vertices().next().expect("sample is not empty");
    let mut parent = vec![NONE; n];
    parent[root as usize] = root;
    let mut queue = vec![root];
    if t.degree(root) == 0 {
        loc[root as usize] = d.locate(root);
    }
    let mut i = 0;
    while i < queue.len() {
        let p = queue[i];
        i += 1;
        let ring = t.ring(p);
        let children: Vec<PointId> = ring.iter().copied().filter(|&w| parent[w as usize] == NONE).collect();
        for &w in &children {
            parent[w as usize] = p;
            queue.push(w);
        }
        if tri.contains_vertex(p) {
            let wedges = ring_wedges(tri, p, ring);
            loc[p as usize] = match wedges[0] {
                Wedge::Edge(h) => h / 3,
                Wedge::Triangle(s) | Wedge::Exterior(s) => s,
            };
            for (k, &q) in ring.iter().enumerate() {
                if parent[q as usize] != p || tri.contains_vertex(q) {
                    continue;
                }
                loc[q as usize] = match wedges[k] {
                    Wedge::Triangle(s) => walk_to(d, s, p, q, cap, &mut stats),
                    Wedge::Exterior(_) => {
                        stats.outside += 1;
                        d.locate(q)
                    }
                    Wedge::Edge(_) => unreachable!("q is not a vertex"),
                };
            }
        } else {
            let s = loc[p as usize];
            for &q in &children {
                if tri.contains_vertex(q) {
                    continue;
                }
                loc[q as usize] = if tri.is_ghost(s) {
                    stats.outside += 1;
                    d.locate(q)
                } else {
                    walk_to(d, s, p, q, cap, &mut stats)
                };
            }
        }
    }
    debug_assert!(loc.iter().all(|&l| l != NONE), "tree spans the points");
    (loc, stats)
}

fn walk_to(d: &Delaunay, start: TriangleId, p: PointId, q: PointId, cap: u32, stats: &mut WalkStats) -> TriangleId {
    let tri = d.triangulation();
    let (end, crossed) = walk_segment(tri, start, tri.point(p), tri.point(q), cap, |_| {});
    stats.crossings += crossed as u64;
    match end {
        WalkEnd::Inside(s) => s,
        WalkEnd::Outside(_) => {
            stats.outside += 1;
            d.locate(q)
        }
        WalkEnd::Capped(_) => {
            stats.capped += 1;
            d.locate(q)
        }
        WalkEnd::Vertex(_) => unreachable!("q is not a vertex"),
    }
}

/// Locations plus full conflict lists, found by a search from each
/// point's location over the triangles in conflict with it.
pub fn conflict_lists(d: &Delaunay, t: &SpanningTree, cap: u32) -> ConflictAssignment {
    let (location, walks) = locate_all(d, t, cap);
    let tri = d.triangulation();
    let mut lists: Vec<Vec<PointId>> = vec![Vec::new(); tri.triangle_ids().max().map_or(0, |m| m as usize + 1)];
    let mut mark: Vec<PointId> = vec![NONE; lists.len()];
    let mut stack = Vec::new();
    for p in 0..t.points().len() as PointId {
        if tri.contains_vertex(p) {
            continue;
        }
        let q = tri.point(p);
        let s = location[p as usize];
        mark[s as usize] = p;
        stack.push(s);
        while let Some(u) = stack.pop() {
            if !tri.is_ghost(u) {
                lists[u as usize].push(p);
            }
            for h in 3 * u..3 * u + 3 {
                let w = tri.twin(h) / 3;
                if mark[w as usize] != p {
                    mark[w as usize] = p;
                    if d.in_conflict(w, q) {
                        stack.push(w);
                    }
                }
            }
        }
    }
    ConflictAssignment { location, lists, walks }
}

/// Conflict lists by testing every point against every bounded triangle.
pub fn naive_conflict_lists(tri: &Triangulation) -> Vec<Vec<PointId>> {
    let slots = tri.triangle_ids().max().map_or(0, |m| m as usize + 1);
    let mut lists = vec![Vec::new(); slots];
    for s in tri.triangle_ids().filter(|&s| !tri.is_ghost(s)) {
        let [a, b, c] = tri.triangle_vertices(s).map(|v| tri.point(v));
        for p in tri.points().points() {
            if !tri.contains_vertex(p.id) && geom::in_circle(a, b, c, p) {
                lists[s as usize].push(p.id);
            }
        }
    }
    lists
}

/// Inserts `ids` that are not yet vertices, each starting from its
/// recorded location.
pub fn refine(d: &mut Delaunay, location: &[TriangleId], ids: &[PointId]) -> Result<()> {
    for &p in ids {
        if !d.triangulation().contains_vertex(p) {
            d.insert_located(p, location[p as usize])?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SamplingOptions {
    pub seed: u64,
    /// Check that each level's triangulation is Delaunay.
    pub check_levels: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SamplingStats {
    pub levels: usize,
    /// Distinct vertices per level.
    pub level_sizes: Vec<usize>,
    pub walks: WalkStats,
    pub ops: OpCounts,
}

/// Delaunay triangulation of the points of `t`.
pub fn repair_from_tree(t: &SpanningTree, opts: &SamplingOptions) -> Result<(Triangulation, SamplingStats)> {
    let ps = t.points().clone();
    let ladder = build_ladder(t, opts.seed)?;
    let cap = walk_cap(ps.len());
    let mut stats = SamplingStats { levels: ladder.level_count(), ..Default::default() };
    let (d, ops) = counters::measure(|| -> Result<Delaunay> {
        let mut d = dt::delaunay_with_history(&ps, ladder.level(0), opts.seed)?;
        stats.level_sizes.push(ladder.level(0).len());
        for i in 1..ladder.level_count() {
            if opts.check_levels {
                assert!(dt::is_locally_delaunay_everywhere(d.triangulation()), "level {} is not Delaunay", i - 1);
            }
            let next = ladder.level(i);
            stats.level_sizes.push(next.len());
            if next.len() == ladder.level(i - 1).len() {
                continue;
            }
            let (location, walks) = locate_all(&d, t, cap);
            stats.walks += walks;
            refine(&mut d, &location, next)?;
        }
        Ok(d)
    });
    let tri = d?.into_triangulation().compacted();
    if opts.check_levels {
        assert!(dt::is_locally_delaunay_everywhere(&tri));
    }
    stats.ops = ops;
    Ok((tri, stats))
}

/// Delaunay triangulation of the vertices of `g`, guided by a
/// breadth-first spanning tree of `g`.
pub fn repair(g: &Triangulation, seed: u64) -> Result<Triangulation> {
    let t = spanning_tree_of(g)?;
    Ok(repair_from_tree(&t, &SamplingOptions { seed, ..Default::default() })?.0)
}

/// Euclidean minimum spanning tree from any spanning tree.
pub fn emst_repair(t: &SpanningTree, seed: u64) -> Result<SpanningTree> {
    let dt = repair_from_tree(t, &SamplingOptions { seed, ..Default::default() })?.0;
    Ok(planar_mst(&dt))
}

/// Ring sorting work beyond degree six, summed over the vertices of `t`.
pub fn excess_degree(t: &SpanningTree) -> usize {
    (0..t.points().len() as PointId).map(|v| t.degree(v).saturating_sub(6)).sum()
}
