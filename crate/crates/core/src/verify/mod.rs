//! Checks that a triangulation is Delaunay, and certificates that the edges
//! of a plane graph are Delaunay edges.

use std::collections::HashSet;
use std::sync::Arc;

use crate::dt::{self, UnionFind};
use crate::error::{Error, Result};
use crate::geom::{self, Point, PointId};
use crate::metrics::PointGrid;
use crate::tri::{convex_hull, EdgeKey, Pslg, Triangulation, GHOST};

/// True iff every interior edge is locally Delaunay.
pub fn is_delaunay(g: &Triangulation) -> bool {
    dt::is_locally_delaunay_everywhere(g)
}

/// Same points and the same edges.
pub fn dt_equal(a: &Triangulation, b: &Triangulation) -> bool {
    (Arc::ptr_eq(a.points(), b.points()) || a.points() == b.points())
        && a.edge_count() == b.edge_count()
        && a.canonical_edge_set() == b.canonical_edge_set()
}

/// Outcome of [`certify_subgraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertResult {
    pub certified: bool,
    /// A triangular face and a point of a neighboring face strictly inside
    /// its circumcircle.
    pub witness: Option<([PointId; 3], PointId)>,
    /// An edge that is neither on the convex hull nor next to a triangular
    /// face, so the certificate does not apply.
    pub uncovered_edge: Option<EdgeKey>,
}

impl CertResult {
    fn certified() -> Self {
        CertResult { certified: true, witness: None, uncovered_edge: None }
    }
}

/// Certifies that every edge of `g` is a Delaunay edge of its points.
///
/// Each edge must lie on the convex hull of all points or next to a
/// triangular face. The graph is certified when no triangular face has a
/// vertex of an adjacent face, including vertices isolated inside that
/// face, strictly inside its circumcircle. The converse does not hold:
/// an uncertified graph may still consist of Delaunay edges.
pub fn certify_subgraph(g: &Pslg) -> CertResult {
    let ps = g.points();
    let faces = Faces::new(g);
    let hull = convex_hull(ps);
    let mut hull_edges = HashSet::new();
    if hull.len() > 1 {
        for i in 0..hull.len() {
            hull_edges.insert(EdgeKey::new(hull[i], hull[(i + 1) % hull.len()]));
        }
    }
    for (i, &e) in g.edges().iter().enumerate() {
        let h = 2 * i as u32;
        let beside = |h: u32| faces.is_triangle(faces.face_of_half_edge(h));
        if !beside(h) && !beside(h ^ 1) && !hull_edges.contains(&e) {
            return CertResult { certified: false, witness: None, uncovered_edge: Some(e) };
        }
    }
    let grid = PointGrid::new(ps);
    for (c, cycle) in g.cycles().iter().enumerate() {
        if !faces.is_triangle(c) {
            continue;
        }
        let tri = [g.origin(cycle[0]), g.origin(cycle[1]), g.origin(cycle[2])];
        let neighbors: Vec<usize> = cycle.iter().map(|&h| faces.face_of_half_edge(h ^ 1)).collect();
        let mut worst: Option<PointId> = None;
        grid.for_each_inside(ps, tri, |p| {
            if worst.is_none_or(|w| p < w) && faces.vertex_faces(g, p).any(|f| neighbors.contains(&f)) {
                worst = Some(p);
            }
        });
        if let Some(p) = worst {
            return CertResult { certified: false, witness: Some((tri, p)), uncovered_edge: None };
        }
    }
    CertResult::certified()
}

/// Face structure of a plane graph that may be disconnected. Bounded faces
/// are identified with their counterclockwise boundary cycle; the outer
/// cycle of each component belongs to the face that contains it.
struct Faces {
    cycle_of: Vec<u32>,
    /// Face of every cycle: itself when bounded, else the containing face.
    face_of_cycle: Vec<usize>,
    /// Containing face of each isolated vertex.
    isolated_in: Vec<usize>,
    /// Whether some component lies inside the face.
    has_holes: Vec<bool>,
    sizes: Vec<usize>,
}

impl Faces {
    fn new(g: &Pslg) -> Self {
        let ps = g.points();
        let n = ps.len();
        let cycles = g.cycles();
        let unbounded = cycles.len();
        let mut cycle_of = vec![0u32; 2 * g.edge_count()];
        for (c, cycle) in cycles.iter().enumerate() {
            for &h in cycle {
                cycle_of[h as usize] = c as u32;
            }
        }
        let label = g.components();
        let comps = label.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut leftmost: Vec<Option<PointId>> = vec![None; comps];
        for v in 0..n as PointId {
            let slot = &mut leftmost[label[v as usize] as usize];
            if slot.is_none_or(|w| geom::left_of(ps.get(v), ps.get(w))) {
                *slot = Some(v);
            }
        }
        // The leftmost vertex is extreme, so its neighbors span less than a
        // half-turn and the outer face sits past the most counterclockwise.
        let mut outer = vec![usize::MAX; comps];
        for (k, v) in leftmost.iter().enumerate() {
            let v = v.expect("every component has a vertex");
            let out = g.outgoing(v);
            if out.is_empty() {
                continue;
            }
            let pv = ps.get(v);
            let mut best = out[0];
            for &h in &out[1..] {
                if geom::ccw(pv, ps.get(g.dest(best)), ps.get(g.dest(h))) {
                    best = h;
                }
            }
            outer[k] = cycle_of[best as usize] as usize;
        }
        let is_outer: HashSet<usize> = outer.iter().copied().filter(|&c| c != usize::MAX).collect();
        let bounded: Vec<usize> = (0..cycles.len()).filter(|c| !is_outer.contains(c)).collect();
        let locator = CycleLocator::new(g, &bounded);
        let mut container = vec![unbounded; comps];
        for (k, v) in leftmost.iter().enumerate() {
            let v = v.unwrap();
            container[k] = locator.innermost(g, ps.get(v), |c| label[g.origin(cycles[c][0]) as usize] as usize != k).unwrap_or(unbounded);
        }
        let mut face_of_cycle: Vec<usize> = (0..cycles.len()).collect();
        for (k, &c) in outer.iter().enumerate() {
            if c != usize::MAX {
                face_of_cycle[c] = container[k];
            }
        }
        let mut has_holes = vec![false; cycles.len() + 1];
        for &f in &container {
            has_holes[f] = true;
        }
        let isolated_in = (0..n).map(|v| container[label[v] as usize]).collect();
        let sizes = cycles.iter().map(Vec::len).collect();
        Faces { cycle_of, face_of_cycle, isolated_in, has_holes, sizes }
    }

    fn face_of_half_edge(&self, h: u32) -> usize {
        self.face_of_cycle[self.cycle_of[h as usize] as usize]
    }

    /// A bounded face whose boundary is a triangle with nothing inside.
    fn is_triangle(&self, f: usize) -> bool {
        f < self.sizes.len() && self.face_of_cycle[f] == f && self.sizes[f] == 3 && !self.has_holes[f]
    }

    /// Faces whose closure contains `v`.
    fn vertex_faces<'a>(&'a self, g: &'a Pslg, v: PointId) -> impl Iterator<Item = usize> + 'a {
        let out = g.outgoing(v);
        let isolated = out.is_empty().then(|| self.isolated_in[v as usize]);
        out.iter().map(move |&h| self.face_of_half_edge(h)).chain(isolated)
    }
}

/// Grid over the bounding boxes of cycles for point-in-face queries.
struct CycleLocator {
    x0: f64,
    y0: f64,
    cell: f64,
    side: usize,
    buckets: Vec<Vec<u32>>,
    area: Vec<f64>,
}

impl CycleLocator {
    fn new(g: &Pslg, cycles: &[usize]) -> Self {
        let ps = g.points();
        let ((x0, y0), (x1, y1)) = ps.bbox();
        let side = ((ps.len() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let extent = (x1 - x0).max(y1 - y0);
        let cell = if extent > 0.0 { extent / side as f64 } else { 1.0 };
        let index = |v: f64, o: f64| (((v - o) / cell) as usize).min(side - 1);
        let mut buckets = vec![Vec::new(); side * side];
        let mut area = vec![0.0; g.cycles().len()];
        for &c in cycles {
            let cycle = &g.cycles()[c];
            let (mut lx, mut ly, mut hx, mut hy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            let mut twice = 0.0;
            for &h in cycle {
                let (a, b) = (ps.get(g.origin(h)), ps.get(g.dest(h)));
                lx = lx.min(a.x);
                ly = ly.min(a.y);
                hx = hx.max(a.x);
                hy = hy.max(a.y);
                twice += a.x * b.y - a.y * b.x;
            }
            area[c] = twice.abs();
            for j in index(ly, y0)..=index(hy, y0) {
                for i in index(lx, x0)..=index(hx, x0) {
                    buckets[j * side + i].push(c as u32);
                }
            }
        }
        CycleLocator { x0, y0, cell, side, buckets, area }
    }

    /// Smallest bounded cycle accepted by `eligible` that contains `p`.
    fn innermost(&self, g: &Pslg, p: &Point, eligible: impl Fn(usize) -> bool) -> Option<usize> {
        let i = (((p.x - self.x0) / self.cell) as usize).min(self.side - 1);
        let j = (((p.y - self.y0) / self.cell) as usize).min(self.side - 1);
        let mut best: Option<usize> = None;
        for &c in &self.buckets[j * self.side + i] {
            let c = c as usize;
            if best.is_some_and(|b| self.area[c] >= self.area[b]) || !eligible(c) {
                continue;
            }
            if cycle_contains(g, &g.cycles()[c], p) {
                best = Some(c);
            }
        }
        best
    }
}

/// Crossing-number test with a ray towards -x, in the perturbed plane.
/// `p` must not be a vertex of the cycle.
fn cycle_contains(g: &Pslg, cycle: &[u32], p: &Point) -> bool {
    let ps = g.points();
    let mut inside = false;
    for &h in cycle {
        let (a, b) = (ps.get(g.origin(h)), ps.get(g.dest(h)));
        let (ua, ub) = (geom::above(a, p), geom::above(b, p));
        if ua != ub {
            let (lo, hi) = if ub { (a, b) } else { (b, a) };
            if !geom::ccw(lo, hi, p) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Removes `initial` from `t`, then keeps removing edges that have bounded,
/// non-triangular faces on both sides until none is left. Returns every
/// removed edge, the initial ones first.
pub fn removal_cascade(t: &Triangulation, initial: &[EdgeKey]) -> Result<Vec<EdgeKey>> {
    let slots = t.triangle_ids().max().map_or(0, |m| m as usize + 1);
    let outside = slots as u32;
    let mut uf = UnionFind::new(slots + 1);
    let mut size = vec![1u32; slots + 1];
    for g in t.triangle_ids().filter(|&g| t.is_ghost(g)) {
        uf.union(g, outside);
    }
    let root_outside = |uf: &mut UnionFind| uf.find(outside);
    let face = |uf: &mut UnionFind, h: u32| uf.find(h / 3);
    let mut removed = Vec::new();
    let mut gone = HashSet::new();
    let mut work = Vec::new();

    let remove = |uf: &mut UnionFind, size: &mut Vec<u32>, work: &mut Vec<u32>, h: u32| {
        let (f, g) = (uf.find(h / 3), uf.find(t.twin(h) / 3));
        if f == g {
            return;
        }
        for x in [f, g] {
            if size[x as usize] == 1 && x != uf.find(outside) {
                work.extend(3 * x..3 * x + 3);
            }
        }
        let merged = size[f as usize] + size[g as usize];
        uf.union(f, g);
        let r = uf.find(f);
        size[r as usize] = merged;
    };

    for &e in initial {
        let h = t.find_half_edge(e.lo(), e.hi()).ok_or(Error::NotAnEdge(e))?;
        if gone.insert(e) {
            removed.push(e);
            remove(&mut uf, &mut size, &mut work, h);
        }
    }
    while let Some(h) = work.pop() {
        let (a, b) = (t.origin(h), t.dest(h));
        if a == GHOST || b == GHOST {
            continue;
        }
        let e = EdgeKey::new(a, b);
        if gone.contains(&e) {
            continue;
        }
        let out = root_outside(&mut uf);
        let (f, g) = (face(&mut uf, h), face(&mut uf, t.twin(h)));
        let open = |x: u32| x != out && size[x as usize] > 1;
        if open(f) && open(g) {
            gone.insert(e);
            removed.push(e);
            remove(&mut uf, &mut size, &mut work, h);
        }
    }
    Ok(removed)
}

/// Plane graph of the edges of `t` minus `removed`, over all of `t`'s points.
pub fn subgraph_without(t: &Triangulation, removed: &[EdgeKey]) -> Result<Pslg> {
    let drop: HashSet<EdgeKey> = removed.iter().copied().collect();
    let keep: Vec<EdgeKey> = t.canonical_edge_set().into_iter().filter(|e| !drop.contains(e)).collect();
    crate::tri::build_from_edges(t.points().clone(), &keep)
}

#[cfg(test)]
mod tests;
