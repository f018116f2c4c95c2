use std::sync::Arc;

use super::{angular_cmp, EdgeKey, PointSet, Triangulation};
use crate::error::{Error, Result};
use crate::geom::{self, PointId};

/// Plane straight-line graph with its geometric rotation system.
///
/// Edge `i` owns half-edges `2i` (low id to high id) and `2i + 1`. Faces are
/// traced with the face on the left, so bounded faces run counterclockwise
/// and the outer boundary of each component runs clockwise.
#[derive(Clone, Debug)]
pub struct Pslg {
    points: Arc<PointSet>,
    edges: Vec<EdgeKey>,
    /// Outgoing half-edges of each vertex, counterclockwise from the +x axis.
    rotation: Vec<Vec<u32>>,
    next: Vec<u32>,
    cycles: Vec<Vec<u32>>,
    triangulation: Option<Vec<[PointId; 3]>>,
}

impl Pslg {
    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    #[inline]
    pub fn origin(&self, h: u32) -> PointId {
        let e = self.edges[(h / 2) as usize];
        if h.is_multiple_of(2) {
            e.lo()
        } else {
            e.hi()
        }
    }

    #[inline]
    pub fn dest(&self, h: u32) -> PointId {
        self.origin(h ^ 1)
    }

    #[inline]
    pub fn next(&self, h: u32) -> u32 {
        self.next[h as usize]
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn canonical_edge_set(&self) -> Vec<EdgeKey> {
        let mut v = self.edges.clone();
        v.sort_unstable();
        v
    }

    pub fn degree(&self, v: PointId) -> usize {
        self.rotation[v as usize].len()
    }

    /// Outgoing half-edges of `v` counterclockwise, starting from the +x
    /// direction.
    pub fn outgoing(&self, v: PointId) -> &[u32] {
        &self.rotation[v as usize]
    }

    /// Neighbors of `v` counterclockwise, starting from the +x direction.
    pub fn vertex_ring(&self, v: PointId) -> Vec<PointId> {
        self.rotation[v as usize].iter().map(|&h| self.dest(h)).collect()
    }

    /// Face boundaries as half-edge cycles. Every half-edge is in exactly one.
    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    /// Vertex sequence of a cycle.
    pub fn cycle_vertices(&self, c: &[u32]) -> Vec<PointId> {
        c.iter().map(|&h| self.origin(h)).collect()
    }

    /// Whether the graph triangulates the convex hull of all points.
    pub fn is_triangulation(&self) -> bool {
        self.triangulation.is_some()
    }

    pub fn to_triangulation(&self) -> Result<Triangulation> {
        match &self.triangulation {
            Some(tris) => Triangulation::from_triangles(self.points.clone(), tris),
            None => Err(Error::NotATriangulation("graph is not a triangulation of its points".into())),
        }
    }

    /// Vertices of degree zero.
    pub fn isolated_vertices(&self) -> Vec<PointId> {
        (0..self.points.len() as PointId).filter(|&v| self.rotation[v as usize].is_empty()).collect()
    }

    /// Connected component label of every vertex.
    pub fn components(&self) -> Vec<u32> {
        let n = self.points.len();
        let mut label = vec![u32::MAX; n];
        let mut next_label = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next_label;
            stack.push(s as PointId);
            while let Some(v) = stack.pop() {
                for &h in &self.rotation[v as usize] {
                    let w = self.dest(h) as usize;
                    if label[w] == u32::MAX {
                        label[w] = next_label;
                        stack.push(w as PointId);
                    }
                }
            }
            next_label += 1;
        }
        label
    }
}

/// Builds the embedded graph. Rotation order comes from the coordinates,
/// never from the input order.
pub fn build_from_edges(points: Arc<PointSet>, edges: &[EdgeKey]) -> Result<Pslg> {
    let n = points.len();
    let mut seen = std::collections::HashSet::with_capacity(edges.len());
    for &e in edges {
        if e.hi() as usize >= n {
            return Err(Error::InvalidVertex(e.hi()));
        }
        if e.lo() == e.hi() {
            return Err(Error::SelfLoop(e.lo()));
        }
        if !seen.insert(e) {
            return Err(Error::DuplicateEdge(e));
        }
    }
    let mut g = Pslg {
        points,
        edges: edges.to_vec(),
        rotation: vec![Vec::new(); n],
        next: vec![0; 2 * edges.len()],
        cycles: Vec::new(),
        triangulation: None,
    };
    for h in 0..2 * edges.len() as u32 {
        let o = g.origin(h) as usize;
        g.rotation[o].push(h);
    }
    let mut pos = vec![0u32; 2 * edges.len()];
    for v in 0..n {
        let c = g.points.get(v as PointId);
        let mut rot = std::mem::take(&mut g.rotation[v]);
        rot.sort_by(|&a, &b| angular_cmp(c, g.points.get(g.dest(a)), g.points.get(g.dest(b))));
        for (i, &h) in rot.iter().enumerate() {
            pos[h as usize] = i as u32;
        }
        g.rotation[v] = rot;
    }
    // Face on the left: after u -> v, leave v along the edge clockwise from v -> u.
    for h in 0..2 * edges.len() as u32 {
        let t = h ^ 1;
        let rot = &g.rotation[g.origin(t) as usize];
        let i = pos[t as usize] as usize;
        g.next[h as usize] = rot[(i + rot.len() - 1) % rot.len()];
    }
    let mut in_cycle = vec![false; 2 * edges.len()];
    for s in 0..2 * edges.len() as u32 {
        if in_cycle[s as usize] {
            continue;
        }
        let mut c = Vec::new();
        let mut h = s;
        while !in_cycle[h as usize] {
            in_cycle[h as usize] = true;
            c.push(h);
            h = g.next(h);
        }
        g.cycles.push(c);
    }

    g.triangulation = triangulation_certificate(&g);
    if g.triangulation.is_none() {
        if let Some((e, f)) = find_crossing(&g.points, &g.edges) {
            return Err(Error::NotPlanar(e, f));
        }
    }
    Ok(g)
}

/// Returns the bounded triangles if the graph is a triangulation of all its
/// points. A connected graph whose rotation system has genus zero, whose
/// bounded faces are counterclockwise triangles and whose outer face is a
/// convex polygon is a plane triangulation, so no crossing test is needed.
fn triangulation_certificate(g: &Pslg) -> Option<Vec<[PointId; 3]>> {
    let n = g.points.len();
    if n < 3 || !g.isolated_vertices().is_empty() {
        return None;
    }
    let labels = g.components();
    if labels.iter().any(|&l| l != 0) {
        return None;
    }
    if n + g.cycles.len() != g.edges.len() + 2 {
        return None;
    }
    let pt = |v: PointId| g.points.get(v);
    let mut tris = Vec::with_capacity(g.cycles.len());
    let mut outer = None;
    for c in &g.cycles {
        let vs = g.cycle_vertices(c);
        if vs.len() == 3 && geom::ccw(pt(vs[0]), pt(vs[1]), pt(vs[2])) {
            tris.push([vs[0], vs[1], vs[2]]);
        } else if outer.is_none() {
            outer = Some(vs);
        } else {
            return None;
        }
    }
    // A triangle as the whole graph leaves the outer cycle clockwise with 3 vertices.
    let outer = outer?;
    let k = outer.len();
    let mut on = vec![false; n];
    for &v in &outer {
        if std::mem::replace(&mut on[v as usize], true) {
            return None;
        }
    }
    for i in 0..k {
        let (a, b, c) = (outer[i], outer[(i + 1) % k], outer[(i + 2) % k]);
        if geom::ccw(pt(a), pt(b), pt(c)) {
            return None;
        }
    }
    if g.edges.len() + 3 + k != 3 * n {
        return None;
    }
    Some(tris)
}

/// First properly crossing pair found, using a uniform grid over the
/// bounding box. Each segment is registered in every cell its column slabs
/// touch, then pairs sharing a cell are tested exactly.
pub(crate) fn find_crossing(ps: &PointSet, edges: &[EdgeKey]) -> Option<(EdgeKey, EdgeKey)> {
    let m = edges.len();
    if m < 2 {
        return None;
    }
    let ((x0, y0), (x1, y1)) = ps.bbox();
    let side = ((m as f64).sqrt().ceil() as usize).clamp(1, 2048);
    let w = ((x1 - x0) / side as f64).max(f64::MIN_POSITIVE);
    let h = ((y1 - y0) / side as f64).max(f64::MIN_POSITIVE);
    let col = |x: f64| (((x - x0) / w) as usize).min(side - 1);
    let row = |y: f64| (((y - y0) / h) as usize).min(side - 1);
    let mut cells: Vec<Vec<u32>> = vec![Vec::new(); side * side];
    for (i, e) in edges.iter().enumerate() {
        let (p, q) = (ps.get(e.lo()), ps.get(e.hi()));
        let (p, q) = if p.x <= q.x { (p, q) } else { (q, p) };
        let (c0, c1) = (col(p.x), col(q.x));
        for c in c0..=c1 {
            // y-range of the segment inside this column slab, padded by one cell.
            let xa = (x0 + c as f64 * w).max(p.x);
            let xb = (x0 + (c + 1) as f64 * w).min(q.x);
            let (ya, yb) = if p.x == q.x { (p.y, q.y) } else { (y_at(p.x, p.y, q.x, q.y, xa), y_at(p.x, p.y, q.x, q.y, xb)) };
            let r0 = row(ya.min(yb)).saturating_sub(1);
            let r1 = (row(ya.max(yb)) + 1).min(side - 1);
            for r in r0..=r1 {
                cells[r * side + c].push(i as u32);
            }
        }
    }
    let mut best: Option<(EdgeKey, EdgeKey)> = None;
    for cell in &cells {
        for (a, &i) in cell.iter().enumerate() {
            let e = edges[i as usize];
            for &j in &cell[a + 1..] {
                let f = edges[j as usize];
                if geom::segments_properly_cross(ps.get(e.lo()), ps.get(e.hi()), ps.get(f.lo()), ps.get(f.hi())) {
                    let pair = if e < f { (e, f) } else { (f, e) };
                    if best.is_none_or(|b| pair < b) {
                        best = Some(pair);
                    }
                }
            }
        }
    }
    best
}

fn y_at(px: f64, py: f64, qx: f64, qy: f64, x: f64) -> f64 {
    let t = ((x - px) / (qx - px)).clamp(0.0, 1.0);
    py + t * (qy - py)
}
