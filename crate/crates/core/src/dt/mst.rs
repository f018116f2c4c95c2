use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{self, PointId};
use crate::tri::{angular_cmp, EdgeKey, PointSet, Triangulation};

/// A spanning tree of a point set with each vertex's tree edges in
/// counterclockwise order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpanningTree {
    points: Arc<PointSet>,
    edges: Vec<EdgeKey>,
    /// Neighbors in counterclockwise order, starting from the +x direction.
    rings: Vec<Vec<PointId>>,
}

impl SpanningTree {
    /// Checks that `edges` span the points without cycles, then sorts each
    /// vertex's ring by angle.
    pub fn new(points: Arc<PointSet>, edges: Vec<EdgeKey>) -> Result<Self> {
        let n = points.len();
        if edges.len() + 1 != n {
            return Err(Error::NotATriangulation(format!(
                "a spanning tree on {n} points needs {} edges, got {}",
                n.saturating_sub(1),
                edges.len()
            )));
        }
        let mut uf = UnionFind::new(n);
        let mut rings = vec![Vec::new(); n];
        for &e in &edges {
            if e.hi() as usize >= n {
                return Err(Error::InvalidVertex(e.hi()));
            }
            if e.lo() == e.hi() {
                return Err(Error::SelfLoop(e.lo()));
            }
            if !uf.union(e.lo(), e.hi()) {
                return Err(Error::NotATriangulation(format!("edge {e} closes a cycle")));
            }
            rings[e.lo() as usize].push(e.hi());
            rings[e.hi() as usize].push(e.lo());
        }
        for (v, ring) in rings.iter_mut().enumerate() {
            let c = points.get(v as PointId);
            ring.sort_by(|&a, &b| angular_cmp(c, points.get(a), points.get(b)));
        }
        Ok(SpanningTree { points, edges, rings })
    }

    /// Builds from rings that are already in counterclockwise order.
    pub(crate) fn from_sorted_rings(points: Arc<PointSet>, rings: Vec<Vec<PointId>>) -> Self {
        let mut edges: Vec<EdgeKey> = rings
            .iter()
            .enumerate()
            .flat_map(|(v, r)| r.iter().filter(move |&&w| (v as PointId) < w).map(move |&w| EdgeKey::new(v as PointId, w)))
            .collect();
        edges.sort_unstable();
        SpanningTree { points, edges, rings }
    }

    pub fn points(&self) -> &Arc<PointSet> {
        &self.points
    }

    pub fn edges(&self) -> &[EdgeKey] {
        &self.edges
    }

    pub fn canonical_edge_set(&self) -> Vec<EdgeKey> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    pub fn ring(&self, v: PointId) -> &[PointId] {
        &self.rings[v as usize]
    }

    pub fn degree(&self, v: PointId) -> usize {
        self.rings[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.rings.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Total Euclidean length.
    pub fn weight(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let (a, b) = (self.points.get(e.lo()), self.points.get(e.hi()));
                ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
            })
            .sum()
    }

    /// Vertices in breadth-first order from `root`, with their parent
    /// (`u32::MAX` for the root).
    pub fn bfs(&self, root: PointId) -> Vec<(PointId, PointId)> {
        let mut seen = vec![false; self.rings.len()];
        let mut out = vec![(root, u32::MAX)];
        seen[root as usize] = true;
        let mut i = 0;
        while i < out.len() {
            let v = out[i].0;
            i += 1;
            for &w in &self.rings[v as usize] {
                if !std::mem::replace(&mut seen[w as usize], true) {
                    out.push((w, v));
                }
            }
        }
        out
    }
}

/// Euclidean minimum spanning tree of the triangulation's edges (Kruskal
/// with exact length comparisons; equal lengths ordered by edge key).
pub fn planar_mst(dt: &Triangulation) -> SpanningTree {
    let ps = dt.points().clone();
    let mut edges = dt.canonical_edge_set();
    edges.sort_by(|e, f| cmp_edges(&ps, *e, *f));
    let mut uf = UnionFind::new(ps.len());
    let tree: Vec<EdgeKey> = edges.into_iter().filter(|e| uf.union(e.lo(), e.hi())).collect();
    let mut rings = vec![Vec::new(); ps.len()];
    for e in &tree {
        rings[e.lo() as usize].push(e.hi());
        rings[e.hi() as usize].push(e.lo());
    }
    for (v, ring) in rings.iter_mut().enumerate() {
        let c = ps.get(v as PointId);
        ring.sort_by(|&a, &b| angular_cmp(c, ps.get(a), ps.get(b)));
    }
    SpanningTree::from_sorted_rings(ps, rings)
}

pub(crate) fn cmp_edges(ps: &PointSet, e: EdgeKey, f: EdgeKey) -> Ordering {
    geom::cmp_squared_length(ps.get(e.lo()), ps.get(e.hi()), ps.get(f.lo()), ps.get(f.hi())).then(e.cmp(&f))
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), rank: vec![0; n] }
    }

    pub(crate) fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let p = self.parent[v as usize];
            self.parent[v as usize] = self.parent[p as usize];
            v = p;
        }
        v
    }

    /// Joins the two sets; false if they were already one.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (a, b) = if self.rank[a as usize] < self.rank[b as usize] { (b, a) } else { (a, b) };
        self.parent[b as usize] = a;
        if self.rank[a as usize] == self.rank[b as usize] {
            self.rank[a as usize] += 1;
        }
        true
    }
}
