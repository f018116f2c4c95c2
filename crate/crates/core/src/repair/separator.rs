//! Deterministic repair through a division of the dual graph into regions.
//!
//! Regions whose boundary triangles survive in the Delaunay triangulation
//! of all boundary vertices, and whose edges are locally Delaunay, are
//! pasted into that triangulation unchanged. The vertices of the other
//! regions are triangulated from scratch and merged in.

use std::collections::HashSet;

use crate::dt::{self, delaunay_of};
use crate::error::Result;
use crate::geom::counters::{self, OpCounts};
use crate::geom::PointId;
use crate::tri::{triangle_key, HalfEdge, TriangleId, Triangulation};

/// Regions are split while they hold more than this many times `t`
/// triangles.
pub const REGION_FACTOR: usize = 4;

const NO_REGION: u32 = u32::MAX;

/// Partition of the bounded triangles into dual-connected regions.
#[derive(Clone, Debug)]
pub struct RDivision {
    t: usize,
    regions: Vec<Vec<TriangleId>>,
    boundary: Vec<Vec<TriangleId>>,
    region_of: Vec<u32>,
    on_boundary: Vec<bool>,
}

impl RDivision {
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn region(&self, i: usize) -> &[TriangleId] {
        &self.regions[i]
    }

    /// Triangles of region `i` next to another region or to the outer face.
    pub fn boundary(&self, i: usize) -> &[TriangleId] {
        &self.boundary[i]
    }

    pub fn region_of(&self, t: TriangleId) -> Option<usize> {
        match self.region_of.get(t as usize) {
            Some(&r) if r != NO_REGION => Some(r as usize),
            _ => None,
        }
    }

    pub fn is_boundary(&self, t: TriangleId) -> bool {
        self.on_boundary.get(t as usize).copied().unwrap_or(false)
    }

    /// All boundary triangles.
    pub fn boundary_triangles(&self) -> impl Iterator<Item = TriangleId> + '_ {
        self.boundary.iter().flatten().copied()
    }

    /// Vertices of boundary triangles, sorted.
    pub fn boundary_vertices(&self, g: &Triangulation) -> Vec<PointId> {
        let mut v: Vec<PointId> = self.boundary_triangles().flat_map(|t| g.triangle_vertices(t)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Largest region size over `t`.
    pub fn size_factor(&self) -> f64 {
        self.regions.iter().map(Vec::len).max().unwrap_or(0) as f64 / self.t as f64
    }

    /// Largest boundary size over `sqrt(t)`.
    pub fn boundary_factor(&self) -> f64 {
        self.boundary.iter().map(Vec::len).max().unwrap_or(0) as f64 / (self.t as f64).sqrt()
    }
}

fn neighbors(g: &Triangulation, t: TriangleId) -> impl Iterator<Item = TriangleId> + '_ {
    (3 * t..3 * t + 3).map(move |h| g.twin(h) / 3).filter(move |&u| !g.is_ghost(u))
}

/// Scratch space for breadth-first searches over subsets of triangles.
struct Scratch {
    stamp: Vec<u32>,
    token: u32,
}

impl Scratch {
    fn new(slots: usize) -> Self {
        Scratch { stamp: vec![0; slots], token: 0 }
    }

    /// Marks `set` with a fresh token, one above the returned value.
    fn mark(&mut self, set: &[TriangleId]) -> u32 {
        self.token += 2;
        for &t in set {
            self.stamp[t as usize] = self.token;
        }
        self.token
    }

    /// Breadth-first order of the part of the marked set reachable from
    /// `start`. Visited triangles get the token plus one.
    fn bfs(&mut self, g: &Triangulation, start: TriangleId, token: u32) -> Vec<TriangleId> {
        let mut out = vec![start];
        self.stamp[start as usize] = token + 1;
        let mut i = 0;
        while i < out.len() {
            let t = out[i];
            i += 1;
            for u in neighbors(g, t) {
                if self.stamp[u as usize] == token {
                    self.stamp[u as usize] = token + 1;
                    out.push(u);
                }
            }
        }
        out
    }

    fn components(&mut self, g: &Triangulation, set: &[TriangleId]) -> Vec<Vec<TriangleId>> {
        let token = self.mark(set);
        let mut out = Vec::new();
        for &t in set {
            if self.stamp[t as usize] == token {
                out.push(self.bfs(g, t, token));
            }
        }
        out
    }
}

fn centroid(g: &Triangulation, t: TriangleId) -> (f64, f64) {
    let [a, b, c] = g.triangle_vertices(t).map(|v| g.point(v));
    ((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
}

/// Splits `set` across the longer side of its centroid bounding box into
/// two parts whose sizes are proportional to the number of regions each
/// will hold.
fn bisect(g: &Triangulation, set: &mut Vec<TriangleId>, cap: usize) -> Vec<TriangleId> {
    let (mut lx, mut ly, mut hx, mut hy) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &t in set.iter() {
        let (x, y) = centroid(g, t);
        lx = lx.min(x);
        hx = hx.max(x);
        ly = ly.min(y);
        hy = hy.max(y);
    }
    let pieces = set.len().div_ceil(cap);
    let at = set.len() * (pieces / 2) / pieces;
    let key = |t: &TriangleId| {
        let c = centroid(g, *t);
        if hx - lx >= hy - ly {
            c.0
        } else {
            c.1
        }
    };
    set.select_nth_unstable_by(at, |a, b| key(a).total_cmp(&key(b)).then(a.cmp(b)));
    set.split_off(at)
}

/// Divides the bounded triangles of `g` into dual-connected regions of at
/// most `REGION_FACTOR * t` triangles by recursive bisection of triangle
/// centroids, keeping each side's dual components apart.
/// A single region has no boundary; with several regions, triangles next
/// to another region or to the outer face are boundary triangles.
pub fn t_division(g: &Triangulation, t: usize) -> RDivision {
    assert!(t >= 4, "t must be at least 4");
    let slots = g.triangle_ids().max().map_or(0, |m| m as usize + 1);
    let cap = REGION_FACTOR * t;
    let mut scratch = Scratch::new(slots);
    let real: Vec<TriangleId> = g.triangle_ids().filter(|&t| !g.is_ghost(t)).collect();
    let mut stack = scratch.components(g, &real);
    let mut regions = Vec::new();
    while let Some(mut part) = stack.pop() {
        if part.len() <= cap {
            regions.push(part);
            continue;
        }
        let rest = bisect(g, &mut part, cap);
        stack.extend(scratch.components(g, &part));
        stack.extend(scratch.components(g, &rest));
    }
    let mut region_of = vec![NO_REGION; slots];
    for (i, r) in regions.iter().enumerate() {
        for &t in r {
            region_of[t as usize] = i as u32;
        }
    }
    let mut on_boundary = vec![false; slots];
    let mut boundary = vec![Vec::new(); regions.len()];
    if regions.len() > 1 {
        for (i, r) in regions.iter().enumerate() {
            for &t in r {
                let outside = (3 * t..3 * t + 3).any(|h| region_of[(g.twin(h) / 3) as usize] != i as u32);
                if outside {
                    on_boundary[t as usize] = true;
                    boundary[i].push(t);
                }
            }
        }
    }
    RDivision { t, regions, boundary, region_of, on_boundary }
}

/// Region size parameter for `n` points: the square of `ceil(log2 n)`, at
/// least 4.
pub fn region_parameter(n: usize) -> usize {
    let lg = (n.max(2) as f64).log2().ceil() as usize;
    (lg * lg).max(4)
}

/// Good-region flags. A region is good when each of its boundary triangles
/// is a triangle of `dt_b` and every edge of its triangles is locally
/// Delaunay in `g`. Each edge is tested once.
pub fn classify_regions(g: &Triangulation, rd: &RDivision, dt_b: Option<&Triangulation>) -> Vec<bool> {
    let mut good = vec![true; rd.region_count()];
    if let Some(dt_b) = dt_b {
        let keys: HashSet<[PointId; 3]> = dt_b.triangles().map(triangle_key).collect();
        for (i, b) in rd.boundary.iter().enumerate() {
            if b.iter().any(|&t| !keys.contains(&triangle_key(g.triangle_vertices(t)))) {
                good[i] = false;
            }
        }
    }
    for h in g.edge_half_edges() {
        if g.is_hull_half_edge(h) || g.is_locally_delaunay_half_edge(h) {
            continue;
        }
        for t in [h / 3, g.twin(h) / 3] {
            if let Some(r) = rd.region_of(t) {
                good[r] = false;
            }
        }
    }
    good
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SeparatorStats {
    pub t: usize,
    pub regions: usize,
    pub bad_regions: usize,
    pub boundary_vertices: usize,
    pub good_vertices: usize,
    pub bad_vertices: usize,
    /// Largest region over `t`.
    pub size_factor: f64,
    /// Largest region boundary over `sqrt(t)`.
    pub boundary_factor: f64,
    /// Operations spent triangulating the boundary vertices and the
    /// vertices of bad regions from scratch.
    pub rebuild_ops: OpCounts,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SeparatorOptions {
    /// Region size parameter; derived from the number of vertices when
    /// absent.
    pub t: Option<usize>,
    pub seed: u64,
    /// Check that the patched triangulation is locally Delaunay everywhere
    /// before merging. Costs one incircle test per edge.
    pub certify_patch: bool,
}

/// Delaunay triangulation of the vertices of `g`.
pub fn repair(g: &Triangulation) -> Result<Triangulation> {
    Ok(repair_with(g, &SeparatorOptions::default())?.0)
}

pub fn repair_with(g: &Triangulation, opts: &SeparatorOptions) -> Result<(Triangulation, SeparatorStats)> {
    g.validate()?;
    let ps = g.points();
    let t = opts.t.unwrap_or_else(|| region_parameter(g.vertex_count()));
    let rd = t_division(g, t);
    let mut stats = SeparatorStats {
        t,
        regions: rd.region_count(),
        size_factor: rd.size_factor(),
        boundary_factor: rd.boundary_factor(),
        ..Default::default()
    };

    let v_b = rd.boundary_vertices(g);
    stats.boundary_vertices = v_b.len();
    let (dt_b, ops_b) = counters::measure(|| if v_b.is_empty() { Ok(None) } else { delaunay_of(ps, &v_b, opts.seed).map(Some) });
    let dt_b = dt_b?;
    let good = classify_regions(g, &rd, dt_b.as_ref());
    stats.bad_regions = good.iter().filter(|&&x| !x).count();

    let n = ps.len();
    let mut in_b = vec![false; n];
    for &v in &v_b {
        in_b[v as usize] = true;
    }
    let mut is_good = vec![false; n];
    let mut v_bad = Vec::new();
    for v in g.vertices() {
        if in_b[v as usize] {
            continue;
        }
        let r = rd.region_of(bounded_triangle_at(g, v)).expect("interior vertices have a region");
        if good[r] {
            is_good[v as usize] = true;
            stats.good_vertices += 1;
        } else {
            v_bad.push(v);
        }
    }
    stats.bad_vertices = v_bad.len();

    let patched = match &dt_b {
        Some(dt_b) => Some(patch(g, &rd, &good, dt_b)?),
        None if good[0] => Some(g.compacted()),
        None => None,
    };
    if let (Some(p), true) = (&patched, opts.certify_patch) {
        assert!(dt::is_locally_delaunay_everywhere(p), "patched triangulation is not locally Delaunay");
    }

    let (out, ops_bad) = counters::measure(|| -> Result<Triangulation> {
        match patched {
            None => delaunay_of(ps, &v_bad, opts.seed),
            Some(p) if v_bad.is_empty() => Ok(p),
            Some(p) if v_bad.len() < 3 => dt::insert_vertices(&p, &v_bad),
            Some(p) => dt::merge_dt(&p, &delaunay_of(ps, &v_bad, opts.seed)?),
        }
    });
    stats.rebuild_ops = ops_b + ops_bad;
    Ok((out?, stats))
}

fn bounded_triangle_at(g: &Triangulation, v: PointId) -> TriangleId {
    let mut h = g.vertex_edge[v as usize];
    while g.is_ghost(h / 3) {
        h = g.ccw_around_origin(h);
    }
    h / 3
}

/// Replaces, inside `dt_b`, the area covered by the interior triangles of
/// every good region with those triangles.
fn patch(g: &Triangulation, rd: &RDivision, good: &[bool], dt_b: &Triangulation) -> Result<Triangulation> {
    let slots = dt_b.triangle_ids().max().map_or(0, |m| m as usize + 1);
    let mut blocked = vec![false; 3 * slots];
    let mut seeds = Vec::new();
    let mut keep: Vec<[PointId; 3]> = Vec::new();
    for (i, r) in rd.regions.iter().enumerate() {
        if !good[i] {
            continue;
        }
        for &t in r {
            if !rd.is_boundary(t) {
                keep.push(g.triangle_vertices(t));
            }
        }
        for &t in &rd.boundary[i] {
            for h in 3 * t..3 * t + 3 {
                let u = g.twin(h) / 3;
                if rd.region_of(u) != Some(i) || rd.is_boundary(u) {
                    continue;
                }
                // Edge a -> b of a boundary triangle with an interior one
                // beyond it; in dt_b the area beyond is left of b -> a.
                let (a, b) = (g.origin(h), g.dest(h));
                let x: HalfEdge = dt_b.find_half_edge(b, a).expect("boundary triangles of good regions are in DT(V_B)");
                blocked[x as usize] = true;
                blocked[dt_b.twin(x) as usize] = true;
                seeds.push(x / 3);
            }
        }
    }
    let mut gone = vec![false; slots];
    while let Some(t) = seeds.pop() {
        if std::mem::replace(&mut gone[t as usize], true) {
            continue;
        }
        assert!(!dt_b.is_ghost(t), "patched area reaches the outer face");
        for h in 3 * t..3 * t + 3 {
            if !blocked[h as usize] {
                seeds.push(dt_b.twin(h) / 3);
            }
        }
    }
    keep.extend(dt_b.triangle_ids().filter(|&t| !gone[t as usize] && !dt_b.is_ghost(t)).map(|t| dt_b.triangle_vertices(t)));
    Triangulation::from_triangles(g.points().clone(), &keep)
}

#[cfg(test)]
mod tests;
