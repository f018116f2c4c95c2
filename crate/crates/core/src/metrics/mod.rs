//! Closeness measures between a predicted triangulation and the Delaunay
//! triangulation of the same points.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dt::{self, segment_crossings};
use crate::error::{Error, Result};
use crate::geom::{self, PointId};
use crate::tri::{EdgeKey, PointSet, Triangulation, GHOST};

/// All measures for one prediction. `flip_upper` is the number of flips
/// Lawson's procedure needs from the prediction, an upper bound on the flip
/// distance; it is absent for predictions that are not plane triangulations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClosenessReport {
    pub n: usize,
    pub d: u64,
    pub d_local: u64,
    pub d_cross_total: u64,
    pub d_cross_max: u64,
    pub d_vio_total: u64,
    pub d_vio_max: u64,
    pub flip_upper: Option<u64>,
}

impl ClosenessReport {
    pub const CSV_HEADER: &'static str = "n,D,D_local,D_cross,d_cross,D_vio,d_vio,flip_upper,seed";

    pub fn csv_row(&self, seed: u64) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.d_local,
            self.d_cross_total,
            self.d_cross_max,
            self.d_vio_total,
            self.d_vio_max,
            self.flip_upper.map(|f| f.to_string()).unwrap_or_default(),
            seed
        )
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0
            && self.d_local == 0
            && self.d_cross_total == 0
            && self.d_cross_max == 0
            && self.d_vio_total == 0
            && self.d_vio_max == 0
            && self.flip_upper.unwrap_or(0) == 0
    }
}

fn same_vertices(g: &Triangulation, dt: &Triangulation) -> Result<()> {
    let same_points = Arc::ptr_eq(g.points(), dt.points()) || g.points() == dt.points();
    if !same_points || g.vertex_count() != dt.vertex_count() || g.vertices().any(|v| !dt.contains_vertex(v)) {
        return Err(Error::VertexMismatch);
    }
    Ok(())
}

/// Number of edges of `g` that are not edges of `dt`.
pub fn metric_d(g: &Triangulation, dt: &Triangulation) -> Result<u64> {
    same_vertices(g, dt)?;
    let d = g.edges().filter(|&e| !dt.has_edge(e)).count() as u64;
    debug_assert_eq!(d, dt.edges().filter(|&e| !g.has_edge(e)).count() as u64);
    Ok(d)
}

/// Number of edges in `edges` missing from `dt`, for predictions given as
/// plain edge lists.
pub fn metric_d_edges(edges: &[EdgeKey], dt: &Triangulation) -> u64 {
    edges.iter().filter(|&&e| !dt.has_edge(e)).count() as u64
}

/// Number of interior edges of `g` that are not locally Delaunay.
pub fn metric_d_local(g: &Triangulation) -> u64 {
    g.edge_half_edges().filter(|&h| !g.is_locally_delaunay_half_edge(h)).count() as u64
}

/// Same count for a triangle list, pairing triangles across shared edges.
/// Works for combinatorial triangulations that may self-cross.
pub fn metric_d_local_triangles(ps: &PointSet, triangles: &[[PointId; 3]]) -> u64 {
    let mut apex: HashMap<EdgeKey, Vec<PointId>> = HashMap::with_capacity(3 * triangles.len());
    for &[a, b, c] in triangles {
        for (u, v, w) in [(a, b, c), (b, c, a), (c, a, b)] {
            apex.entry(EdgeKey::new(u, v)).or_default().push(w);
        }
    }
    let mut bad = 0;
    for (e, w) in apex {
        if let [x, y] = w[..] {
            let (a, b) = (ps.get(e.lo()), ps.get(e.hi()));
            let (px, py) = (ps.get(x), ps.get(y));
            // Folded pairs have both apexes on one side, where the two
            // tests differ.
            if geom::in_circle(a, b, px, py) || geom::in_circle(a, b, py, px) {
                bad += 1;
            }
        }
    }
    bad
}

/// Total and per-edge maximum number of proper crossings between `edges`
/// and the edges of `dt`, by walking each segment through `dt`.
pub fn metric_crossings(edges: &[EdgeKey], dt: &Triangulation) -> (u64, u64) {
    let mut total = 0;
    let mut max = 0;
    for &e in edges {
        let c = segment_crossings(dt, e.lo(), e.hi()) as u64;
        total += c;
        max = max.max(c);
    }
    (total, max)
}

/// Quadratic reference for [`metric_crossings`].
pub fn naive_crossings(ps: &PointSet, edges: &[EdgeKey], dt_edges: &[EdgeKey]) -> (u64, u64) {
    let mut total = 0;
    let mut max = 0;
    for e in edges {
        let (a, b) = (ps.get(e.lo()), ps.get(e.hi()));
        let c = dt_edges.iter().filter(|f| geom::segments_properly_cross(a, b, ps.get(f.lo()), ps.get(f.hi()))).count() as u64;
        total += c;
        max = max.max(c);
    }
    (total, max)
}

/// Number of points strictly inside the circumcircle of each triangle.
/// Returns the total and the maximum over triangles.
pub fn metric_violations(ps: &PointSet, triangles: &[[PointId; 3]]) -> (u64, u64) {
    let grid = PointGrid::new(ps);
    let mut total = 0;
    let mut max = 0;
    for &t in triangles {
        let c = grid.count_inside(ps, t);
        total += c;
        max = max.max(c);
    }
    (total, max)
}

/// Reference for [`metric_violations`]: every point against every triangle.
pub fn naive_violations(ps: &PointSet, triangles: &[[PointId; 3]]) -> (u64, u64) {
    let mut total = 0;
    let mut max = 0;
    for &[a, b, c] in triangles {
        let (pa, pb, pc) = (ps.get(a), ps.get(b), ps.get(c));
        let k = ps.points().iter().filter(|p| p.id != a && p.id != b && p.id != c && geom::in_circle(pa, pb, pc, p)).count() as u64;
        total += k;
        max = max.max(k);
    }
    (total, max)
}

/// Which triangles the violation tally runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ViolationBasis {
    /// Triangles of the prediction.
    #[default]
    Prediction,
    /// Triangles of the Delaunay triangulation (always zero for the points
    /// of the set itself; kept for comparison).
    Delaunay,
}

/// Every measure at once. `dt` must be the Delaunay triangulation of the
/// same points.
pub fn full_report(g: &Triangulation, dt: &Triangulation) -> Result<ClosenessReport> {
    full_report_with(g, dt, ViolationBasis::Prediction)
}

pub fn full_report_with(g: &Triangulation, dt: &Triangulation, basis: ViolationBasis) -> Result<ClosenessReport> {
    let d = metric_d(g, dt)?;
    let edges: Vec<EdgeKey> = g.edges().filter(|&e| !dt.has_edge(e)).collect();
    let (d_cross_total, d_cross_max) = metric_crossings(&edges, dt);
    let tris: Vec<[PointId; 3]> = match basis {
        ViolationBasis::Prediction => g.triangles().collect(),
        ViolationBasis::Delaunay => dt.triangles().collect(),
    };
    let (d_vio_total, d_vio_max) = metric_violations(g.points(), &tris);
    let (_, flips) = dt::greedy_legalize(g);
    Ok(ClosenessReport {
        n: g.vertex_count(),
        d,
        d_local: metric_d_local(g),
        d_cross_total,
        d_cross_max,
        d_vio_total,
        d_vio_max,
        flip_upper: Some(flips),
    })
}

/// Report for a prediction given as edges and triangles that may cross
/// itself. No flip bound is computed.
pub fn combinatorial_report(ps: &PointSet, edges: &[EdgeKey], triangles: &[[PointId; 3]], dt: &Triangulation) -> ClosenessReport {
    let missing: Vec<EdgeKey> = edges.iter().copied().filter(|&e| !dt.has_edge(e)).collect();
    let (d_cross_total, d_cross_max) = metric_crossings(&missing, dt);
    let (d_vio_total, d_vio_max) = metric_violations(ps, triangles);
    ClosenessReport {
        n: ps.len(),
        d: missing.len() as u64,
        d_local: metric_d_local_triangles(ps, triangles),
        d_cross_total,
        d_cross_max,
        d_vio_total,
        d_vio_max,
        flip_upper: None,
    }
}

/// A circle bound property: for every triangle `q q2 q3` of `g` and each of
/// its vertices `q`, the number of Delaunay edges at `q` that cross the
/// opposite side `q2 q3` is at most `d_vio`. Returns the first violation as
/// `(triangle, vertex, count)`.
pub fn circle0_witness(g: &Triangulation, dt: &Triangulation, d_vio: u64) -> Option<([PointId; 3], PointId, u64)> {
    let ps = g.points();
    for t in g.triangles() {
        for k in 0..3 {
            let (q, a, b) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let (pa, pb) = (ps.get(a), ps.get(b));
            let count = dt
                .vertex_ring(q)
                .into_iter()
                .filter(|&w| w != a && w != b && w != GHOST)
                .filter(|&w| geom::segments_properly_cross(ps.get(q), ps.get(w), pa, pb))
                .count() as u64;
            if count > d_vio {
                return Some((t, q, count));
            }
        }
    }
    None
}

/// Uniform bucket grid over the points for circumcircle range queries.
pub(crate) struct PointGrid {
    x0: f64,
    y0: f64,
    cell: f64,
    side: usize,
    start: Vec<u32>,
    ids: Vec<PointId>,
    diag: f64,
}

impl PointGrid {
    pub(crate) fn new(ps: &PointSet) -> Self {
        let ((x0, y0), (x1, y1)) = ps.bbox();
        let n = ps.len().max(1);
        let side = ((n as f64).sqrt().ceil() as usize).clamp(1, 4096);
        let extent = (x1 - x0).max(y1 - y0);
        let cell = if extent > 0.0 { extent / side as f64 } else { 1.0 };
        let key = |x: f64, y: f64| -> usize {
            let cx = (((x - x0) / cell) as usize).min(side - 1);
            let cy = (((y - y0) / cell) as usize).min(side - 1);
            cy * side + cx
        };
        let mut count = vec![0u32; side * side + 1];
        for p in ps.points() {
            count[key(p.x, p.y) + 1] += 1;
        }
        for i in 1..count.len() {
            count[i] += count[i - 1];
        }
        let mut fill = count.clone();
        let mut ids = vec![0; ps.len()];
        for p in ps.points() {
            let k = key(p.x, p.y);
            ids[fill[k] as usize] = p.id;
            fill[k] += 1;
        }
        let diag = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
        PointGrid { x0, y0, cell, side, start: count, ids, diag }
    }

    fn count_inside(&self, ps: &PointSet, t: [PointId; 3]) -> u64 {
        let mut k = 0;
        self.for_each_inside(ps, t, |_| k += 1);
        k
    }

    /// Calls `f` on every point strictly inside the circumcircle of `t`.
    pub(crate) fn for_each_inside(&self, ps: &PointSet, t: [PointId; 3], mut f: impl FnMut(PointId)) {
        let [a, b, c] = t;
        let (pa, pb, pc) = (ps.get(a), ps.get(b), ps.get(c));
        let mut visit = |id: PointId| {
            if id != a && id != b && id != c && geom::in_circle(pa, pb, pc, ps.get(id)) {
                f(id);
            }
        };
        let circle = circumcircle(pa.x, pa.y, pb.x, pb.y, pc.x, pc.y).filter(|c| c.2 <= self.diag);
        let Some((cx, cy, r, margin)) = circle else {
            self.ids.iter().for_each(|&id| visit(id));
            return;
        };
        let reach = r + margin;
        let lo = |v: f64, o: f64| (((v - reach - o) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        let hi = |v: f64, o: f64| (((v + reach - o) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        let (i0, i1) = (lo(cx, self.x0), hi(cx, self.x0));
        let (j0, j1) = (lo(cy, self.y0), hi(cy, self.y0));
        for j in j0..=j1 {
            let row = j * self.side;
            let (s, e) = (self.start[row + i0] as usize, self.start[row + i1 + 1] as usize);
            self.ids[s..e].iter().for_each(|&id| visit(id));
        }
    }
}

/// Circumcenter and radius in floating point, with an error margin that
/// covers rounding. `None` for triangles too flat to trust.
fn circumcircle(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64) -> Option<(f64, f64, f64, f64)> {
    let (bx, by, cx, cy) = (bx - ax, by - ay, cx - ax, cy - ay);
    let det = 2.0 * (bx * cy - by * cx);
    let mag = 2.0 * ((bx * cy).abs() + (by * cx).abs());
    let rel = 8.0 * f64::EPSILON * mag / det.abs();
    if !rel.is_finite() || rel > 1e-6 {
        return None;
    }
    let (b2, c2) = (bx * bx + by * by, cx * cx + cy * cy);
    let ux = (cy * b2 - by * c2) / det;
    let uy = (bx * c2 - cx * b2) / det;
    let r = (ux * ux + uy * uy).sqrt();
    let scale = ux.abs() + uy.abs() + r + (ax.abs() + ay.abs()) * f64::EPSILON;
    let margin = 16.0 * (rel + f64::EPSILON) * scale + f64::MIN_POSITIVE;
    Some((ax + ux, ay + uy, r, margin))
}

#[cfg(test)]
mod tests;
