//! Point sets, triangulations and plane straight-line graphs.

mod io;
pub(crate) mod mesh;
mod pslg;

use std::collections::HashSet;
use std::fmt;

pub use io::{read_edges, read_points, write_edges, write_points};
pub use mesh::{HalfEdge, TriangleId, Triangulation, GHOST, NONE};
pub use pslg::{build_from_edges, Pslg};

use crate::error::{Error, Result};
use crate::geom::{self, Point, PointId};

/// The input points. Point `i` has id `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    min: (f64, f64),
    max: (f64, f64),
}

impl PointSet {
    pub fn new(coords: &[(f64, f64)]) -> Result<Self> {
        let mut seen = std::collections::HashMap::with_capacity(coords.len());
        let mut points = Vec::with_capacity(coords.len());
        let mut min = (f64::INFINITY, f64::INFINITY);
        let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (i, &(x, y)) in coords.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::NonFinite(i));
            }
            // -0.0 and 0.0 are the same coordinate.
            let (x, y) = (x + 0.0, y + 0.0);
            if let Some(&j) = seen.get(&(x.to_bits(), y.to_bits())) {
                return Err(Error::DuplicatePoint(j, i as PointId));
            }
            seen.insert((x.to_bits(), y.to_bits()), i as PointId);
            min = (min.0.min(x), min.1.min(y));
            max = (max.0.max(x), max.1.max(y));
            points.push(Point::new(x, y, i as PointId));
        }
        Ok(PointSet { points, min, max })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn get(&self, id: PointId) -> &Point {
        &self.points[id as usize]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn coords(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.x, p.y)).collect()
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> ((f64, f64), (f64, f64)) {
        (self.min, self.max)
    }
}

/// Convex hull of the perturbed points, counterclockwise, starting from the
/// leftmost point.
pub fn convex_hull(ps: &PointSet) -> Vec<PointId> {
    let mut order: Vec<&Point> = ps.points().iter().collect();
    order.sort_by(|a, b| {
        if a.id == b.id {
            std::cmp::Ordering::Equal
        } else if geom::left_of(a, b) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    if order.len() < 3 {
        return order.iter().map(|p| p.id).collect();
    }
    fn chain<'a>(pts: impl Iterator<Item = &'a Point>) -> Vec<&'a Point> {
        let mut out: Vec<&Point> = Vec::new();
        for p in pts {
            while out.len() >= 2 && !geom::ccw(out[out.len() - 2], out[out.len() - 1], p) {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
        out
    }
    let mut hull = chain(order.iter().copied());
    hull.extend(chain(order.iter().rev().copied()));
    hull.iter().map(|p| p.id).collect()
}

/// Unordered vertex pair stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeKey(PointId, PointId);

impl EdgeKey {
    pub fn new(a: PointId, b: PointId) -> Self {
        if a <= b {
            EdgeKey(a, b)
        } else {
            EdgeKey(b, a)
        }
    }

    pub fn lo(self) -> PointId {
        self.0
    }

    pub fn hi(self) -> PointId {
        self.1
    }

    pub fn other(self, v: PointId) -> PointId {
        if v == self.0 {
            self.1
        } else {
            self.0
        }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// Sorted vertex triple, the identity of a triangle regardless of rotation.
pub fn triangle_key(t: [PointId; 3]) -> [PointId; 3] {
    let mut k = t;
    k.sort_unstable();
    k
}

/// Number of properly crossing pairs among `edges`, by checking all pairs.
/// Quadratic; meant for tests and small inputs.
pub fn naive_crossings(ps: &PointSet, edges: &[EdgeKey]) -> Vec<(EdgeKey, EdgeKey)> {
    let mut out = Vec::new();
    for (i, e) in edges.iter().enumerate() {
        for f in &edges[i + 1..] {
            if geom::segments_properly_cross(ps.get(e.0), ps.get(e.1), ps.get(f.0), ps.get(f.1)) {
                out.push((*e, *f));
            }
        }
    }
    out
}

/// Symmetric difference helper used by equality tests and metrics.
pub fn edge_difference(a: &[EdgeKey], b: &[EdgeKey]) -> Vec<EdgeKey> {
    let bs: HashSet<EdgeKey> = b.iter().copied().collect();
    a.iter().copied().filter(|e| !bs.contains(e)).collect()
}

/// Angular comparison of directions `a - c` and `b - c`, counterclockwise
/// starting from the positive x axis. Ties between collinear directions are
/// broken by the perturbed orientation.
pub fn angular_cmp(c: &Point, a: &Point, b: &Point) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let half = |p: &Point| -> u8 {
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        // Exact sign tests; subtraction of two floats only rounds magnitude.
        if dy > 0.0 || (dy == 0.0 && dx > 0.0) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    if a.id == b.id {
        return Ordering::Equal;
    }
    if geom::ccw(c, a, b) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests;
