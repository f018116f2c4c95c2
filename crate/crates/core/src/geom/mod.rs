//! Exact geometric predicates.
//!
//! Every predicate answers for a symbolically perturbed copy of the input
//! (simulation of simplicity). Point `i` is moved by
//! `(eps^(2^(3i)), eps^(2^(3i+1)))` and its paraboloid lift by
//! `eps^(2^(3i+2))`, for an infinitesimal `eps > 0`. Under this perturbation
//! no three points are collinear and no four are cocircular, so every point
//! set has exactly one Delaunay triangulation. Inputs that are already in
//! general position get the same answers as without the perturbation.
//!
//! Evaluation is staged: a floating-point filter with a static error bound,
//! then adaptive exact arithmetic, and only for exactly-degenerate inputs the
//! perturbation terms, which are computed with big integers.

pub mod counters;
mod exact;

use std::cmp::Ordering;

pub use exact::{incircle_det_exact, orient_det_exact};

/// Index of a point inside its [`PointSet`](crate::PointSet).
pub type PointId = u32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub id: PointId,
}

impl Point {
    pub fn new(x: f64, y: f64, id: PointId) -> Self {
        Point { x, y, id }
    }

    fn coord(&self) -> robust::Coord<f64> {
        robust::Coord { x: self.x, y: self.y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn reversed(self) -> Self {
        match self {
            Orientation::CounterClockwise => Orientation::Clockwise,
            Orientation::Clockwise => Orientation::CounterClockwise,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InsideOutside {
    Inside,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeomError {
    #[error("point id {0} used more than once in a predicate")]
    DuplicatePoint(PointId),
}

const EPS: f64 = f64::EPSILON * 0.5;
const CCW_ERRBOUND_A: f64 = (3.0 + 16.0 * EPS) * EPS;
const ICC_ERRBOUND_A: f64 = (10.0 + 96.0 * EPS) * EPS;

fn check_distinct(ids: &[PointId]) -> Result<(), GeomError> {
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            if ids[i] == ids[j] {
                return Err(GeomError::DuplicatePoint(ids[i]));
            }
        }
    }
    Ok(())
}

/// Orientation of the triangle `abc` in the perturbed world.
pub fn orient2d(a: &Point, b: &Point, c: &Point) -> Result<Orientation, GeomError> {
    check_distinct(&[a.id, b.id, c.id])?;
    Ok(if ccw(a, b, c) { Orientation::CounterClockwise } else { Orientation::Clockwise })
}

/// Whether `d` lies strictly inside the circle through `a`, `b`, `c`, in the
/// perturbed world. The answer does not depend on the orientation of `abc`.
pub fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> Result<InsideOutside, GeomError> {
    check_distinct(&[a.id, b.id, c.id, d.id])?;
    Ok(if in_circle(a, b, c, d) { InsideOutside::Inside } else { InsideOutside::Outside })
}

/// Perturbed comparison of x coordinates: `true` iff `a` lies left of `b`.
/// Equal abscissas are ordered the way the orientation predicate breaks
/// ties, so the two never disagree.
#[inline]
pub fn left_of(a: &Point, b: &Point) -> bool {
    a.x < b.x || (a.x == b.x && a.id > b.id)
}

/// Perturbed comparison of y coordinates: `true` iff `a` lies above `b`.
#[inline]
pub fn above(a: &Point, b: &Point) -> bool {
    a.y > b.y || (a.y == b.y && a.id < b.id)
}

/// True iff the open segments `pq` and `rs` meet in a single point interior
/// to both. Segments sharing an endpoint never cross.
pub fn segments_properly_cross(p: &Point, q: &Point, r: &Point, s: &Point) -> bool {
    if p.id == r.id || p.id == s.id || q.id == r.id || q.id == s.id {
        return false;
    }
    ccw(p, q, r) != ccw(p, q, s) && ccw(r, s, p) != ccw(r, s, q)
}

/// Floating-point orientation filter. `Some(sign)` only when the sign of the
/// exact determinant is certain.
pub fn orient_filter(a: &Point, b: &Point, c: &Point) -> Option<i8> {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let bound = CCW_ERRBOUND_A * (detleft.abs() + detright.abs());
    if det > bound {
        Some(1)
    } else if -det > bound {
        Some(-1)
    } else {
        None
    }
}

/// Floating-point filter for the incircle determinant, with the sign
/// convention `> 0` iff `d` is inside the circle of a counterclockwise `abc`.
pub fn incircle_filter(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<i8> {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;
    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;
    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift + (cdxady.abs() + adxcdy.abs()) * blift + (adxbdy.abs() + bdxady.abs()) * clift;
    let bound = ICC_ERRBOUND_A * permanent;
    if det > bound {
        Some(1)
    } else if -det > bound {
        Some(-1)
    } else {
        None
    }
}

fn signum(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign of the unperturbed orientation determinant (exact).
pub fn orient_sign_unperturbed(a: &Point, b: &Point, c: &Point) -> i8 {
    match orient_filter(a, b, c) {
        Some(s) => s,
        None => {
            counters::bump_exact();
            signum(robust::orient2d(a.coord(), b.coord(), c.coord()))
        }
    }
}

/// Perturbed orientation as a boolean: `true` iff `abc` turns left.
/// Ids must be distinct; this is only checked in debug builds.
#[inline]
pub fn ccw(a: &Point, b: &Point, c: &Point) -> bool {
    debug_assert!(a.id != b.id && b.id != c.id && a.id != c.id);
    counters::bump_orient();
    let s = orient_sign_unperturbed(a, b, c);
    let s = if s != 0 { s } else { exact::orient_sos(a, b, c) };
    s > 0
}

/// Perturbed incircle as a boolean: `true` iff `d` is strictly inside the
/// circle through `a`, `b`, `c`, whatever the orientation of `abc`.
#[inline]
pub fn in_circle(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    counters::bump_incircle();
    let lifted = match incircle_filter(a, b, c, d) {
        Some(s) => -s,
        None => {
            counters::bump_exact();
            let v = robust::incircle(a.coord(), b.coord(), c.coord(), d.coord());
            -signum(v)
        }
    };
    // `lifted` is the sign of det[1 x y x²+y²]; negative means inside for ccw abc.
    let lifted = if lifted != 0 { lifted } else { exact::incircle_sos(a, b, c, d) };
    let turn = if ccw_uncounted(a, b, c) { 1 } else { -1 };
    lifted * turn < 0
}

fn ccw_uncounted(a: &Point, b: &Point, c: &Point) -> bool {
    let s = orient_sign_unperturbed(a, b, c);
    let s = if s != 0 { s } else { exact::orient_sos(a, b, c) };
    s > 0
}

/// Sign of the orientation of `(c0, b, q)` where `c0` is the centroid of
/// `tri`. Unperturbed and exact; `0` means `q` lies on the line through
/// `c0` and `b`.
pub fn orient_from_centroid(tri: [&Point; 3], b: &Point, q: &Point) -> i8 {
    counters::bump_orient();
    let mut sum = 0.0;
    let mut bound = 0.0;
    let mut mag = 0.0;
    for v in tri {
        let detleft = (v.x - q.x) * (b.y - q.y);
        let detright = (v.y - q.y) * (b.x - q.x);
        let d = detleft - detright;
        let e = CCW_ERRBOUND_A * (detleft.abs() + detright.abs());
        sum += d;
        bound += e;
        mag += d.abs() + e;
    }
    let bound = bound * 1.01 + 4.0 * EPS * mag;
    if sum > bound {
        1
    } else if -sum > bound {
        -1
    } else {
        counters::bump_exact();
        exact::centroid_orient_exact(tri, b, q)
    }
}

/// Exact comparison of the squared lengths of segments `ab` and `cd`.
pub fn cmp_squared_length(a: &Point, b: &Point, c: &Point, d: &Point) -> Ordering {
    let l1 = (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
    let l2 = (c.x - d.x) * (c.x - d.x) + (c.y - d.y) * (c.y - d.y);
    let bound = 8.0 * EPS * (l1 + l2);
    if l1 - l2 > bound {
        Ordering::Greater
    } else if l2 - l1 > bound {
        Ordering::Less
    } else {
        exact::cmp_squared_length_exact(a, b, c, d)
    }
}
