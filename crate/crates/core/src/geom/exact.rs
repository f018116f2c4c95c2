//! Big-integer evaluation of the perturbed determinants.
//!
//! Coordinates are dyadic rationals, so after scaling every coordinate of a
//! query by one common power of two they become integers. Scaling a column
//! by a positive factor does not change any determinant sign, including the
//! signs of the perturbation coefficients below.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::Point;

/// A perturbation monomial: `(row, column)` pairs with distinct rows and
/// distinct perturbed columns. Column 0 is x, 1 is y, 2 is the lift.
type Monomial = Vec<(usize, usize)>;

fn decompose(v: f64) -> (BigInt, i32) {
    if v == 0.0 {
        return (BigInt::zero(), i32::MAX);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if exp_bits == 0 { (frac, -1074) } else { (frac | 0x0010_0000_0000_0000, exp_bits - 1075) };
    (BigInt::from(mant as i64) * sign, exp)
}

/// Integer coordinates `(X, Y)` for `pts`, all scaled by the same power of two.
fn to_integers(pts: &[&Point]) -> Vec<(BigInt, BigInt)> {
    let parts: Vec<((BigInt, i32), (BigInt, i32))> = pts.iter().map(|p| (decompose(p.x), decompose(p.y))).collect();
    let min_exp = parts.iter().flat_map(|(a, b)| [a.1, b.1]).min().unwrap_or(0);
    let scale = |(m, e): &(BigInt, i32)| -> BigInt {
        if m.is_zero() {
            BigInt::zero()
        } else {
            m << ((*e - min_exp) as usize)
        }
    };
    parts.iter().map(|(a, b)| (scale(a), scale(b))).collect()
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    match n {
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut acc = BigInt::zero();
            for col in 0..n {
                if m[0][col].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, v)| v.clone()).collect()).collect();
                let term = &m[0][col] * det(&minor);
                if col % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

fn sign_of(v: &BigInt) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Rows `[1, X, Y]` (orientation) or `[1, X, Y, X²+Y²]` (lifted).
fn matrix(pts: &[&Point], lifted: bool) -> Vec<Vec<BigInt>> {
    to_integers(pts)
        .into_iter()
        .map(|(x, y)| {
            let mut row = vec![BigInt::from(1), x.clone(), y.clone()];
            if lifted {
                row.push(&x * &x + &y * &y);
            }
            row
        })
        .collect()
}

/// Exact orientation determinant `det[1 x y]`, rows in the given order.
pub fn orient_det_exact(a: &Point, b: &Point, c: &Point) -> BigInt {
    det(&matrix(&[a, b, c], false))
}

/// Exact lifted determinant `det[1 x y x²+y²]`, rows in the given order.
/// Negative iff `d` is inside the circle of a counterclockwise `abc`.
pub fn incircle_det_exact(a: &Point, b: &Point, c: &Point, d: &Point) -> BigInt {
    det(&matrix(&[a, b, c, d], true))
}

/// True when monomial `a` dominates `b` for infinitesimal eps: with
/// exponents `2^key`, the smaller exponent sum wins, which is decided by the
/// largest key in the symmetric difference.
fn more_significant(a: &Monomial, b: &Monomial) -> Ordering {
    let key = |&(r, c): &(usize, usize)| r * 3 + c;
    let ka: Vec<usize> = a.iter().map(key).collect();
    let kb: Vec<usize> = b.iter().map(key).collect();
    let top_a = ka.iter().filter(|k| !kb.contains(k)).max();
    let top_b = kb.iter().filter(|k| !ka.contains(k)).max();
    match (top_a, top_b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.cmp(y),
    }
}

fn enumerate(rows: usize, cols: usize) -> Vec<Monomial> {
    fn rec(row: usize, rows: usize, cols: usize, used: &mut Vec<bool>, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if row == rows {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        rec(row + 1, rows, cols, used, cur, out);
        for c in 0..cols {
            if !used[c] {
                used[c] = true;
                cur.push((row, c));
                rec(row + 1, rows, cols, used, cur, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, rows, cols, &mut vec![false; cols], &mut Vec::new(), &mut out);
    out.sort_by(more_significant);
    out
}

fn orient_order() -> &'static [Monomial] {
    static ORDER: OnceLock<Vec<Monomial>> = OnceLock::new();
    ORDER.get_or_init(|| enumerate(3, 2))
}

fn incircle_order() -> &'static [Monomial] {
    static ORDER: OnceLock<Vec<Monomial>> = OnceLock::new();
    ORDER.get_or_init(|| enumerate(4, 3))
}

/// Sorts `pts` by id, returning the sorted order and the permutation parity.
fn sort_by_id<'a>(pts: &[&'a Point]) -> (Vec<&'a Point>, i8) {
    let mut v: Vec<&Point> = pts.to_vec();
    let mut parity = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1].id > v[j].id {
            v.swap(j - 1, j);
            parity = -parity;
            j -= 1;
        }
    }
    (v, parity)
}

fn sos_sign(pts: &[&Point], lifted: bool) -> i8 {
    let (sorted, parity) = sort_by_id(pts);
    let base = matrix(&sorted, lifted);
    let order = if lifted { incircle_order() } else { orient_order() };
    let width = base[0].len();
    for mono in order {
        let mut m = base.clone();
        for &(row, col) in mono {
            let mut unit = vec![BigInt::zero(); width];
            unit[col + 1] = BigInt::from(1);
            m[row] = unit;
        }
        let s = sign_of(&det(&m));
        if s != 0 {
            return s * parity;
        }
    }
    unreachable!("highest-degree perturbation terms have unit coefficients")
}

/// Perturbed sign of `det[1 x y]` for an exactly collinear triple.
pub(super) fn orient_sos(a: &Point, b: &Point, c: &Point) -> i8 {
    super::counters::bump_sos();
    sos_sign(&[a, b, c], false)
}

/// Perturbed sign of `det[1 x y x²+y²]` for an exactly cocircular quadruple.
pub(super) fn incircle_sos(a: &Point, b: &Point, c: &Point, d: &Point) -> i8 {
    super::counters::bump_sos();
    sos_sign(&[a, b, c, d], true)
}

pub(super) fn centroid_orient_exact(tri: [&Point; 3], b: &Point, q: &Point) -> i8 {
    let ints = to_integers(&[tri[0], tri[1], tri[2], b, q]);
    let row = |(x, y): &(BigInt, BigInt)| vec![BigInt::from(1), x.clone(), y.clone()];
    let mut total = BigInt::zero();
    for v in &ints[..3] {
        total += det(&[row(v), row(&ints[3]), row(&ints[4])]);
    }
    sign_of(&total)
}

pub(super) fn cmp_squared_length_exact(a: &Point, b: &Point, c: &Point, d: &Point) -> Ordering {
    let ints = to_integers(&[a, b, c, d]);
    let sq = |p: &(BigInt, BigInt), q: &(BigInt, BigInt)| {
        let dx = &p.0 - &q.0;
        let dy = &p.1 - &q.1;
        &dx * &dx + &dy * &dy
    };
    sq(&ints[0], &ints[1]).cmp(&sq(&ints[2], &ints[3]))
}

#[cfg(test)]
pub(super) fn monomial_orders() -> (&'static [Monomial], &'static [Monomial]) {
    (orient_order(), incircle_order())
}
