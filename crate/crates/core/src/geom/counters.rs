//! Per-thread predicate counters.
//!
//! Counts are kept per thread so concurrent trials never mix their numbers.
//! Callers take a [`snapshot`] before and after a computation and subtract.

use std::cell::Cell;
use std::ops::{Add, Sub};

thread_local! {
    static ORIENT: Cell<u64> = const { Cell::new(0) };
    static INCIRCLE: Cell<u64> = const { Cell::new(0) };
    static EXACT: Cell<u64> = const { Cell::new(0) };
    static SOS: Cell<u64> = const { Cell::new(0) };
    static WALK: Cell<u64> = const { Cell::new(0) };
    static FLIPS: Cell<u64> = const { Cell::new(0) };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub orient: u64,
    pub incircle: u64,
    /// Predicate calls that fell through the floating-point filter.
    pub exact: u64,
    /// Calls resolved only by the symbolic perturbation.
    pub sos: u64,
    pub walk_steps: u64,
    pub flips: u64,
}

impl Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            orient: self.orient - rhs.orient,
            incircle: self.incircle - rhs.incircle,
            exact: self.exact - rhs.exact,
            sos: self.sos - rhs.sos,
            walk_steps: self.walk_steps - rhs.walk_steps,
            flips: self.flips - rhs.flips,
        }
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            orient: self.orient + rhs.orient,
            incircle: self.incircle + rhs.incircle,
            exact: self.exact + rhs.exact,
            sos: self.sos + rhs.sos,
            walk_steps: self.walk_steps + rhs.walk_steps,
            flips: self.flips + rhs.flips,
        }
    }
}

pub fn snapshot() -> OpCounts {
    OpCounts {
        orient: ORIENT.with(Cell::get),
        incircle: INCIRCLE.with(Cell::get),
        exact: EXACT.with(Cell::get),
        sos: SOS.with(Cell::get),
        walk_steps: WALK.with(Cell::get),
        flips: FLIPS.with(Cell::get),
    }
}

/// Runs `f` and returns its result together with the operations it used.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, OpCounts) {
    let before = snapshot();
    let out = f();
    (out, snapshot() - before)
}

#[inline]
fn bump(c: &'static std::thread::LocalKey<Cell<u64>>) {
    c.with(|v| v.set(v.get() + 1));
}

#[inline]
pub(crate) fn bump_orient() {
    bump(&ORIENT);
}

#[inline]
pub(crate) fn bump_incircle() {
    bump(&INCIRCLE);
}

#[inline]
pub(crate) fn bump_exact() {
    bump(&EXACT);
}

#[inline]
pub(crate) fn bump_sos() {
    bump(&SOS);
}

#[inline]
pub(crate) fn bump_walk() {
    bump(&WALK);
}

#[inline]
pub(crate) fn bump_flip() {
    bump(&FLIPS);
}
