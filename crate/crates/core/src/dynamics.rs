//! The map `f(x, y) = (xy + c, x)`, its inverse branch and orbit traces.

use serde::{Deserialize, Serialize};

use crate::context::ParamContext;
use crate::error::{Error, Result};
use crate::point::{Point2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
}

/// How an orbit trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    /// The exit predicate fired on the point with this index, or the next
    /// iterate after this index overflowed.
    Escaped(usize),
    /// The budget ran out without an exit.
    Bounded,
    /// The point with this index has `y = 0`, so it has no preimage.
    InverseUndefined(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace<T> {
    pub points: Vec<Point2<T>>,
    pub status: OrbitStatus,
    pub direction: Direction,
    pub budget: usize,
}

/// `f_c(x, y) = (xy + c, x)`.
#[inline]
pub fn forward<T: Scalar>(c: T, z: Point2<T>) -> Result<Point2<T>> {
    let w = Point2::new(z.x * z.y + c, z.x);
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Overflow)
    }
}

/// `f_c^{-1}(x, y) = (y, (x - c) / y)`.
#[inline]
pub fn inverse<T: Scalar>(c: T, z: Point2<T>) -> Result<Point2<T>> {
    if z.y.is_zero() {
        return Err(Error::InverseUndefined);
    }
    let w = Point2::new(z.y, (z.x - c) / z.y);
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Overflow)
    }
}

#[inline]
pub fn step<T: Scalar>(c: T, z: Point2<T>, direction: Direction) -> Result<Point2<T>> {
    match direction {
        Direction::Forward => forward(c, z),
        Direction::Backward => inverse(c, z),
    }
}

/// `f^n(z)` for `n >= 0`, or `f^{-|n|}(z)` for negative `n`.
pub fn iterate<T: Scalar>(c: T, mut z: Point2<T>, n: i64) -> Result<Point2<T>> {
    let dir = if n >= 0 { Direction::Forward } else { Direction::Backward };
    for _ in 0..n.unsigned_abs() {
        z = step(c, z, dir)?;
    }
    Ok(z)
}

/// Jacobian of `f` at `z`: `[[y, x], [1, 0]]`.
#[inline]
pub fn jacobian<T: Scalar>(z: Point2<T>) -> [[T; 2]; 2] {
    [[z.y, z.x], [T::from_f64(1.0), T::from_f64(0.0)]]
}

impl ParamContext {
    pub fn apply_forward<T: Scalar>(&self, z: Point2<T>) -> Result<Point2<T>> {
        forward(self.param::<T>()?, z)
    }

    pub fn apply_inverse<T: Scalar>(&self, z: Point2<T>) -> Result<Point2<T>> {
        inverse(self.param::<T>()?, z)
    }
}

/// Walks an orbit without storing it. `visit(k, p_k)` returns `true` to stop.
///
/// Points `p_0 .. p_{budget-1}` are offered to `visit`; the status mirrors
/// [`iterate_orbit`].
pub fn walk<T: Scalar>(
    c: T,
    z: Point2<T>,
    direction: Direction,
    budget: usize,
    mut visit: impl FnMut(usize, &Point2<T>) -> bool,
) -> OrbitStatus {
    let mut p = z;
    for k in 0..budget {
        if visit(k, &p) {
            return OrbitStatus::Escaped(k);
        }
        if k + 1 == budget {
            break;
        }
        p = match step(c, p, direction) {
            Ok(q) => q,
            Err(Error::InverseUndefined) => return OrbitStatus::InverseUndefined(k),
            Err(_) => return OrbitStatus::Escaped(k + 1),
        };
    }
    OrbitStatus::Bounded
}

/// Iterates up to `budget` points, testing `exit(p_k, k)` on each.
pub fn iterate_orbit<T: Scalar>(
    ctx: &ParamContext,
    z: Point2<T>,
    direction: Direction,
    budget: usize,
    exit: impl Fn(&Point2<T>, usize) -> bool,
) -> Result<OrbitTrace<T>> {
    let c = ctx.param::<T>()?;
    let mut points = Vec::with_capacity(budget.min(1 << 16));
    let status = walk(c, z, direction, budget, |k, p| {
        points.push(*p);
        exit(p, k)
    });
    Ok(OrbitTrace {
        points,
        status,
        direction,
        budget,
    })
}
