//! Closed forms at `c = 0`.
//!
//! For `c = 0` the map is the monomial map `(x, y) -> (xy, x)`, which acts on
//! `(log|x|, log|y|)` by the matrix `[[1, 1], [1, 0]]`. Its powers are
//! Fibonacci matrices, which gives explicit iterates and explicit descriptions
//! of the bounded sets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::{fib, BETA};
use crate::error::{Error, Result};
use crate::point::CPoint;

/// `x^p * y^q` for signed exponents, with a single division at the end.
fn monomial(x: Complex64, y: Complex64, p: i64, q: i64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let pow = |b: Complex64, e: i64| b.powu(e.unsigned_abs() as u32);
    let mut num = one;
    let mut den = one;
    for (b, e) in [(x, p), (y, q)] {
        if e > 0 {
            num *= pow(b, e);
        } else if e < 0 {
            den *= pow(b, e);
        }
    }
    num / den
}

fn fib_i(n: i64) -> Result<i64> {
    fib(n).map(i64::from).ok_or(Error::Overflow)
}

fn finite(p: CPoint) -> Result<CPoint> {
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::Overflow)
    }
}

/// `f_0^n(x, y) = (x^{F_n} y^{F_{n-1}}, x^{F_{n-1}} y^{F_{n-2}})`.
pub fn monomial_forward_c0(z: CPoint, n: usize) -> Result<CPoint> {
    if n == 0 {
        return Ok(z);
    }
    let n = n as i64;
    let (a, b, d) = (fib_i(n)?, fib_i(n - 1)?, fib_i(n - 2)?);
    finite(CPoint::new(monomial(z.x, z.y, a, b), monomial(z.x, z.y, b, d)))
}

/// `f_0^{-n}`, the inverse of the Fibonacci matrix power:
/// `A^{-n} = (-1)^n [[F_{n-2}, -F_{n-1}], [-F_{n-1}, F_n]]`.
///
/// For odd `n` this is `(y^{F_{n-1}} / x^{F_{n-2}}, x^{F_{n-1}} / y^{F_n})`,
/// for even `n` it is `(x^{F_{n-2}} / y^{F_{n-1}}, y^{F_n} / x^{F_{n-1}})`.
pub fn monomial_backward_c0(z: CPoint, n: usize) -> Result<CPoint> {
    if z.x.norm() == 0.0 || z.y.norm() == 0.0 {
        return Err(Error::InverseUndefined);
    }
    if n == 0 {
        return Ok(z);
    }
    let n = n as i64;
    let s = if n % 2 == 0 { 1 } else { -1 };
    let (a, b, d) = (fib_i(n)?, fib_i(n - 1)?, fib_i(n - 2)?);
    finite(CPoint::new(
        monomial(z.x, z.y, s * d, -s * b),
        monomial(z.x, z.y, -s * b, s * a),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleVerdict {
    Inside,
    Outside,
    /// Within the relative band `eps` of the boundary.
    Boundary,
}

/// Membership in `K+ = {|y| <= |x|^{-beta}}` at `c = 0`.
pub fn c0_kplus_oracle(z: CPoint, eps: f64) -> OracleVerdict {
    let (ax, ay) = (z.x.norm(), z.y.norm());
    if ax == 0.0 || ay == 0.0 {
        return OracleVerdict::Inside;
    }
    let t = ax.powf(-BETA);
    if ay <= t * (1.0 - eps) {
        OracleVerdict::Inside
    } else if ay >= t * (1.0 + eps) {
        OracleVerdict::Outside
    } else {
        OracleVerdict::Boundary
    }
}

/// Membership in `K- = {|y| = |x|^{1/beta}} \ {0}` at `c = 0`.
pub fn c0_kminus_oracle(z: CPoint, eps: f64) -> Result<OracleVerdict> {
    let (ax, ay) = (z.x.norm(), z.y.norm());
    if ax == 0.0 && ay == 0.0 {
        return Err(Error::OriginExcluded);
    }
    let t = ax.powf(1.0 / BETA);
    let tol = eps * t.max(1.0);
    Ok(if (ay - t).abs() <= tol {
        OracleVerdict::Inside
    } else {
        OracleVerdict::Outside
    })
}

/// `h(x, y) = (|x|, |y|)`.
pub fn modulus_projection(z: CPoint) -> (f64, f64) {
    (z.x.norm(), z.y.norm())
}

/// The real model map `(r, s) -> (rs, r)` on the closed positive quadrant.
pub fn model_map(r: f64, s: f64) -> (f64, f64) {
    (r * s, r)
}

/// Max-norm discrepancy of `h o f_0 = f_check o h` at `z`.
pub fn semiconjugacy_residual(z: CPoint) -> f64 {
    let lhs = modulus_projection(CPoint::new(z.x * z.y, z.x));
    let (r, s) = modulus_projection(z);
    let rhs = model_map(r, s);
    (lhs.0 - rhs.0).abs().max((lhs.1 - rhs.1).abs())
}
