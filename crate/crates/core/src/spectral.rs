//! Fixed points, their multipliers, the 3-cycle through `(-1, -1)`, and a
//! numerical search for 2-cycles.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ParamContext;
use crate::dynamics::{forward, jacobian};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2};
use crate::point::{CPoint, Point2};

/// Modulus tolerance for attracting / repelling decisions.
pub const KIND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedKind {
    Attracting,
    Repelling,
    Saddle,
    Indifferent,
    Degenerate,
}

/// Kind of a fixed point from the moduli of its two multipliers.
pub fn kind_from_moduli(m: [f64; 2], tol: f64) -> FixedKind {
    let below = |v: f64| v < 1.0 - tol;
    let above = |v: f64| v > 1.0 + tol;
    match (m[0], m[1]) {
        (a, b) if below(a) && below(b) => FixedKind::Attracting,
        (a, b) if above(a) && above(b) => FixedKind::Repelling,
        (a, b) if (below(a) && above(b)) || (above(a) && below(b)) => FixedKind::Saddle,
        _ => FixedKind::Indifferent,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointInfo {
    /// Common value `a` of both coordinates.
    pub a: Complex64,
    /// Roots of `t^2 - a t - a`, ordered `[(a - s)/2, (a + s)/2]`.
    pub eigenvalues: [Complex64; 2],
    pub kind: FixedKind,
}

impl FixedPointInfo {
    pub fn point(&self) -> CPoint {
        Point2::new(self.a, self.a)
    }

    pub fn moduli(&self) -> [f64; 2] {
        [self.eigenvalues[0].norm(), self.eigenvalues[1].norm()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointStatus {
    Distinct,
    /// `1 - 4c = 0`: the two fixed points coincide.
    Degenerate,
    /// Real parameter above `1/4`: both fixed points are non-real.
    NonReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSet {
    /// `a_1 = (1 - sqrt(1 - 4c)) / 2`.
    pub alpha: FixedPointInfo,
    /// `a_2 = (1 + sqrt(1 - 4c)) / 2`.
    pub theta: FixedPointInfo,
    pub status: FixedPointStatus,
}

/// `(a_1, a_2)` with `a_1 a_2 = c`; `a_1` is computed as `c / a_2` to avoid
/// cancellation for small `c`.
pub fn fixed_values(c: Complex64) -> (Complex64, Complex64) {
    let s = (Complex64::new(1.0, 0.0) - 4.0 * c).sqrt();
    let a2 = (1.0 + s) / 2.0;
    (c / a2, a2)
}

fn is_degenerate(c: Complex64) -> bool {
    (Complex64::new(1.0, 0.0) - 4.0 * c).norm() <= 4.0 * f64::EPSILON
}

fn fixed_info(a: Complex64, degenerate: bool) -> FixedPointInfo {
    let eigenvalues = linalg::quadratic_roots(a, -a);
    let kind = if degenerate {
        FixedKind::Degenerate
    } else {
        kind_from_moduli([eigenvalues[0].norm(), eigenvalues[1].norm()], KIND_TOL)
    };
    FixedPointInfo { a, eigenvalues, kind }
}

pub fn fixed_points(ctx: &ParamContext) -> FixedPointSet {
    let (a1, a2) = fixed_values(ctx.c);
    let degenerate = is_degenerate(ctx.c);
    let status = if degenerate {
        FixedPointStatus::Degenerate
    } else if ctx.is_real && ctx.c.re > 0.25 {
        FixedPointStatus::NonReal
    } else {
        FixedPointStatus::Distinct
    };
    FixedPointSet {
        alpha: fixed_info(a1, degenerate),
        theta: fixed_info(a2, degenerate),
        status,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParameterClass {
    Pair { alpha: FixedKind, theta: FixedKind },
    Degenerate,
    NonReal,
}

/// Kinds of the two fixed points over the real parameter line.
pub fn classify_parameter(c: f64) -> ParameterClass {
    use FixedKind::*;
    if c < -2.0 {
        ParameterClass::Pair { alpha: Repelling, theta: Saddle }
    } else if c == -2.0 {
        ParameterClass::Pair { alpha: Indifferent, theta: Saddle }
    } else if c < 0.25 {
        ParameterClass::Pair { alpha: Attracting, theta: Saddle }
    } else if c == 0.25 {
        ParameterClass::Degenerate
    } else {
        ParameterClass::NonReal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseFixedInfo {
    pub a1: f64,
    /// Multipliers of the inverse branch at `(a_1, a_1)`:
    /// `(-1 -+ sqrt(1 + 4/a_1)) / 2`.
    pub eigenvalues: [Complex64; 2],
    /// `|alpha_1 alpha_2| = -1/a_1`.
    pub product_modulus: f64,
    pub attracting: bool,
}

/// Multipliers of `f^{-1}` at the fixed point `(a_1, a_1)`.
pub fn inverse_fixed_classification(c: f64) -> Result<InverseFixedInfo> {
    if !(c < 0.25) {
        return Err(Error::ParameterOutOfRange {
            what: "c",
            value: c,
            range: "c < 1/4",
        });
    }
    let (a1, _) = fixed_values(Complex64::new(c, 0.0));
    let a1 = a1.re;
    if a1 == 0.0 {
        return Err(Error::DivisionByZero);
    }
    // inverse Jacobian [[0, 1], [1/a, -1]]: t^2 + t - 1/a
    let eigenvalues = linalg::quadratic_roots(Complex64::new(-1.0, 0.0), Complex64::new(-1.0 / a1, 0.0));
    let attracting = eigenvalues.iter().all(|l| l.norm() < 1.0 - KIND_TOL);
    Ok(InverseFixedInfo {
        a1,
        eigenvalues,
        product_modulus: (eigenvalues[0] * eigenvalues[1]).norm(),
        attracting,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleInfo {
    /// `p, f(p), f^2(p)` with `p = (-1, -1)`.
    pub points: [CPoint; 3],
    /// `|f^3(p) - p|` in the max norm, computed by iterating the map.
    pub closure: f64,
    /// `Df(f^2 p) Df(f p) Df(p)`.
    pub multiplier: Mat2,
    pub eigenvalues: [Complex64; 2],
    pub det: Complex64,
    /// `prod(-x_i)` over the cycle, which the determinant must equal.
    pub expected_det: Complex64,
}

pub fn cycle_points(c: Complex64) -> [CPoint; 3] {
    let one = Complex64::new(1.0, 0.0);
    [
        Point2::new(-one, -one),
        Point2::new(one + c, -one),
        Point2::new(-one, one + c),
    ]
}

/// Multiplier matrix of `f^3` starting at `base`, using the given orbit.
pub fn orbit_multiplier(orbit: &[CPoint]) -> Mat2 {
    let mut m = linalg::from_real([[1.0, 0.0], [0.0, 1.0]]);
    for p in orbit {
        m = linalg::mat_mul(&jacobian(*p), &m);
    }
    m
}

pub fn three_cycle(ctx: &ParamContext) -> Result<CycleInfo> {
    let points = cycle_points(ctx.c);
    let mut z = points[0];
    for _ in 0..3 {
        z = forward(ctx.c, z)?;
    }
    let multiplier = orbit_multiplier(&points);
    let expected_det = points.iter().fold(Complex64::new(1.0, 0.0), |acc, p| acc * -p.x);
    Ok(CycleInfo {
        points,
        closure: z.dist(&points[0]),
        multiplier,
        eigenvalues: linalg::eigenvalues(&multiplier),
        det: linalg::det(&multiplier),
        expected_det,
    })
}

/// Fixed points and the 3-cycle, the periodic orbits every classifier knows about.
pub fn periodic_anchors(c: Complex64) -> Vec<CPoint> {
    let (a1, a2) = fixed_values(c);
    let mut v = vec![Point2::new(a1, a1), Point2::new(a2, a2)];
    v.extend(cycle_points(c));
    v
}

pub const NEWTON_MAX_STEPS: usize = 50;
pub const NEWTON_STEP_TOL: f64 = 1e-12;
pub const ROOT_DEDUP_TOL: f64 = 1e-8;
pub const FIXED_MATCH_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Period2Certificate {
    pub seeds: usize,
    pub converged: usize,
    /// Distinct roots of `f^2(z) = z`, lexicographically sorted.
    pub roots: Vec<CPoint>,
    /// Roots farther than `FIXED_MATCH_TOL` from both fixed points.
    pub non_fixed: Vec<CPoint>,
}

impl Period2Certificate {
    pub fn is_empty(&self) -> bool {
        self.non_fixed.is_empty()
    }
}

fn newton_period2(c: Complex64, mut z: CPoint) -> Option<CPoint> {
    let one = Complex64::new(1.0, 0.0);
    for _ in 0..NEWTON_MAX_STEPS {
        let w = forward(c, z).ok()?;
        let w2 = forward(c, w).ok()?;
        let g = [w2.x - z.x, w2.y - z.y];
        let mut j = linalg::mat_mul(&jacobian(w), &jacobian(z));
        j[0][0] -= one;
        j[1][1] -= one;
        let d = linalg::det(&j);
        if d.norm() == 0.0 {
            return None;
        }
        let dx = (j[1][1] * g[0] - j[0][1] * g[1]) / d;
        let dy = (j[0][0] * g[1] - j[1][0] * g[0]) / d;
        z = Point2::new(z.x - dx, z.y - dy);
        if !z.is_finite() {
            return None;
        }
        if dx.norm().max(dy.norm()) < NEWTON_STEP_TOL {
            return Some(z);
        }
    }
    None
}

fn lex_key(p: &CPoint) -> [f64; 4] {
    [p.x.re, p.x.im, p.y.re, p.y.im]
}

/// Newton search for solutions of `f^2(z) = z` from a `grid_n x grid_n` grid
/// of real seeds over `[x0, x1] x [y0, y1]`. Every root should be a fixed
/// point; any other root is reported in `non_fixed`.
pub fn period2_certificate(ctx: &ParamContext, window: [f64; 4], grid_n: usize) -> Period2Certificate {
    let [x0, x1, y0, y1] = window;
    let lerp = |a: f64, b: f64, i: usize| {
        if grid_n <= 1 {
            (a + b) / 2.0
        } else {
            a + (b - a) * i as f64 / (grid_n - 1) as f64
        }
    };
    let found: Vec<CPoint> = (0..grid_n * grid_n)
        .into_par_iter()
        .filter_map(|k| {
            let z = CPoint::real(lerp(x0, x1, k % grid_n), lerp(y0, y1, k / grid_n));
            newton_period2(ctx.c, z)
        })
        .collect();
    let converged = found.len();
    let mut sorted = found;
    sorted.sort_by(|a, b| lex_key(a).partial_cmp(&lex_key(b)).unwrap());
    let mut roots: Vec<CPoint> = Vec::new();
    for p in sorted {
        if roots.iter().all(|q| q.dist(&p) >= ROOT_DEDUP_TOL) {
            roots.push(p);
        }
    }
    let (a1, a2) = fixed_values(ctx.c);
    let fixed = [Point2::new(a1, a1), Point2::new(a2, a2)];
    let non_fixed = roots
        .iter()
        .filter(|r| fixed.iter().all(|f| f.dist(r) >= FIXED_MATCH_TOL))
        .copied()
        .collect();
    Period2Certificate {
        seeds: grid_n * grid_n,
        converged,
        roots,
        non_fixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < tol
    }

    #[test]
    fn fixed_points_at_c_021() {
        let s = fixed_points(&ParamContext::real(0.21));
        assert!(close(s.alpha.a, 0.3, 1e-12));
        assert!(close(s.theta.a, 0.7, 1e-12));
        assert_eq!(s.theta.kind, FixedKind::Saddle);
        assert_eq!(s.alpha.kind, FixedKind::Attracting);
        // roots of t^2 - 0.7 t - 0.7
        let disc = (0.49f64 + 2.8).sqrt();
        assert!(close(s.theta.eigenvalues[0], (0.7 - disc) / 2.0, 1e-12));
        assert!(close(s.theta.eigenvalues[1], (0.7 + disc) / 2.0, 1e-12));
    }

    #[test]
    fn boundary_parameters() {
        let s = fixed_points(&ParamContext::real(-2.0));
        assert_eq!(s.alpha.kind, FixedKind::Indifferent);
        let third = 2.0 * std::f64::consts::PI / 3.0;
        let mut args: Vec<f64> = s.alpha.eigenvalues.iter().map(|l| l.arg()).collect();
        args.sort_by(f64::total_cmp);
        assert!((args[0] + third).abs() < 1e-9 && (args[1] - third).abs() < 1e-9);

        let s = fixed_points(&ParamContext::real(0.25));
        assert_eq!(s.status, FixedPointStatus::Degenerate);
        assert!(close(s.alpha.a, 0.5, 1e-15));
        assert!(close(s.alpha.eigenvalues[0], -0.5, 1e-9));
        assert!(close(s.alpha.eigenvalues[1], 1.0, 1e-9));
        assert_eq!(classify_parameter(0.25), ParameterClass::Degenerate);
        assert_eq!(fixed_points(&ParamContext::real(0.3)).status, FixedPointStatus::NonReal);
    }

    #[test]
    fn inverse_multipliers() {
        let info = inverse_fixed_classification(-3.0).unwrap();
        assert!(info.attracting);
        assert!((info.product_modulus - 0.76759).abs() < 1e-5);
        assert!((info.product_modulus + 1.0 / info.a1).abs() < 1e-14);
        let edge = inverse_fixed_classification(-2.0).unwrap();
        assert!(!edge.attracting);
        assert!(edge.eigenvalues.iter().all(|l| (l.norm() - 1.0).abs() < 1e-12));
        assert_eq!(inverse_fixed_classification(0.0), Err(Error::DivisionByZero));
        assert!(inverse_fixed_classification(0.3).is_err());
    }

    #[test]
    fn cycle_at_zero() {
        let info = three_cycle(&ParamContext::real(0.0)).unwrap();
        assert_eq!(info.closure, 0.0);
        let m = info.multiplier.map(|r| r.map(|v| v.re));
        assert_eq!(m, [[3.0, 2.0], [2.0, 1.0]]);
        let r5 = 5f64.sqrt();
        assert!(close(info.eigenvalues[0], 2.0 - r5, 1e-12));
        assert!(close(info.eigenvalues[1], 2.0 + r5, 1e-12));
        assert!((info.det - info.expected_det).norm() < 1e-15);
    }

    #[test]
    fn no_two_cycles() {
        for c in [0.2, -3.0] {
            let cert = period2_certificate(&ParamContext::real(c), [-3.0, 3.0, -3.0, 3.0], 21);
            assert!(cert.converged > 0);
            assert!(cert.is_empty(), "{:?}", cert.non_fixed);
        }
    }
}
