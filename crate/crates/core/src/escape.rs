//! Escape radii, the trapping regions `V_R`, `F_R`, `G_R`, `D_R`, and
//! forward/backward escape classification.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ParamContext;
use crate::dynamics::{step, walk, Direction, OrbitStatus};
use crate::error::{Error, Result};
use crate::point::{CPoint, Point2, Scalar};
use crate::rng;
use crate::spectral::periodic_anchors;

/// Relative slack added on top of the minimal radii.
pub const RADIUS_MARGIN: f64 = 0.05;

/// Orbits landing this close (in units of machine epsilon, relative to the
/// anchor's size) to a known periodic point are treated as periodic.
pub const ANCHOR_ULPS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeRadii {
    /// Forward escape radius: orbits entering `V_{r0}` diverge.
    pub r0: f64,
    /// Backward escape radius used for `G_{r1}`.
    pub r1: f64,
    /// Radius of the bidisk `D_{r2}` with nested preimages.
    pub r2: f64,
    pub d_back: f64,
    pub d_trap: f64,
    pub margin: f64,
}

/// Smallest admissible forward radius, `max(2, sqrt(2|c|))`.
pub fn r0_bound(c: Complex64) -> f64 {
    2f64.max((2.0 * c.norm()).sqrt())
}

/// Smallest admissible backward radius for `d = 2(|c| + 1)`:
/// `R1 > d` and `|c| < R1 (d - 1) / d^2`.
pub fn r1_bound(c: Complex64) -> f64 {
    let m = c.norm();
    let d = 2.0 * (m + 1.0);
    d.max(m * d * d / (d - 1.0))
}

/// Smallest admissible radius for nested bidisks, `(2 + |c|) r1_bound`.
pub fn r2_bound(c: Complex64) -> f64 {
    (2.0 + c.norm()) * r1_bound(c)
}

pub fn escape_radii(c: Complex64) -> Result<EscapeRadii> {
    let m = c.norm();
    let mu = RADIUS_MARGIN;
    let d_back = 2.0 * (m + 1.0);
    let r0 = r0_bound(c) * (1.0 + mu);
    let r1 = (1.0 + mu) * r1_bound(c);
    let d_trap = 2.0 + m;
    let r2 = d_trap * r1;
    let lhs = r1 * (d_back - 1.0) / (d_back * d_back);
    if !(m < lhs && lhs < r1 / 2.0) {
        return Err(Error::ConstraintViolated(format!(
            "|c| < R1(d-1)/d^2 < R1/2 fails: {m} vs {lhs} vs {}",
            r1 / 2.0
        )));
    }
    if !(r1 > d_back) {
        return Err(Error::ConstraintViolated(format!("R1 = {r1} <= d = {d_back}")));
    }
    Ok(EscapeRadii {
        r0,
        r1,
        r2,
        d_back,
        d_trap,
        margin: mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionVerdict {
    /// `min(|x|, |y|) > R`.
    pub in_vr: bool,
    /// `0 < min(|x|, |y|) < 1/R` and `max(|x|, |y|) > R`.
    pub in_fr: bool,
    /// `y = 0` or `F_R`.
    pub in_gr: bool,
    /// `max(|x|, |y|) <= R`.
    pub in_dr: bool,
}

#[inline]
pub fn in_vr<T: Scalar>(z: &Point2<T>, r: f64) -> bool {
    z.min_modulus() > r
}

#[inline]
pub fn in_fr<T: Scalar>(z: &Point2<T>, r: f64) -> bool {
    let lo = z.min_modulus();
    lo > 0.0 && lo < 1.0 / r && z.norm() > r
}

#[inline]
pub fn in_gr<T: Scalar>(z: &Point2<T>, r: f64) -> bool {
    z.y.is_zero() || in_fr(z, r)
}

#[inline]
pub fn in_dr<T: Scalar>(z: &Point2<T>, r: f64) -> bool {
    z.norm() <= r
}

pub fn region_membership<T: Scalar>(z: &Point2<T>, r: f64) -> RegionVerdict {
    RegionVerdict {
        in_vr: in_vr(z, r),
        in_fr: in_fr(z, r),
        in_gr: in_gr(z, r),
        in_dr: in_dr(z, r),
    }
}

/// Reusable escape classifier for one parameter and radius.
#[derive(Debug, Clone)]
pub struct EscapeClassifier<T> {
    c: T,
    radius: f64,
    anchors: Vec<(Point2<T>, f64)>,
}

impl<T: Scalar> EscapeClassifier<T> {
    fn build(ctx: &ParamContext, radius: f64, bound: f64) -> Result<Self> {
        if !(radius > bound) {
            return Err(Error::RadiusTooSmall { radius, bound });
        }
        let anchors = periodic_anchors(ctx.c)
            .into_iter()
            .filter_map(|p| {
                let q = Point2::new(T::from_complex(p.x)?, T::from_complex(p.y)?);
                Some((q, ANCHOR_ULPS * f64::EPSILON * p.norm().max(1.0)))
            })
            .collect();
        Ok(EscapeClassifier {
            c: ctx.param::<T>()?,
            radius,
            anchors,
        })
    }

    /// Classifier for forward escape through `V_R`; needs `R > max(2, sqrt(2|c|))`.
    pub fn forward(ctx: &ParamContext, radius: f64) -> Result<Self> {
        Self::build(ctx, radius, r0_bound(ctx.c))
    }

    /// Classifier for backward escape through `G_R`; needs `R` above the
    /// minimal backward radius.
    pub fn backward(ctx: &ParamContext, radius: f64) -> Result<Self> {
        Self::build(ctx, radius, r1_bound(ctx.c))
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    #[inline]
    fn on_anchor(&self, p: &Point2<T>) -> bool {
        self.anchors.iter().any(|(a, tol)| a.dist(p) <= *tol)
    }

    fn run(&self, z: Point2<T>, budget: usize, dir: Direction, exit: impl Fn(&Point2<T>) -> bool) -> OrbitStatus {
        let mut periodic = false;
        let status = walk(self.c, z, dir, budget, |_, p| {
            if exit(p) {
                return true;
            }
            if self.on_anchor(p) {
                periodic = true;
                return true;
            }
            false
        });
        if periodic {
            OrbitStatus::Bounded
        } else {
            status
        }
    }

    /// `Escaped(n)` iff `f^n(z)` is the first iterate in `V_R` (or overflows).
    pub fn classify_forward(&self, z: Point2<T>, budget: usize) -> OrbitStatus {
        let r = self.radius;
        self.run(z, budget, Direction::Forward, |p| in_vr(p, r))
    }

    /// `Escaped(n)` iff `f^{-n}(z)` is the first backward iterate in `G_R`.
    pub fn classify_backward(&self, z: Point2<T>, budget: usize) -> OrbitStatus {
        let r = self.radius;
        self.run(z, budget, Direction::Backward, |p| in_gr(p, r))
    }
}

pub fn classify_forward<T: Scalar>(ctx: &ParamContext, z: Point2<T>, r: f64, budget: usize) -> Result<OrbitStatus> {
    Ok(EscapeClassifier::forward(ctx, r)?.classify_forward(z, budget))
}

pub fn classify_backward<T: Scalar>(ctx: &ParamContext, z: Point2<T>, r: f64, budget: usize) -> Result<OrbitStatus> {
    Ok(EscapeClassifier::backward(ctx, r)?.classify_backward(z, budget))
}

/// Where probe samples are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleDomain {
    /// The square `[-R, R]^2` of the real plane.
    Real,
    /// The bidisk `{|x| <= R, |y| <= R}` in C^2.
    Complex,
}

fn sample_point(rng: &mut rng::StreamRng, r: f64, domain: SampleDomain) -> CPoint {
    match domain {
        SampleDomain::Real => CPoint::real(rng::uniform(rng, -r, r), rng::uniform(rng, -r, r)),
        SampleDomain::Complex => {
            let o = Complex64::new(0.0, 0.0);
            Point2::new(rng::uniform_disk(rng, o, r), rng::uniform_disk(rng, o, r))
        }
    }
}

fn sample_points(n: usize, seed: u64, r: f64, domain: SampleDomain) -> Vec<CPoint> {
    rng::batches(n)
        .into_par_iter()
        .flat_map_iter(|(b, lo, hi)| {
            let mut g = rng::stream(seed, b);
            (lo..hi).map(move |_| sample_point(&mut g, r, domain)).collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingViolation {
    pub sample: usize,
    pub n: usize,
    pub point: CPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    pub direction: Direction,
    pub radius: f64,
    pub n_max: usize,
    pub samples: usize,
    /// `level_counts[k]`: samples in `D_R` whose k-th iterate is in `D_R`.
    pub level_counts: Vec<usize>,
    /// Samples that stay in `D_R` for `k = 0..=n`, indexed by `n`.
    pub survival_counts: Vec<usize>,
    pub violations: Vec<NestingViolation>,
}

impl NestingReport {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty() && self.level_counts.windows(2).all(|w| w[0] >= w[1])
    }
}

fn nested_probe(
    ctx: &ParamContext,
    r: f64,
    n_max: usize,
    samples: usize,
    seed: u64,
    domain: SampleDomain,
    direction: Direction,
) -> Result<NestingReport> {
    let bound = r2_bound(ctx.c);
    if !(r > bound) {
        return Err(Error::RadiusTooSmall { radius: r, bound });
    }
    let pts = sample_points(samples, seed, r, domain);
    let depth = n_max + 2;
    let member: Vec<Vec<bool>> = pts
        .par_iter()
        .map(|z| {
            let mut m = Vec::with_capacity(depth);
            let mut p = Some(*z);
            for _ in 0..depth {
                m.push(p.is_some_and(|q| in_dr(&q, r)));
                p = p.and_then(|q| step(ctx.c, q, direction).ok());
            }
            m
        })
        .collect();
    let mut level_counts = vec![0; depth];
    let mut survival_counts = vec![0; depth];
    let mut violations = Vec::new();
    for (i, m) in member.iter().enumerate() {
        if !m[0] {
            continue;
        }
        for k in 0..depth {
            if m[k] {
                level_counts[k] += 1;
            }
        }
        let alive = m.iter().take_while(|b| **b).count();
        for s in survival_counts.iter_mut().take(alive) {
            *s += 1;
        }
        for n in 0..=n_max {
            if m[n + 1] && !m[n] {
                violations.push(NestingViolation { sample: i, n, point: pts[i] });
            }
        }
    }
    Ok(NestingReport {
        direction,
        radius: r,
        n_max,
        samples,
        level_counts,
        survival_counts,
        violations,
    })
}

/// Samples `D_R` and checks `D ∩ f^{-(n+1)}(D) ⊂ D ∩ f^{-n}(D)` for `n <= n_max`.
pub fn nested_forward_probe(
    ctx: &ParamContext,
    r: f64,
    n_max: usize,
    samples: usize,
    seed: u64,
    domain: SampleDomain,
) -> Result<NestingReport> {
    nested_probe(ctx, r, n_max, samples, seed, domain, Direction::Forward)
}

/// Mirror of [`nested_forward_probe`] with the inverse branch: a sample whose
/// backward iterate is undefined counts as having left `D_R`.
pub fn nested_backward_probe(
    ctx: &ParamContext,
    r: f64,
    n_max: usize,
    samples: usize,
    seed: u64,
    domain: SampleDomain,
) -> Result<NestingReport> {
    nested_probe(ctx, r, n_max, samples, seed, domain, Direction::Backward)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    /// `R = r2 (1 + margin)`.
    pub radius: f64,
    /// `R^3`.
    pub bound: f64,
    pub samples: usize,
    /// Sampled points (plus the periodic anchors) bounded in both directions.
    pub k_points: usize,
    /// Largest `|x|` and `|y|` over those points.
    pub max_abs: [f64; 2],
}

impl CompactnessReport {
    pub fn within_bound(&self) -> bool {
        self.max_abs[0] <= self.bound && self.max_abs[1] <= self.bound
    }
}

/// Bounding box of points found bounded both ways, sampled from the bidisk of
/// radius `R^3` and seeded with the periodic anchors.
pub fn compactness_probe(ctx: &ParamContext, budget: usize, samples: usize, seed: u64) -> Result<CompactnessReport> {
    let radii = escape_radii(ctx.c)?;
    let radius = radii.r2 * (1.0 + radii.margin);
    let bound = radius.powi(3);
    let fwd = EscapeClassifier::<Complex64>::forward(ctx, radii.r0)?;
    let bwd = EscapeClassifier::<Complex64>::backward(ctx, radii.r1)?;
    let mut pts = sample_points(samples, seed, bound, SampleDomain::Complex);
    pts.extend(periodic_anchors(ctx.c));
    let kept: Vec<CPoint> = pts
        .into_par_iter()
        .filter(|z| {
            fwd.classify_forward(*z, budget) == OrbitStatus::Bounded
                && bwd.classify_backward(*z, budget) == OrbitStatus::Bounded
        })
        .collect();
    let max_abs = kept
        .iter()
        .fold([0.0f64, 0.0f64], |m, z| [m[0].max(z.x.norm()), m[1].max(z.y.norm())]);
    Ok(CompactnessReport {
        radius,
        bound,
        samples,
        k_points: kept.len(),
        max_abs,
    })
}
