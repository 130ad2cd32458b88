//! Saddle frames, traced stable and unstable manifolds of `θ` and of the
//! 3-cycle, and sampling checks of the decompositions of `K+` and `K-` for
//! `0 < c < 1/4`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ParamContext;
use crate::dynamics::{forward, inverse, OrbitStatus};
use crate::error::{Error, Result};
use crate::escape::{escape_radii, EscapeClassifier};
use crate::grid::PixelGrid;
use crate::linalg::{quadratic_roots, real_eigenvector};
use crate::partition::{BackwardLimitClass, LimitClass, RealPartition, CONFIRM_STEPS};
use crate::point::RPoint;
use crate::rng;
use crate::spectral::{cycle_points, fixed_values};

/// Moduli closer than this to 1 do not count as hyperbolic.
pub const SADDLE_TOL: f64 = 1e-9;
pub const DEFAULT_ARC_TOL: f64 = 1e-3;
/// Stable branches stop once `|y|` drops below this.
pub const SINGULAR_BAND: f64 = 1e-9;
/// Largest `error_growth * EPSILON` at which a traced vertex is still
/// iterated back to its seed.
pub const CONDITION_LIMIT: f64 = 1e-6;
/// Distance of the four interior probes from a grid point.
pub const PROBE_OFFSET: f64 = 1e-4;
/// Consecutive period multiples a boundary orbit must spend near its target.
pub const APPROACH_REPEATS: usize = 3;
const MAX_VERTICES: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SaddleBase {
    Theta,
    /// Cycle point `p_{j+1}`: `p1 = (-1, -1)`, `p2 = f(p1)`, `p3 = f(p2)`.
    Cycle(u8),
}

impl SaddleBase {
    pub const ALL: [SaddleBase; 4] = [SaddleBase::Theta, SaddleBase::Cycle(0), SaddleBase::Cycle(1), SaddleBase::Cycle(2)];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "theta" => Ok(SaddleBase::Theta),
            "p1" => Ok(SaddleBase::Cycle(0)),
            "p2" => Ok(SaddleBase::Cycle(1)),
            "p3" => Ok(SaddleBase::Cycle(2)),
            _ => Err(Error::InvalidSpec(format!("unknown base point '{s}' (theta, p1, p2, p3)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SaddleBase::Theta => "theta",
            SaddleBase::Cycle(0) => "p1",
            SaddleBase::Cycle(1) => "p2",
            SaddleBase::Cycle(_) => "p3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleFrame {
    pub c: f64,
    pub kind: SaddleBase,
    pub base: RPoint,
    pub period: usize,
    /// Jacobian of `f^period` at `base`.
    pub jacobian: [[f64; 2]; 2],
    pub stable_dir: [f64; 2],
    pub unstable_dir: [f64; 2],
    pub stable_mult: f64,
    pub unstable_mult: f64,
}

impl SaddleFrame {
    /// `max |J v - mu v|` over both eigenpairs.
    pub fn residual(&self) -> f64 {
        let j = &self.jacobian;
        [(self.stable_dir, self.stable_mult), (self.unstable_dir, self.unstable_mult)]
            .iter()
            .map(|(v, mu)| {
                let a = j[0][0] * v[0] + j[0][1] * v[1] - mu * v[0];
                let b = j[1][0] * v[0] + j[1][1] * v[1] - mu * v[1];
                a.abs().max(b.abs())
            })
            .fold(0.0, f64::max)
    }
}

fn real_orbit(c: f64, kind: SaddleBase) -> Vec<RPoint> {
    match kind {
        SaddleBase::Theta => {
            let a2 = fixed_values(Complex64::new(c, 0.0)).1.re;
            vec![RPoint::new(a2, a2)]
        }
        SaddleBase::Cycle(j) => {
            let pts = cycle_points(Complex64::new(c, 0.0));
            (0..3).map(|k| pts[(j as usize + k) % 3].as_real().unwrap()).collect()
        }
    }
}

pub fn saddle_frame(ctx: &ParamContext, kind: SaddleBase) -> Result<SaddleFrame> {
    let c = ctx.real_c()?;
    if c > 0.25 {
        return Err(Error::ParameterOutOfRange { what: "c", value: c, range: "c <= 1/4 for a real theta" });
    }
    let orbit = real_orbit(c, kind);
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    for p in &orbit {
        let j = [[p.y, p.x], [1.0, 0.0]];
        m = [
            [j[0][0] * m[0][0] + j[0][1] * m[1][0], j[0][0] * m[0][1] + j[0][1] * m[1][1]],
            [j[1][0] * m[0][0] + j[1][1] * m[1][0], j[1][0] * m[0][1] + j[1][1] * m[1][1]],
        ];
    }
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let ev = quadratic_roots(Complex64::new(tr, 0.0), Complex64::new(det, 0.0));
    let mut moduli = [ev[0].norm(), ev[1].norm()];
    moduli.sort_by(f64::total_cmp);
    if ev.iter().any(|e| e.im != 0.0) || !(moduli[0] < 1.0 - SADDLE_TOL && moduli[1] > 1.0 + SADDLE_TOL) {
        return Err(Error::NotASaddle(moduli));
    }
    let (s, u) = if ev[0].norm() < ev[1].norm() { (ev[0].re, ev[1].re) } else { (ev[1].re, ev[0].re) };
    Ok(SaddleFrame {
        c,
        kind,
        base: orbit[0],
        period: orbit.len(),
        jacobian: m,
        stable_dir: real_eigenvector(m, s),
        unstable_dir: real_eigenvector(m, u),
        stable_mult: s,
        unstable_mult: u,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Stable,
    Unstable,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Stable => "stable",
            Side::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Levels,
    MaxArclen,
    LeftBox,
    /// Stable branch reached the line `y = 0`.
    Singular,
    VertexCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Fundamental domains to grow.
    pub levels: usize,
    /// Seed length; `1e-6 (1 + |base|)` when `None`.
    pub eps0: Option<f64>,
    pub arc_tol: f64,
    pub max_arclen: f64,
    /// Tracing stops outside `|z| <= box_radius`; `R2` when `None`.
    pub box_radius: Option<f64>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { levels: 200, eps0: None, arc_tol: DEFAULT_ARC_TOL, max_arclen: 100.0, box_radius: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldCurve {
    pub frame: SaddleFrame,
    pub side: Side,
    /// `+1` or `-1`: the half of the eigenline the branch starts on.
    pub branch: i8,
    pub vertices: Vec<RPoint>,
    /// Fundamental domain each vertex came from.
    pub levels: Vec<u32>,
    /// Applications of `f` (unstable) or `f^{-1}` (stable) per level.
    pub iterates_per_level: usize,
    pub eps0: f64,
    pub arc_tol: f64,
    pub levels_complete: usize,
    pub arclen: f64,
    pub stop: StopReason,
}

impl ManifoldCurve {
    /// Map iterates carrying vertex `i` back to the seed segment.
    pub fn iterates(&self, i: usize) -> usize {
        self.levels[i] as usize * self.iterates_per_level
    }

    /// Growth of a unit error along the orbit of vertex `i` back to the seed
    /// segment, estimated from the multiplier it is contracted by.
    pub fn error_growth(&self, i: usize) -> f64 {
        let mu = match self.side {
            Side::Unstable => self.frame.stable_mult,
            Side::Stable => self.frame.unstable_mult,
        };
        let periods = self.iterates(i) as f64 / self.frame.period as f64;
        match self.side {
            Side::Unstable => mu.abs().recip().powf(periods),
            Side::Stable => mu.abs().powf(periods),
        }
    }

    pub fn self_intersections(&self) -> usize {
        let idx = PolylineIndex::new(std::slice::from_ref(self), self.index_cell());
        let n = self.vertices.len();
        (0..n.saturating_sub(1))
            .into_par_iter()
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[i + 1]);
                idx.candidates(&a, &b)
                    .filter(|&j| j > i + 1 && segments_cross(a, b, idx.segs[j][0], idx.segs[j][1]))
                    .count()
            })
            .sum()
    }

    fn index_cell(&self) -> f64 {
        self.arc_tol * 4.0 * self.vertices.iter().map(|v| v.norm().max(1.0)).fold(1.0, f64::max)
    }
}

fn apply(c: f64, z: RPoint, side: Side, n: usize) -> Option<RPoint> {
    let mut p = z;
    for _ in 0..n {
        p = match side {
            Side::Unstable => forward(c, p).ok()?,
            Side::Stable => {
                if p.y.abs() < SINGULAR_BAND {
                    return None;
                }
                inverse(c, p).ok()?
            }
        };
    }
    p.is_finite().then_some(p)
}

/// Grows one branch by iterating a fundamental domain of the seed segment
/// and re-sampling by arc length.
pub fn trace(frame: &SaddleFrame, side: Side, branch: i8, opts: &TraceOptions) -> Result<ManifoldCurve> {
    let (dir, mu) = match side {
        Side::Unstable => (frame.unstable_dir, frame.unstable_mult),
        Side::Stable => (frame.stable_dir, 1.0 / frame.stable_mult),
    };
    let reps = if mu < 0.0 { 2 * frame.period } else { frame.period };
    let growth = if mu < 0.0 { mu * mu } else { mu };
    let eps0 = opts.eps0.unwrap_or(1e-6 * (1.0 + frame.base.norm()));
    let box_r = match opts.box_radius {
        Some(r) => r,
        None => escape_radii(Complex64::new(frame.c, 0.0))?.r2,
    };
    let sigma = f64::from(branch.signum());
    let c = frame.c;
    let seed = |t: f64| {
        let s = sigma * eps0 * growth.powf(t);
        RPoint::new(frame.base.x + s * dir[0], frame.base.y + s * dir[1])
    };
    let spacing = |z: &RPoint| opts.arc_tol * z.norm().max(1.0);

    let mut curve = ManifoldCurve {
        frame: *frame,
        side,
        branch: branch.signum(),
        vertices: Vec::new(),
        levels: Vec::new(),
        iterates_per_level: reps,
        eps0,
        arc_tol: opts.arc_tol,
        levels_complete: 0,
        arclen: 0.0,
        stop: StopReason::Levels,
    };

    let mut domain: Vec<(f64, RPoint)> = vec![(0.0, seed(0.0)), (1.0, seed(1.0))];
    for level in 0..opts.levels {
        if level > 0 {
            let mut next = Vec::with_capacity(domain.len());
            for (t, z) in &domain {
                match apply(c, *z, side, reps) {
                    Some(w) => next.push((*t, w)),
                    None => break,
                }
            }
            if next.is_empty() && level == 1 && side == Side::Stable {
                return Err(Error::BranchDied);
            }
            let truncated = next.len() < domain.len();
            domain = next;
            if truncated {
                curve.stop = StopReason::Singular;
            }
        }
        // refine until consecutive points are close
        let mut refined: Vec<(f64, RPoint)> = Vec::with_capacity(domain.len());
        let mut stack: Vec<(f64, RPoint)> = domain.iter().rev().copied().collect();
        while let Some(cur) = stack.pop() {
            if let Some(&(t0, z0)) = refined.last() {
                let (t1, z1) = cur;
                let mid_z = RPoint::new(0.5 * (z0.x + z1.x), 0.5 * (z0.y + z1.y));
                if z0.dist(&z1) > spacing(&mid_z) && t1 - t0 > 1e-13 && refined.len() + stack.len() < MAX_VERTICES {
                    let tm = 0.5 * (t0 + t1);
                    if let Some(w) = apply(c, seed(tm), side, reps * level) {
                        stack.push(cur);
                        stack.push((tm, w));
                        continue;
                    }
                }
            }
            refined.push(cur);
        }
        // thin out points crowded by contraction, keeping both ends
        let n = refined.len();
        let mut thinned: Vec<(f64, RPoint)> = Vec::with_capacity(n);
        for (k, p) in refined.into_iter().enumerate() {
            match thinned.last() {
                Some(q) if k + 1 < n && q.1.dist(&p.1) < 0.125 * spacing(&p.1) => {}
                _ => thinned.push(p),
            }
        }
        domain = thinned;

        let last = domain.len() - usize::from(curve.stop != StopReason::Singular && domain.len() > 1);
        for (_, z) in &domain[..last] {
            if z.norm() > box_r {
                curve.stop = StopReason::LeftBox;
                return Ok(curve);
            }
            if side == Side::Stable && z.y.abs() < SINGULAR_BAND {
                curve.stop = StopReason::Singular;
                return Ok(curve);
            }
            if let Some(prev) = curve.vertices.last() {
                curve.arclen += prev.euclid(z);
            }
            if curve.arclen > opts.max_arclen {
                curve.stop = StopReason::MaxArclen;
                return Ok(curve);
            }
            if curve.vertices.len() >= MAX_VERTICES {
                curve.stop = StopReason::VertexCap;
                return Ok(curve);
            }
            curve.vertices.push(*z);
            curve.levels.push(level as u32);
        }
        if curve.stop == StopReason::Singular {
            return Ok(curve);
        }
        curve.levels_complete = level + 1;
    }
    curve.stop = StopReason::Levels;
    Ok(curve)
}

pub fn trace_unstable(frame: &SaddleFrame, branch: i8, opts: &TraceOptions) -> Result<ManifoldCurve> {
    trace(frame, Side::Unstable, branch, opts)
}

pub fn trace_stable(frame: &SaddleFrame, branch: i8, opts: &TraceOptions) -> Result<ManifoldCurve> {
    trace(frame, Side::Stable, branch, opts)
}

/// Both branches of one side, in parallel.
pub fn trace_branches(frame: &SaddleFrame, side: Side, opts: &TraceOptions) -> Result<Vec<ManifoldCurve>> {
    [1i8, -1].par_iter().map(|b| trace(frame, side, *b, opts)).collect()
}

fn point_segment_distance(p: &RPoint, a: &RPoint, b: &RPoint) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0) };
    (p.x - a.x - t * dx).hypot(p.y - a.y - t * dy)
}

fn orient(a: RPoint, b: RPoint, c: RPoint) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(a: RPoint, b: RPoint, c: RPoint, d: RPoint) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Bucketed segments of one or more polylines for distance queries.
pub struct PolylineIndex {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
    segs: Vec<[RPoint; 2]>,
    /// Segments longer than 16 cells, left out of the index.
    pub skipped: usize,
}

impl PolylineIndex {
    pub fn new(curves: &[ManifoldCurve], cell: f64) -> Self {
        let mut idx = PolylineIndex { cell, cells: HashMap::new(), segs: Vec::new(), skipped: 0 };
        for curve in curves {
            let v = &curve.vertices;
            if v.len() == 1 {
                idx.insert(v[0], v[0]);
            }
            for w in v.windows(2) {
                idx.insert(w[0], w[1]);
            }
        }
        idx
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }

    fn insert(&mut self, a: RPoint, b: RPoint) {
        let id = self.segs.len();
        self.segs.push([a, b]);
        if a.dist(&b) > 16.0 * self.cell {
            self.skipped += 1;
            return;
        }
        let (i0, j0) = self.key(a.x.min(b.x), a.y.min(b.y));
        let (i1, j1) = self.key(a.x.max(b.x), a.y.max(b.y));
        for i in i0..=i1 {
            for j in j0..=j1 {
                self.cells.entry((i, j)).or_default().push(id);
            }
        }
    }

    fn candidates<'a>(&'a self, a: &RPoint, b: &RPoint) -> impl Iterator<Item = usize> + 'a {
        let (i0, j0) = self.key(a.x.min(b.x), a.y.min(b.y));
        let (i1, j1) = self.key(a.x.max(b.x), a.y.max(b.y));
        let span = (i1 - i0 + 1).saturating_mul(j1 - j0 + 1);
        let mut ids: Vec<usize> = if span > 4096 {
            Vec::new()
        } else {
            (i0..=i1)
                .flat_map(|i| (j0..=j1).map(move |j| (i, j)))
                .filter_map(|k| self.cells.get(&k))
                .flatten()
                .copied()
                .collect()
        };
        ids.sort_unstable();
        ids.dedup();
        ids.into_iter()
    }

    /// Distance from `p` to the nearest indexed segment, or infinity when
    /// none lies within `radius`.
    pub fn distance(&self, p: &RPoint, radius: f64) -> f64 {
        let lo = RPoint::new(p.x - radius, p.y - radius);
        let hi = RPoint::new(p.x + radius, p.y + radius);
        let d = self
            .candidates(&lo, &hi)
            .map(|id| point_segment_distance(p, &self.segs[id][0], &self.segs[id][1]))
            .fold(f64::INFINITY, f64::min);
        if d <= radius {
            d
        } else {
            f64::INFINITY
        }
    }
}

/// Largest distance from the image (unstable) or preimage (stable) under
/// `f^period` of a vertex to the traced curves. `curves` should hold both
/// branches of one side of one frame; vertices whose image lies past the
/// traced extent or outside the box are skipped.
pub fn invariance_residual(curves: &[ManifoldCurve], box_radius: f64) -> f64 {
    let Some(first) = curves.first() else { return 0.0 };
    let complete = curves.iter().map(|c| c.levels_complete).min().unwrap_or(0);
    let cell = curves.iter().map(|c| c.index_cell()).fold(0.0, f64::max);
    let idx = PolylineIndex::new(curves, cell);
    let (c, side, period) = (first.frame.c, first.side, first.frame.period);
    curves
        .par_iter()
        .flat_map_iter(|curve| {
            let idx = &idx;
            curve.vertices.iter().zip(&curve.levels).filter_map(move |(v, lvl)| {
                if (*lvl as usize) + 1 >= complete {
                    return None;
                }
                let w = apply(c, *v, side, period)?;
                (w.norm() <= box_radius).then(|| idx.distance(&w, curve.arc_tol))
            })
        })
        .reduce(|| 0.0, f64::max)
}

/// Curves as CSV rows `branch,side,index,x,y` after a `#` comment per frame.
pub fn curves_to_csv(curves: &[ManifoldCurve]) -> String {
    let mut out = String::new();
    let mut last: Option<(SaddleBase, Side)> = None;
    for curve in curves {
        let f = &curve.frame;
        if last != Some((f.kind, curve.side)) {
            let _ = writeln!(
                out,
                "# c={} base={} ({},{}) period={} stable_mult={} unstable_mult={}",
                f.c,
                f.kind.name(),
                f.base.x,
                f.base.y,
                f.period,
                f.stable_mult,
                f.unstable_mult
            );
            last = Some((f.kind, curve.side));
        }
    }
    out.push_str("branch,side,index,x,y\n");
    for curve in curves {
        let b = if curve.branch > 0 { "+" } else { "-" };
        for (i, v) in curve.vertices.iter().enumerate() {
            let _ = writeln!(out, "{b},{},{i},{},{}", curve.side.name(), v.x, v.y);
        }
    }
    out
}

/// Forward limit class of every pixel centre.
pub fn limit_class_grid(rp: &RealPartition, grid: &PixelGrid, budget: usize, tol: f64) -> Vec<LimitClass> {
    grid.map(|x, y| rp.classify_limit(RPoint::new(x, y), budget, tol))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitCounts {
    pub alpha: usize,
    pub theta: usize,
    pub cycle3: usize,
    pub escape: usize,
    pub undecided: usize,
}

impl LimitCounts {
    pub fn tally(classes: &[LimitClass]) -> Self {
        let mut n = LimitCounts::default();
        for c in classes {
            match c {
                LimitClass::Alpha => n.alpha += 1,
                LimitClass::Theta => n.theta += 1,
                LimitClass::Cycle3(_) => n.cycle3 += 1,
                LimitClass::Escape(_) => n.escape += 1,
                LimitClass::Undecided => n.undecided += 1,
            }
        }
        n
    }

    pub fn total(&self) -> usize {
        self.alpha + self.theta + self.cycle3 + self.escape + self.undecided
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOptions {
    pub segments: usize,
    /// Bisection stops once the bracket is this short or can no longer be
    /// split in floating point.
    pub width: f64,
    pub seed: u64,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions { segments: 200, width: 0.0, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryOutcome {
    Theta,
    Cycle3,
    /// Bisection hit a point classified Undecided.
    Undecided,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KplusReport {
    pub c: f64,
    pub grid: PixelGrid,
    pub budget: usize,
    pub tol: f64,
    pub counts: LimitCounts,
    pub undecided_fraction: f64,
    pub interior_checked: usize,
    pub interior_failures: usize,
    pub alpha_neighbourhood_interior: bool,
    pub segments_requested: usize,
    pub segments_used: usize,
    pub segments_discarded: usize,
    pub approached_theta: usize,
    pub approached_cycle: usize,
    pub boundary_undecided: usize,
    pub boundary_failed: usize,
    /// Escape endpoints that no longer escape with twice the budget.
    pub escape_endpoint_flips: usize,
}

impl KplusReport {
    pub fn boundary_success_rate(&self) -> f64 {
        if self.segments_used == 0 {
            return 0.0;
        }
        (self.approached_theta + self.approached_cycle) as f64 / self.segments_used as f64
    }
}

/// Whether the forward orbit of `z` stays within `tol` of `θ` for three
/// consecutive steps, or of one cycle point for three consecutive returns.
pub fn approaches_saddle(rp: &RealPartition, z: RPoint, budget: usize, tol: f64) -> Option<BoundaryOutcome> {
    let mut orbit = Vec::with_capacity(64);
    let mut p = z;
    let limit = 4.0 * rp.a2.max(1.0 + rp.c) + 2.0;
    for _ in 0..=budget {
        orbit.push(p);
        if p.norm() > limit {
            break;
        }
        p = match forward(rp.c, p) {
            Ok(q) => q,
            Err(_) => break,
        };
    }
    let near = |i: usize, q: &RPoint| orbit.get(i).is_some_and(|o| o.dist(q) < tol);
    for n in 0..orbit.len() {
        if (0..APPROACH_REPEATS).all(|k| near(n + k, &rp.theta)) {
            return Some(BoundaryOutcome::Theta);
        }
        if rp.cycle.iter().any(|q| (0..APPROACH_REPEATS).all(|k| near(n + 3 * k, q))) {
            return Some(BoundaryOutcome::Cycle3);
        }
    }
    None
}

fn alpha_or_escape(c: LimitClass) -> Option<bool> {
    match c {
        LimitClass::Alpha => Some(true),
        LimitClass::Escape(_) => Some(false),
        _ => None,
    }
}

/// Interior probes around grid points in `W^s(α)`, then bisection across
/// `∂K+` between adjacent Alpha and Escape pixels.
pub fn verify_kplus_decomposition(
    c: f64,
    grid: &PixelGrid,
    budget: usize,
    tol: f64,
    opts: &BoundaryOptions,
) -> Result<KplusReport> {
    grid.validate()?;
    let rp = RealPartition::new(c)?;
    let ctx = ParamContext::real(c);
    let radii = escape_radii(ctx.c)?;
    let fwd = EscapeClassifier::<f64>::forward(&ctx, radii.r0)?;
    let lim_tol = crate::partition::DEFAULT_LIMIT_TOL;
    let classes = limit_class_grid(&rp, grid, budget, lim_tol);
    let counts = LimitCounts::tally(&classes);

    let probes_bounded = |z: RPoint| {
        [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)].iter().all(|(dx, dy)| {
            let q = RPoint::new(z.x + dx * PROBE_OFFSET, z.y + dy * PROBE_OFFSET);
            fwd.classify_forward(q, budget) == OrbitStatus::Bounded
        })
    };
    let interior: Vec<bool> = (0..classes.len())
        .into_par_iter()
        .filter(|&i| classes[i] == LimitClass::Alpha)
        .filter_map(|i| {
            let (x, y) = grid.center(i / grid.width, i % grid.width);
            let z = RPoint::new(x, y);
            (fwd.classify_forward(z, budget) == OrbitStatus::Bounded).then(|| probes_bounded(z))
        })
        .collect();

    // adjacent Alpha/Escape pixel pairs, Alpha end first
    let mut pairs = Vec::new();
    for row in 0..grid.height {
        for col in 0..grid.width {
            let i = row * grid.width + col;
            let mut check = |j: usize| {
                if let (Some(a), Some(b)) = (alpha_or_escape(classes[i]), alpha_or_escape(classes[j])) {
                    if a != b {
                        pairs.push(if a { (i, j) } else { (j, i) });
                    }
                }
            };
            if col + 1 < grid.width {
                check(i + 1);
            }
            if row + 1 < grid.height {
                check(i + grid.width);
            }
        }
    }
    pairs.shuffle(&mut rng::stream(opts.seed, 0));

    let point = |i: usize| {
        let (x, y) = grid.center(i / grid.width, i % grid.width);
        RPoint::new(x, y)
    };
    let lerp = |a: RPoint, b: RPoint, t: f64| RPoint::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
    const CHECKS: usize = 8;
    let single_crossing = |a: RPoint, b: RPoint| {
        let mut seen_escape = false;
        for k in 1..CHECKS {
            match alpha_or_escape(rp.classify_limit(lerp(a, b, k as f64 / CHECKS as f64), budget, lim_tol)) {
                Some(true) if seen_escape => return false,
                Some(true) => {}
                Some(false) => seen_escape = true,
                None => return false,
            }
        }
        true
    };
    let bisect = |mut a: RPoint, mut b: RPoint| -> BoundaryOutcome {
        while a.dist(&b) > opts.width {
            let m = lerp(a, b, 0.5);
            if m == a || m == b {
                break;
            }
            match rp.classify_limit(m, budget, lim_tol) {
                LimitClass::Alpha => a = m,
                LimitClass::Escape(_) => b = m,
                LimitClass::Theta => return BoundaryOutcome::Theta,
                LimitClass::Cycle3(_) => return BoundaryOutcome::Cycle3,
                LimitClass::Undecided => return BoundaryOutcome::Undecided,
            }
        }
        approaches_saddle(&rp, lerp(a, b, 0.5), budget, tol).unwrap_or(BoundaryOutcome::Failed)
    };

    // candidates are processed in shuffled order; the first `segments` with a
    // single crossing are used
    let mut outcomes = Vec::new();
    let mut discarded = 0;
    let mut flips = 0;
    let mut next = 0;
    while outcomes.len() < opts.segments && next < pairs.len() {
        let want = opts.segments - outcomes.len();
        let chunk = &pairs[next..(next + want).min(pairs.len())];
        next += chunk.len();
        let results: Vec<Option<(BoundaryOutcome, bool)>> = chunk
            .par_iter()
            .map(|&(ia, ib)| {
                let (a, b) = (point(ia), point(ib));
                if !single_crossing(a, b) {
                    return None;
                }
                let flip = !matches!(rp.classify_limit(b, 2 * budget, lim_tol), LimitClass::Escape(_));
                Some((bisect(a, b), flip))
            })
            .collect();
        for r in results {
            match r {
                Some((o, flip)) => {
                    outcomes.push(o);
                    flips += usize::from(flip);
                }
                None => discarded += 1,
            }
        }
    }

    let alpha_nbhd = probes_bounded(rp.alpha);
    let count = |o: BoundaryOutcome| outcomes.iter().filter(|x| **x == o).count();
    Ok(KplusReport {
        c,
        grid: *grid,
        budget,
        tol,
        undecided_fraction: counts.undecided as f64 / counts.total().max(1) as f64,
        counts,
        interior_checked: interior.len(),
        interior_failures: interior.iter().filter(|ok| !**ok).count(),
        alpha_neighbourhood_interior: alpha_nbhd,
        segments_requested: opts.segments,
        segments_used: outcomes.len(),
        segments_discarded: discarded,
        approached_theta: count(BoundaryOutcome::Theta),
        approached_cycle: count(BoundaryOutcome::Cycle3),
        boundary_undecided: count(BoundaryOutcome::Undecided),
        boundary_failed: count(BoundaryOutcome::Failed),
        escape_endpoint_flips: flips,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub base: SaddleBase,
    pub side: Side,
    pub branch: i8,
    pub vertices: usize,
    pub levels_complete: usize,
    pub arclen: f64,
    pub stop: StopReason,
    pub self_intersections: usize,
}

impl CurveSummary {
    pub fn of(curve: &ManifoldCurve) -> Self {
        CurveSummary {
            base: curve.frame.kind,
            side: curve.side,
            branch: curve.branch,
            vertices: curve.vertices.len(),
            levels_complete: curve.levels_complete,
            arclen: curve.arclen,
            stop: curve.stop,
            self_intersections: curve.self_intersections(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KminusReport {
    pub c: f64,
    pub grid: PixelGrid,
    pub budget: usize,
    pub tol: f64,
    pub grid_points: usize,
    pub grid_bounded: usize,
    pub grid_limit_pass: usize,
    pub grid_near_curve: usize,
    pub grid_failed: usize,
    /// Largest curve distance among bounded grid points that failed the limit test.
    pub grid_worst_distance: f64,
    /// Periodic points plus sampled unstable-curve vertices.
    pub seeded_points: usize,
    pub seeded_limit_pass: usize,
    pub seeded_pass: usize,
    /// Sampled vertices whose backward orbit stays bounded for as many steps
    /// as it took to produce them from the seed segment.
    pub vertices_checked: usize,
    pub vertices_backward_bounded: usize,
    /// The same restricted to vertices whose rounding error, grown by the
    /// backward expansion at the saddle, stays below `CONDITION_LIMIT`.
    pub conditioned_checked: usize,
    pub conditioned_backward_bounded: usize,
    pub conditioned_limit_pass: usize,
    pub curves: Vec<CurveSummary>,
}

impl KminusReport {
    pub fn grid_pass_fraction(&self) -> Option<f64> {
        (self.grid_bounded > 0).then(|| (self.grid_limit_pass + self.grid_near_curve) as f64 / self.grid_bounded as f64)
    }

    pub fn seeded_pass_fraction(&self) -> f64 {
        self.seeded_pass as f64 / self.seeded_points.max(1) as f64
    }
}

/// Unstable branches of `θ` and of the three cycle points.
pub fn unstable_curves(c: f64, opts: &TraceOptions) -> Result<Vec<ManifoldCurve>> {
    let ctx = ParamContext::real(c);
    let frames = SaddleBase::ALL.iter().map(|k| saddle_frame(&ctx, *k)).collect::<Result<Vec<_>>>()?;
    let nested: Vec<Vec<ManifoldCurve>> =
        frames.par_iter().map(|f| trace_branches(f, Side::Unstable, opts)).collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// Backward-bounded grid points of `D_{R2}` and seeded points of `K-`, each
/// checked for a backward limit at `θ` or the 3-cycle or proximity to a
/// traced unstable curve.
pub fn verify_kminus_decomposition(
    c: f64,
    grid: &PixelGrid,
    budget: usize,
    tol: f64,
    seeded_per_curve: usize,
) -> Result<KminusReport> {
    grid.validate()?;
    let rp = RealPartition::new(c)?;
    let ctx = ParamContext::real(c);
    let radii = escape_radii(ctx.c)?;
    let back = EscapeClassifier::<f64>::backward(&ctx, radii.r1)?;
    let curves = unstable_curves(c, &TraceOptions::default())?;
    let cell = curves.iter().map(|c| c.index_cell()).fold(tol, f64::max);
    let idx = PolylineIndex::new(&curves, cell);
    let limit_ok = |z: RPoint, b: usize| {
        matches!(rp.classify_backward_limit(z, b, tol), BackwardLimitClass::Theta | BackwardLimitClass::Cycle3(_))
    };

    let bounded: Vec<RPoint> = grid
        .map(|x, y| {
            let z = RPoint::new(x, y);
            (back.classify_backward(z, budget) == OrbitStatus::Bounded).then_some(z)
        })
        .into_iter()
        .flatten()
        .collect();
    let grid_results: Vec<(bool, f64)> = bounded.par_iter().map(|z| (limit_ok(*z, budget), idx.distance(z, tol))).collect();
    let grid_limit_pass = grid_results.iter().filter(|r| r.0).count();
    let grid_near_curve = grid_results.iter().filter(|r| !r.0 && r.1 <= tol).count();
    let grid_worst_distance = grid_results.iter().filter(|r| !r.0).map(|r| r.1).fold(0.0, f64::max);

    // (point, budget, conditioned); the periodic points come first
    let mut seeded: Vec<(RPoint, usize, bool)> = vec![(rp.theta, budget, true)];
    seeded.extend(rp.cycle.iter().map(|p| (*p, budget, true)));
    for curve in &curves {
        let n = curve.vertices.len();
        let stride = n.div_ceil(seeded_per_curve.max(1)).max(1);
        seeded.extend((0..n).step_by(stride).map(|i| {
            (curve.vertices[i], curve.iterates(i), curve.error_growth(i) * f64::EPSILON <= CONDITION_LIMIT)
        }));
    }
    let seeded_results: Vec<(bool, bool, Option<(bool, bool)>)> = seeded
        .par_iter()
        .enumerate()
        .map(|(k, (z, iters, cond))| {
            let lim = limit_ok(*z, if k < 4 { *iters } else { iters + CONFIRM_STEPS + 1 });
            let near = idx.distance(z, tol) <= tol;
            let bounded = (k >= 4).then(|| (back.classify_backward(*z, *iters) == OrbitStatus::Bounded, *cond));
            (lim, lim || near, bounded)
        })
        .collect();
    let vertices: Vec<(bool, bool)> = seeded_results.iter().filter_map(|r| r.2).collect();
    let conditioned: Vec<(bool, bool)> =
        seeded_results.iter().filter(|r| r.2.is_some_and(|v| v.1)).map(|r| (r.0, r.2.unwrap().0)).collect();

    Ok(KminusReport {
        c,
        grid: *grid,
        budget,
        tol,
        grid_points: grid.len(),
        grid_bounded: bounded.len(),
        grid_limit_pass,
        grid_near_curve,
        grid_failed: bounded.len() - grid_limit_pass - grid_near_curve,
        grid_worst_distance,
        seeded_points: seeded.len(),
        seeded_limit_pass: seeded_results.iter().filter(|r| r.0).count(),
        seeded_pass: seeded_results.iter().filter(|r| r.1).count(),
        vertices_checked: vertices.len(),
        vertices_backward_bounded: vertices.iter().filter(|b| b.0).count(),
        conditioned_checked: conditioned.len(),
        conditioned_backward_bounded: conditioned.iter().filter(|r| r.1).count(),
        conditioned_limit_pass: conditioned.iter().filter(|r| r.0).count(),
        curves: curves.iter().map(CurveSummary::of).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_frame_at_021() {
        let f = saddle_frame(&ParamContext::real(0.21), SaddleBase::Theta).unwrap();
        assert!((f.base.x - 0.7).abs() < 1e-12);
        assert!((f.unstable_mult - 1.2569).abs() < 1e-4);
        assert!((f.stable_mult + 0.5569).abs() < 1e-4);
        let u = f.unstable_dir;
        assert!((u[0] / u[1] - f.unstable_mult).abs() < 1e-9);
        assert!(f.residual() < 1e-9);
    }

    #[test]
    fn cycle_frame_at_zero() {
        let f = saddle_frame(&ParamContext::real(0.0), SaddleBase::Cycle(0)).unwrap();
        assert_eq!(f.period, 3);
        assert!((f.unstable_mult - (2.0 + 5f64.sqrt())).abs() < 1e-12);
        assert!((f.stable_mult - (2.0 - 5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn parse_names() {
        for b in SaddleBase::ALL {
            assert_eq!(SaddleBase::parse(b.name()).unwrap(), b);
        }
        assert!(SaddleBase::parse("alpha").is_err());
    }

    #[test]
    fn curve_starts_at_the_seed() {
        let f = saddle_frame(&ParamContext::real(0.2), SaddleBase::Theta).unwrap();
        let opts = TraceOptions { levels: 30, ..Default::default() };
        let cu = trace_unstable(&f, 1, &opts).unwrap();
        assert!(cu.vertices[0].dist(&f.base) <= cu.eps0 * 1.0000001);
        assert_eq!(cu.levels[0], 0);
    }

    #[test]
    fn index_distance() {
        let f = saddle_frame(&ParamContext::real(0.2), SaddleBase::Theta).unwrap();
        let cu = ManifoldCurve {
            frame: f,
            side: Side::Unstable,
            branch: 1,
            vertices: vec![RPoint::new(0.0, 0.0), RPoint::new(1.0, 0.0)],
            levels: vec![0, 0],
            iterates_per_level: 1,
            eps0: 0.0,
            arc_tol: 1e-3,
            levels_complete: 1,
            arclen: 1.0,
            stop: StopReason::Levels,
        };
        let idx = PolylineIndex::new(std::slice::from_ref(&cu), 2.0);
        assert!((idx.distance(&RPoint::new(0.5, 0.25), 1.0) - 0.25).abs() < 1e-15);
        assert!(idx.distance(&RPoint::new(0.5, 3.0), 1.0).is_infinite());
    }
}
