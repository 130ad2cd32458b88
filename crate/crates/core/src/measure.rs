//! Monte Carlo estimates of the Lebesgue measure of `K+`, `K-` and `K`
//! inside a box, the invariant polydisk for `|c| < 1/4`, and the attracting
//! fixed point of the inverse branch for `c < -2`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::ParamContext;
use crate::dynamics::{forward, inverse, OrbitStatus};
use crate::error::{Error, Result};
use crate::escape::{escape_radii, EscapeClassifier};
use crate::point::{CPoint, Point2};
use crate::rng::{self, StreamRng};
use crate::spectral::inverse_fixed_classification;

pub const DEFAULT_BUDGET: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetSelector {
    Kplus,
    Kminus,
    /// `K+ ∩ K-`.
    K,
}

impl SetSelector {
    pub fn name(self) -> &'static str {
        match self {
            SetSelector::Kplus => "kplus",
            SetSelector::Kminus => "kminus",
            SetSelector::K => "k",
        }
    }
}

impl FromStr for SetSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kplus" => Ok(SetSelector::Kplus),
            "kminus" => Ok(SetSelector::Kminus),
            "k" => Ok(SetSelector::K),
            _ => Err(Error::InvalidSpec(format!("unknown set '{s}' (kplus, kminus, k)"))),
        }
    }
}

/// Sampling domain. Text form, also used in CSV output:
/// `real:x0:x1:y0:y1`, `complex:a0:a1:b0:b1:c0:c1:d0:d1` (ranges of
/// `Re x, Im x, Re y, Im y`) and `polydisk:r` (`|x|, |y| <= r`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleBox {
    Real([f64; 4]),
    Complex([f64; 8]),
    Polydisk(f64),
}

impl SampleBox {
    /// Area for real boxes, 4-volume otherwise.
    pub fn volume(&self) -> f64 {
        match self {
            SampleBox::Real(b) => (b[1] - b[0]) * (b[3] - b[2]),
            SampleBox::Complex(b) => (0..4).map(|k| b[2 * k + 1] - b[2 * k]).product(),
            SampleBox::Polydisk(r) => (std::f64::consts::PI * r * r).powi(2),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, SampleBox::Real(_))
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            SampleBox::Real(b) => b[0] < b[1] && b[2] < b[3],
            SampleBox::Complex(b) => (0..4).all(|k| b[2 * k] < b[2 * k + 1]),
            SampleBox::Polydisk(r) => *r > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("empty sampling box {self}")))
        }
    }

    /// A sample; real boxes put it on the real plane. Polydisk coordinates
    /// come from rejection sampling in the bounding square (acceptance pi/4
    /// per coordinate).
    pub fn sample(&self, g: &mut StreamRng) -> CPoint {
        match self {
            SampleBox::Real(b) => CPoint::real(rng::uniform(g, b[0], b[1]), rng::uniform(g, b[2], b[3])),
            SampleBox::Complex(b) => {
                let mut v = [0.0; 4];
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = rng::uniform(g, b[2 * k], b[2 * k + 1]);
                }
                Point2::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
            }
            SampleBox::Polydisk(r) => {
                let o = Complex64::new(0.0, 0.0);
                Point2::new(rng::uniform_disk(g, o, *r), rng::uniform_disk(g, o, *r))
            }
        }
    }
}

impl fmt::Display for SampleBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":");
        match self {
            SampleBox::Real(b) => write!(f, "real:{}", join(b)),
            SampleBox::Complex(b) => write!(f, "complex:{}", join(b)),
            SampleBox::Polydisk(r) => write!(f, "polydisk:{r}"),
        }
    }
}

impl FromStr for SampleBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("cannot parse box '{s}'"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums: Vec<f64> = rest.split(':').map(|t| t.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        let b = match (kind, nums.len()) {
            ("real", 4) => SampleBox::Real([nums[0], nums[1], nums[2], nums[3]]),
            ("complex", 8) => {
                let mut a = [0.0; 8];
                a.copy_from_slice(&nums);
                SampleBox::Complex(a)
            }
            ("polydisk", 1) => SampleBox::Polydisk(nums[0]),
            _ => return Err(bad()),
        };
        b.validate()?;
        Ok(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub c: Complex64,
    pub set: SetSelector,
    pub sample_box: SampleBox,
    pub samples: usize,
    pub hits: usize,
    pub budget: usize,
    pub seed: u64,
    pub value: f64,
    pub stderr: f64,
}

impl MeasureEstimate {
    pub fn hit_fraction(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    pub const CSV_HEADER: &'static str = "c,set,box,samples,budget,value,stderr,seed";

    pub fn csv_row(&self) -> String {
        let c = if self.c.im == 0.0 { self.c.re.to_string() } else { format!("{}{:+}i", self.c.re, self.c.im) };
        format!(
            "{c},{},{},{},{},{},{},{}",
            self.set.name(),
            self.sample_box,
            self.samples,
            self.budget,
            self.value,
            self.stderr,
            self.seed
        )
    }
}

struct Membership {
    fwd: EscapeClassifier<Complex64>,
    back: EscapeClassifier<Complex64>,
    fwd_real: EscapeClassifier<f64>,
    back_real: EscapeClassifier<f64>,
    set: SetSelector,
    budget: usize,
}

impl Membership {
    fn new(ctx: &ParamContext, set: SetSelector, budget: usize) -> Result<Self> {
        let radii = escape_radii(ctx.c)?;
        let real_ctx = ParamContext::real(ctx.c.re);
        Ok(Membership {
            fwd: EscapeClassifier::forward(ctx, radii.r0)?,
            back: EscapeClassifier::backward(ctx, radii.r1)?,
            // only used when c is real
            fwd_real: EscapeClassifier::forward(&real_ctx, radii.r0)?,
            back_real: EscapeClassifier::backward(&real_ctx, radii.r1)?,
            set,
            budget,
        })
    }

    fn combine(&self, plus: impl Fn() -> bool, minus: impl Fn() -> bool) -> bool {
        match self.set {
            SetSelector::Kplus => plus(),
            SetSelector::Kminus => minus(),
            SetSelector::K => plus() && minus(),
        }
    }

    fn hit(&self, z: CPoint, real: bool) -> bool {
        let b = self.budget;
        match z.as_real().filter(|_| real) {
            Some(r) => self.combine(
                || self.fwd_real.classify_forward(r, b) == OrbitStatus::Bounded,
                || self.back_real.classify_backward(r, b) == OrbitStatus::Bounded,
            ),
            None => self.combine(
                || self.fwd.classify_forward(z, b) == OrbitStatus::Bounded,
                || self.back.classify_backward(z, b) == OrbitStatus::Bounded,
            ),
        }
    }
}

/// Box-restricted estimate `vol(box) * hits / samples`. A sample is a hit
/// when the classifier for the selected set returns Bounded at `budget`.
pub fn mc_measure(
    ctx: &ParamContext,
    set: SetSelector,
    sample_box: SampleBox,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<MeasureEstimate> {
    if samples == 0 {
        return Err(Error::InvalidSpec("samples must be at least 1".into()));
    }
    sample_box.validate()?;
    if sample_box.is_real() && !ctx.is_real {
        return Err(Error::NonRealParameter { re: ctx.c.re, im: ctx.c.im });
    }
    let member = Membership::new(ctx, set, budget)?;
    let real = sample_box.is_real();
    let hits: usize = rng::batches(samples)
        .into_par_iter()
        .map(|(b, lo, hi)| {
            let mut g = rng::stream(seed, b);
            (lo..hi).filter(|_| member.hit(sample_box.sample(&mut g), real)).count()
        })
        .sum();
    let vol = sample_box.volume();
    let p = hits as f64 / samples as f64;
    Ok(MeasureEstimate {
        c: ctx.c,
        set,
        sample_box,
        samples,
        hits,
        budget,
        seed,
        value: vol * p,
        stderr: vol * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorPolydisk {
    /// Radius of `D_a = {|x|, |y| <= a}`.
    pub a: f64,
    /// `a - a^2 - |c|`, positive when `f(D_a) ⊂ D_a`.
    pub margin: f64,
}

/// The polydisk `D_{1/2}` with its margin `1/4 - |c|`, when `|c| < 1/4`.
/// There `|xy + c| <= a^2 + |c| < a` for `|x|, |y| <= a`, so `D_a` is
/// forward invariant and lies in `K+`.
pub fn interior_polydisk(c: Complex64) -> Option<InteriorPolydisk> {
    let a = 0.5;
    let margin = a - a * a - c.norm();
    (margin > 0.0).then_some(InteriorPolydisk { a, margin })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub samples: usize,
    pub steps: usize,
    /// Samples whose first `steps` iterates all stayed in `D_a`.
    pub stayed: usize,
    /// Largest max-norm seen along all sampled orbits.
    pub max_norm: f64,
}

impl InvarianceCheck {
    pub fn passed(&self) -> bool {
        self.stayed == self.samples
    }
}

/// Samples of `D_a` followed for `steps` forward iterates.
pub fn polydisk_invariance_check(c: Complex64, a: f64, samples: usize, seed: u64, steps: usize) -> InvarianceCheck {
    let domain = SampleBox::Polydisk(a);
    let (stayed, max_norm) = rng::batches(samples)
        .into_par_iter()
        .map(|(b, lo, hi)| {
            let mut g = rng::stream(seed, b);
            let mut stayed = 0;
            let mut max_norm: f64 = 0.0;
            for _ in lo..hi {
                let mut z = domain.sample(&mut g);
                let mut ok = z.norm() <= a;
                max_norm = max_norm.max(z.norm());
                for _ in 0..steps {
                    z = match forward(c, z) {
                        Ok(w) => w,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    };
                    max_norm = max_norm.max(z.norm());
                    ok &= z.norm() <= a;
                }
                stayed += usize::from(ok);
            }
            (stayed, max_norm)
        })
        .reduce(|| (0, 0.0), |x, y| (x.0 + y.0, x.1.max(y.1)));
    InvarianceCheck { samples, steps, stayed, max_norm }
}

pub const POSITIVITY_RADIUS: f64 = 0.01;
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub c: f64,
    pub a1: f64,
    pub eigenvalues: [Complex64; 2],
    /// `|alpha_1 alpha_2|` from the eigenvalues.
    pub product_modulus: f64,
    /// `-1/a_1`.
    pub expected_product: f64,
    pub attracting: bool,
    pub samples: usize,
    pub converged: usize,
    /// Largest number of inverse steps a converging sample needed.
    pub max_steps: usize,
}

impl PositivityReport {
    pub fn fraction(&self) -> f64 {
        self.converged as f64 / self.samples.max(1) as f64
    }
}

/// Steps until the backward orbit of `z` is within `tol` of `p`, if that
/// happens within `budget` steps.
pub fn backward_convergence(c: Complex64, z: CPoint, p: CPoint, budget: usize, tol: f64) -> Option<usize> {
    let mut w = z;
    for n in 0..=budget {
        if w.dist(&p) < tol {
            return Some(n);
        }
        if n == budget {
            break;
        }
        w = inverse(c, w).ok()?;
    }
    None
}

/// Samples the ball of radius 0.01 about `(a_1, a_1)` in C^2 (rejection
/// from the enclosing cube of R^4) and follows each backward orbit until it
/// is within `1e-6` of `(a_1, a_1)`.
pub fn kminus_positivity_check(c: f64, samples: usize, seed: u64, budget: usize) -> Result<PositivityReport> {
    if !(c < -2.0) {
        return Err(Error::ParameterOutOfRange { what: "c", value: c, range: "c < -2" });
    }
    let info = inverse_fixed_classification(c)?;
    let cc = Complex64::new(c, 0.0);
    let p = CPoint::real(info.a1, info.a1);
    let r = POSITIVITY_RADIUS;
    let (converged, max_steps) = rng::batches(samples)
        .into_par_iter()
        .map(|(b, lo, hi)| {
            let mut g = rng::stream(seed, b);
            let mut conv = 0;
            let mut worst = 0;
            for _ in lo..hi {
                let v = loop {
                    let v: [f64; 4] = std::array::from_fn(|_| rng::uniform(&mut g, -r, r));
                    if v.iter().map(|t| t * t).sum::<f64>() <= r * r {
                        break v;
                    }
                };
                let z = Point2::new(p.x + Complex64::new(v[0], v[1]), p.y + Complex64::new(v[2], v[3]));
                if let Some(n) = backward_convergence(cc, z, p, budget, POSITIVITY_TOL) {
                    conv += 1;
                    worst = worst.max(n);
                }
            }
            (conv, worst)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1.max(y.1)));
    Ok(PositivityReport {
        c,
        a1: info.a1,
        eigenvalues: info.eigenvalues,
        product_modulus: info.product_modulus,
        expected_product: -1.0 / info.a1,
        attracting: info.attracting,
        samples,
        converged,
        max_steps,
    })
}

/// EXPLORATORY: `K+` and `K-` estimates across parameters. Nothing is
/// asserted about the growth of these numbers.
pub fn conjecture_explorer(
    c_list: &[Complex64],
    sample_box: SampleBox,
    samples: usize,
    seed: u64,
    budget: usize,
) -> Result<Vec<MeasureEstimate>> {
    let mut rows = Vec::with_capacity(2 * c_list.len());
    for c in c_list {
        let ctx = ParamContext::new(*c);
        for set in [SetSelector::Kplus, SetSelector::Kminus] {
            rows.push(mc_measure(&ctx, set, sample_box, samples, seed, budget)?);
        }
    }
    Ok(rows)
}

/// CSV table with header; `exploratory` adds a leading comment line.
pub fn estimates_to_csv(rows: &[MeasureEstimate], exploratory: bool) -> String {
    let mut out = String::new();
    if exploratory {
        out.push_str("# EXPLORATORY: box-restricted estimates, no claim is tested\n");
    }
    out.push_str(MeasureEstimate::CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}
