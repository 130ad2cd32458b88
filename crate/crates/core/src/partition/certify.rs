//! Certified inclusions `f(X) ⊂ ∪ Y_i` and `f^{-1}(X) ⊂ ∪ Y_i` between
//! partition regions, by exact image boxes and adaptive bisection.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{EInterval, ERect, Ext, Field, Quad};
use super::regions::{check_partition_parameter, ExactParams, Region, XInterval};
use crate::dynamics::Direction;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 30;

/// Pieces narrower than this are not split further.
pub const MIN_PIECE_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafRecord {
    /// `[x0, x1, y0, y1]`, rounded to `f64` for reporting.
    pub source: [f64; 4],
    /// Image (or preimage) box; `None` when the piece has no preimage.
    pub image: Option<[f64; 4]>,
    pub targets: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CertStatus {
    Certified,
    /// A point of the source whose image (or preimage) misses every target.
    Counterexample { point: [f64; 2], image: [f64; 2] },
    /// Bisection stopped on this piece without a verdict.
    DepthExceeded { piece: [f64; 4] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionCertificate {
    pub c: f64,
    pub direction: Direction,
    pub source: Region,
    pub targets: Vec<Region>,
    pub max_depth: usize,
    pub depth_used: usize,
    pub status: CertStatus,
    /// Sorted by source rectangle.
    pub leaves: Vec<LeafRecord>,
}

impl InclusionCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    pub fn name(&self) -> String {
        inclusion_name(self.direction, self.source, &self.targets)
    }

    /// Plain-text form: a `#` header followed by one line per leaf,
    /// `source -> image -> targets`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let status = match &self.status {
            CertStatus::Certified => "certified".to_string(),
            CertStatus::Counterexample { point, image } => format!(
                "counterexample ({}, {}) -> ({}, {})",
                point[0], point[1], image[0], image[1]
            ),
            CertStatus::DepthExceeded { piece } => format!("depth-exceeded {}", fmt_rect(piece)),
        };
        let _ = writeln!(s, "# inclusion {}", self.name());
        let _ = writeln!(s, "# c {}", self.c);
        let _ = writeln!(s, "# direction {}", dir_name(self.direction));
        let _ = writeln!(s, "# source {}", self.source);
        let targets: Vec<&str> = self.targets.iter().map(|t| t.name()).collect();
        let _ = writeln!(s, "# targets {}", targets.join(" "));
        let _ = writeln!(s, "# max-depth {} depth-used {}", self.max_depth, self.depth_used);
        let _ = writeln!(s, "# status {status}");
        let _ = writeln!(s, "# leaves {}", self.leaves.len());
        for leaf in &self.leaves {
            let image = leaf.image.map_or_else(|| "empty".to_string(), |r| fmt_rect(&r));
            let t: Vec<&str> = leaf.targets.iter().map(|t| t.name()).collect();
            let t = if t.is_empty() { "-".to_string() } else { t.join("+") };
            let _ = writeln!(s, "{} -> {} -> {}", fmt_rect(&leaf.source), image, t);
        }
        s
    }
}

fn dir_name(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Backward => "backward",
    }
}

fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn fmt_rect(r: &[f64; 4]) -> String {
    format!("[{}, {}]x[{}, {}]", fmt_num(r[0]), fmt_num(r[1]), fmt_num(r[2]), fmt_num(r[3]))
}

pub fn inclusion_name(direction: Direction, source: Region, targets: &[Region]) -> String {
    let t: Vec<&str> = targets.iter().map(|t| t.name()).collect();
    let map = match direction {
        Direction::Forward => "f",
        Direction::Backward => "f^-1",
    };
    format!("{map}({source}) ⊂ {}", t.join(" ∪ "))
}

struct Certifier<'a> {
    ex: &'a ExactParams,
    direction: Direction,
    targets: Vec<ERect>,
}

enum Image {
    Box(ERect),
    Empty,
    /// The `y` interval straddles zero and must be split there first.
    SplitAtZero,
}

impl Certifier<'_> {
    fn f(&self) -> &Field {
        &self.ex.field
    }

    fn image(&self, piece: &ERect) -> Image {
        let f = self.f();
        match self.direction {
            Direction::Forward => {
                let xy = f.interval_mul(&piece.x, &piece.y);
                Image::Box(ERect { x: f.interval_shift(&xy, &self.ex.c), y: piece.x.clone() })
            }
            Direction::Backward => {
                let zero = Ext::int(0);
                let slo = f.ext_cmp(&piece.y.lo, &zero);
                let shi = f.ext_cmp(&piece.y.hi, &zero);
                if slo == Ordering::Less && shi == Ordering::Greater {
                    return Image::SplitAtZero;
                }
                let holds_c = f.contains_value(&piece.x, &self.ex.c);
                let touches_zero = slo != Ordering::Greater && shi != Ordering::Less;
                let whole_line = EInterval::new(Ext::NegInf, Ext::PosInf);
                if slo == Ordering::Equal && shi == Ordering::Equal {
                    // points (X, 0): only (c, 0) has preimages, the line x = 0
                    return if holds_c {
                        Image::Box(ERect { x: piece.y.clone(), y: whole_line })
                    } else {
                        Image::Empty
                    };
                }
                let recip = f.interval_recip(&piece.y).expect("y interval keeps one sign");
                let num = f.interval_shift(&piece.x, &f.neg(&self.ex.c));
                let yy = if holds_c && touches_zero { whole_line } else { f.interval_mul(&num, &recip) };
                Image::Box(ERect { x: piece.y.clone(), y: yy })
            }
        }
    }

    fn in_union(&self, x: &Quad, y: &Quad) -> bool {
        self.targets.iter().any(|t| self.f().point_in(t, x, y))
    }

    /// Finite sample points of a piece: corners and centre where finite.
    fn samples(&self, piece: &ERect) -> Vec<(Quad, Quad)> {
        let f = self.f();
        let pick = |i: &EInterval| -> Vec<Quad> {
            let mut v: Vec<Quad> = [&i.lo, &i.hi].iter().filter_map(|e| e.finite().cloned()).collect();
            if let (Ext::Fin(a), Ext::Fin(b)) = (&i.lo, &i.hi) {
                v.push(f.half(&f.add(a, b)));
            }
            v
        };
        let xs = pick(&piece.x);
        let ys = pick(&piece.y);
        xs.iter().flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone()))).collect()
    }

    fn counterexample(&self, piece: &ERect) -> Option<CertStatus> {
        let f = self.f();
        for (x, y) in self.samples(piece) {
            let img = match self.direction {
                Direction::Forward => Some((f.add(&f.mul(&x, &y), &self.ex.c), x.clone())),
                Direction::Backward => f.inv(&y).map(|iy| (y.clone(), f.mul(&f.sub(&x, &self.ex.c), &iy))),
            };
            if let Some((u, v)) = img {
                if !self.in_union(&u, &v) {
                    return Some(CertStatus::Counterexample {
                        point: [f.to_f64(&x), f.to_f64(&y)],
                        image: [f.to_f64(&u), f.to_f64(&v)],
                    });
                }
            }
        }
        None
    }

    fn split(&self, piece: &ERect) -> (ERect, ERect) {
        let f = self.f();
        let wx = f.width_f64(&piece.x);
        let wy = f.width_f64(&piece.y);
        let along_x = match (wx.is_finite(), wy.is_finite()) {
            (true, true) => wx >= wy,
            (true, false) => wx > 0.0,
            (false, true) => wy == 0.0,
            (false, false) => true,
        };
        if along_x {
            let (a, b) = f.split(&piece.x);
            (ERect { x: a, y: piece.y.clone() }, ERect { x: b, y: piece.y.clone() })
        } else {
            let (a, b) = f.split(&piece.y);
            (ERect { x: piece.x.clone(), y: a }, ERect { x: piece.x.clone(), y: b })
        }
    }

    fn rect_f64(&self, r: &ERect) -> [f64; 4] {
        let f = self.f();
        [
            f.ext_to_f64(&r.x.lo),
            f.ext_to_f64(&r.x.hi),
            f.ext_to_f64(&r.y.lo),
            f.ext_to_f64(&r.y.hi),
        ]
    }

    fn run(&self, source: ERect, labels: &[Region], max_depth: usize) -> (CertStatus, Vec<(ERect, LeafRecord)>, usize) {
        let f = self.f();
        let mut stack = vec![(source, 0usize)];
        let mut leaves = Vec::new();
        let mut depth_used = 0;
        while let Some((piece, depth)) = stack.pop() {
            depth_used = depth_used.max(depth);
            let image = match self.image(&piece) {
                Image::SplitAtZero => {
                    let zero = Ext::int(0);
                    let lower = ERect { x: piece.x.clone(), y: EInterval::new(piece.y.lo.clone(), zero.clone()) };
                    let upper = ERect { x: piece.x.clone(), y: EInterval::new(zero, piece.y.hi.clone()) };
                    stack.push((upper, depth));
                    stack.push((lower, depth));
                    continue;
                }
                Image::Empty => {
                    let rec = LeafRecord { source: self.rect_f64(&piece), image: None, targets: vec![] };
                    leaves.push((piece, rec));
                    continue;
                }
                Image::Box(b) => b,
            };
            if let Some(used) = f.covering(&image, &self.targets) {
                let rec = LeafRecord {
                    source: self.rect_f64(&piece),
                    image: Some(self.rect_f64(&image)),
                    targets: used.iter().map(|i| labels[*i]).collect(),
                };
                leaves.push((piece, rec));
                continue;
            }
            if let Some(cx) = self.counterexample(&piece) {
                return (cx, leaves, depth_used);
            }
            let width = f.width_f64(&piece.x).max(f.width_f64(&piece.y));
            if depth >= max_depth || width < MIN_PIECE_WIDTH {
                return (CertStatus::DepthExceeded { piece: self.rect_f64(&piece) }, leaves, depth_used);
            }
            let (a, b) = self.split(&piece);
            stack.push((b, depth + 1));
            stack.push((a, depth + 1));
        }
        (CertStatus::Certified, leaves, depth_used)
    }
}

fn cmp_interval(f: &Field, a: &EInterval, b: &EInterval) -> Ordering {
    f.ext_cmp(&a.lo, &b.lo).then_with(|| f.ext_cmp(&a.hi, &b.hi))
}

/// Certifies `f(source) ⊂ ∪ targets` (forward) or `f^{-1}(source) ⊂ ∪ targets`
/// (backward, full preimage including the line `x = 0` over `(c, 0)`).
pub fn certify_inclusion(
    c: f64,
    direction: Direction,
    source: Region,
    targets: &[Region],
    max_depth: usize,
) -> Result<InclusionCertificate> {
    check_partition_parameter(c)?;
    let ex = ExactParams::new(c);
    Ok(certify_with(&ex, c, direction, source, targets, max_depth))
}

fn certify_with(
    ex: &ExactParams,
    c: f64,
    direction: Direction,
    source: Region,
    targets: &[Region],
    max_depth: usize,
) -> InclusionCertificate {
    let cert = Certifier {
        ex,
        direction,
        targets: targets.iter().map(|r| ex.rect(*r)).collect(),
    };
    let (status, mut leaves, depth_used) = cert.run(ex.rect(source), targets, max_depth);
    let f = &ex.field;
    leaves.sort_by(|a, b| cmp_interval(f, &a.0.x, &b.0.x).then_with(|| cmp_interval(f, &a.0.y, &b.0.y)));
    InclusionCertificate {
        c,
        direction,
        source,
        targets: targets.to_vec(),
        max_depth,
        depth_used,
        status,
        leaves: leaves.into_iter().map(|(_, r)| r).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inclusion {
    pub direction: Direction,
    pub source: Region,
    pub targets: Vec<Region>,
}

fn inc(direction: Direction, source: Region, targets: &[Region]) -> Inclusion {
    Inclusion { direction, source, targets: targets.to_vec() }
}

/// Every transition of the partition that is certified.
pub fn transition_inclusions() -> Vec<Inclusion> {
    use Direction::{Backward as Bw, Forward as Fw};
    use Region::*;
    vec![
        inc(Fw, L, &[L]),
        inc(Fw, M, &[N]),
        inc(Fw, N, &[P]),
        inc(Fw, P, &[M]),
        inc(Fw, Q0, &[Q0, A, L]),
        inc(Fw, Q1, &[Q2, Q3]),
        inc(Fw, Q2, &[Q3]),
        inc(Fw, Q3, &[Q0, Q1, A]),
        inc(Fw, A, &[Q0, H]),
        inc(Fw, H, &[A, L]),
        inc(Fw, B, &[D, Q2, Q3]),
        inc(Fw, C, &[N, E, F]),
        inc(Fw, D, &[P, F]),
        inc(Fw, E, &[Q3, G]),
        inc(Fw, F, &[Q0, Q1, C]),
        inc(Fw, G, &[A, B, M]),
        inc(Bw, Q0, &[Q0, Q3, A, F]),
        inc(Bw, Q1, &[Q3, F]),
        inc(Bw, Q2, &[Q1, B]),
        inc(Bw, Q3, &[Q1, Q2, B, E]),
        inc(Bw, L, &[Q0, H, L]),
        inc(Bw, M, &[G, P]),
        inc(Bw, N, &[C, M]),
        inc(Bw, P, &[D, N]),
        inc(Bw, A, &[H, G, Q0, Q3]),
        inc(Bw, H, &[A]),
        inc(Bw, G, &[E]),
        inc(Bw, E, &[C]),
        inc(Bw, C, &[F]),
        inc(Bw, F, &[C, D]),
        inc(Bw, D, &[B]),
        inc(Bw, B, &[G]),
        inc(Bw, AInner, &[HInner, G, Q0, Q3]),
        inc(Bw, HInner, &[AInner]),
    ]
}

/// Exact check of `(1 + c) a_2 <= 1` for `0 <= c <= 1/4`.
pub fn product_bound_holds(c: f64) -> Result<bool> {
    if !(0.0..=0.25).contains(&c) {
        return Err(Error::ParameterOutOfRange {
            what: "c",
            value: c,
            range: "0 <= c <= 1/4",
        });
    }
    let ex = ExactParams::new(c);
    let f = &ex.field;
    let lhs = f.mul(&ex.one_plus_c, &ex.a2);
    Ok(f.cmp(&lhs, &Quad::int(1)) != Ordering::Greater)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionReport {
    pub c: f64,
    pub product_bound: bool,
    pub certificates: Vec<InclusionCertificate>,
}

impl TransitionReport {
    pub fn all_certified(&self) -> bool {
        self.product_bound && self.certificates.iter().all(|c| c.is_certified())
    }

    pub fn failures(&self) -> Vec<&InclusionCertificate> {
        self.certificates.iter().filter(|c| !c.is_certified()).collect()
    }
}

/// Certifies every entry of [`transition_inclusions`] in parallel.
pub fn verify_transition_tables(c: f64, max_depth: usize) -> Result<TransitionReport> {
    check_partition_parameter(c)?;
    let ex = ExactParams::new(c);
    let certificates = transition_inclusions()
        .par_iter()
        .map(|i| certify_with(&ex, c, i.direction, i.source, &i.targets, max_depth))
        .collect();
    Ok(TransitionReport {
        c,
        product_bound: product_bound_holds(c)?,
        certificates,
    })
}

fn corner_product(a: f64, b: f64) -> f64 {
    if (a == 0.0 && b.is_infinite()) || (b == 0.0 && a.is_infinite()) {
        0.0
    } else {
        a * b
    }
}

/// Bounding box of `f` over a closed rectangle in floating point, from the
/// four corner values (`0 * ∞` read as `0`). The image of every point of
/// the rectangle, computed in floating point, lies in this box.
pub fn rect_image_bbox(c: f64, x: XInterval, y: XInterval) -> (XInterval, XInterval) {
    let p = [
        corner_product(x.lo, y.lo),
        corner_product(x.lo, y.hi),
        corner_product(x.hi, y.lo),
        corner_product(x.hi, y.hi),
    ];
    let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (XInterval::new(lo + c, hi + c), x)
}
