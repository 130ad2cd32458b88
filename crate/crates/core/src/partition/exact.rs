//! Exact arithmetic in `Q(sqrt(d))` extended by `±∞`, and closed intervals
//! and rectangles over it.
//!
//! All partition boundaries (`0`, `±1`, `c`, `1 + c`, `a_1`, `a_2`) live in
//! `Q(sqrt(1 - 4c))` once `c` is read as the exact rational value of its
//! `f64`, so inclusions that touch a boundary (e.g. `a_2^2 + c = a_2`) are
//! decided exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `p + q sqrt(d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    pub p: BigRational,
    pub q: BigRational,
}

impl Quad {
    pub fn rational(p: BigRational) -> Self {
        Quad { p, q: BigRational::zero() }
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }
}

/// Exact rational value of a finite `f64`.
pub fn rational_of(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite value")
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

/// The field `Q(sqrt(d))`, `d >= 0`. When `d` is a rational square every
/// element is kept with `q = 0`.
#[derive(Debug, Clone)]
pub struct Field {
    d: BigRational,
    root: Option<BigRational>,
    sqrt_f64: f64,
}

impl Field {
    pub fn new(d: BigRational) -> Self {
        assert!(!d.is_negative(), "radicand must be non-negative");
        let root = rational_sqrt(&d);
        let sqrt_f64 = d.to_f64().unwrap_or(f64::NAN).sqrt();
        Field { d, root, sqrt_f64 }
    }

    /// `sqrt(d)` as an element.
    pub fn sqrt_d(&self) -> Quad {
        match &self.root {
            Some(r) => Quad::rational(r.clone()),
            None => Quad { p: BigRational::zero(), q: BigRational::one() },
        }
    }

    pub fn add(&self, a: &Quad, b: &Quad) -> Quad {
        Quad { p: &a.p + &b.p, q: &a.q + &b.q }
    }

    pub fn sub(&self, a: &Quad, b: &Quad) -> Quad {
        Quad { p: &a.p - &b.p, q: &a.q - &b.q }
    }

    pub fn neg(&self, a: &Quad) -> Quad {
        Quad { p: -&a.p, q: -&a.q }
    }

    pub fn mul(&self, a: &Quad, b: &Quad) -> Quad {
        Quad {
            p: &a.p * &b.p + &a.q * &b.q * &self.d,
            q: &a.p * &b.q + &a.q * &b.p,
        }
    }

    pub fn half(&self, a: &Quad) -> Quad {
        let two = BigRational::from_integer(BigInt::from(2));
        Quad { p: &a.p / &two, q: &a.q / &two }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Quad) -> Option<Quad> {
        let norm = &a.p * &a.p - &a.q * &a.q * &self.d;
        if norm.is_zero() {
            return None;
        }
        Some(Quad { p: &a.p / &norm, q: -&a.q / &norm })
    }

    pub fn sign(&self, a: &Quad) -> Ordering {
        let sp = a.p.cmp(&BigRational::zero());
        let sq = a.q.cmp(&BigRational::zero());
        if sq == Ordering::Equal {
            return sp;
        }
        if sp == Ordering::Equal || sp == sq {
            return sq;
        }
        // opposite signs: compare p^2 with q^2 d
        let lhs = &a.p * &a.p;
        let rhs = &a.q * &a.q * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp(&self, a: &Quad, b: &Quad) -> Ordering {
        self.sign(&self.sub(a, b))
    }

    pub fn to_f64(&self, a: &Quad) -> f64 {
        a.p.to_f64().unwrap_or(f64::NAN) + a.q.to_f64().unwrap_or(f64::NAN) * self.sqrt_f64
    }
}

/// Extended element: finite, or one of the two infinities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ext {
    NegInf,
    Fin(Quad),
    PosInf,
}

impl Ext {
    pub fn int(v: i64) -> Self {
        Ext::Fin(Quad::int(v))
    }

    pub fn finite(&self) -> Option<&Quad> {
        match self {
            Ext::Fin(q) => Some(q),
            _ => None,
        }
    }
}

impl Field {
    pub fn ext_sign(&self, a: &Ext) -> Ordering {
        match a {
            Ext::NegInf => Ordering::Less,
            Ext::PosInf => Ordering::Greater,
            Ext::Fin(q) => self.sign(q),
        }
    }

    pub fn ext_cmp(&self, a: &Ext, b: &Ext) -> Ordering {
        match (a, b) {
            (Ext::Fin(x), Ext::Fin(y)) => self.cmp(x, y),
            (Ext::NegInf, Ext::NegInf) | (Ext::PosInf, Ext::PosInf) => Ordering::Equal,
            (Ext::NegInf, _) | (_, Ext::PosInf) => Ordering::Less,
            (Ext::PosInf, _) | (_, Ext::NegInf) => Ordering::Greater,
        }
    }

    pub fn ext_le(&self, a: &Ext, b: &Ext) -> bool {
        self.ext_cmp(a, b) != Ordering::Greater
    }

    /// Sum with a finite shift.
    pub fn ext_add(&self, a: &Ext, b: &Quad) -> Ext {
        match a {
            Ext::Fin(x) => Ext::Fin(self.add(x, b)),
            other => other.clone(),
        }
    }

    /// Product in which `0 * ∞ = 0`. Used only for corner values of
    /// bilinear expressions over closed boxes: along an edge where one
    /// factor is identically zero the product is identically zero.
    pub fn ext_mul(&self, a: &Ext, b: &Ext) -> Ext {
        match (a, b) {
            (Ext::Fin(x), Ext::Fin(y)) => Ext::Fin(self.mul(x, y)),
            _ => {
                let s = match (self.ext_sign(a), self.ext_sign(b)) {
                    (Ordering::Equal, _) | (_, Ordering::Equal) => return Ext::Fin(Quad::zero()),
                    (x, y) if x == y => Ordering::Greater,
                    _ => Ordering::Less,
                };
                if s == Ordering::Greater {
                    Ext::PosInf
                } else {
                    Ext::NegInf
                }
            }
        }
    }

    pub fn ext_to_f64(&self, a: &Ext) -> f64 {
        match a {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(q) => self.to_f64(q),
        }
    }
}

/// Closed interval `[lo, hi]` (an infinite endpoint means unbounded).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EInterval {
    pub lo: Ext,
    pub hi: Ext,
}

impl EInterval {
    pub fn new(lo: Ext, hi: Ext) -> Self {
        EInterval { lo, hi }
    }
}

impl Field {
    pub fn contains(&self, outer: &EInterval, inner: &EInterval) -> bool {
        self.ext_le(&outer.lo, &inner.lo) && self.ext_le(&inner.hi, &outer.hi)
    }

    pub fn contains_value(&self, i: &EInterval, v: &Quad) -> bool {
        let v = Ext::Fin(v.clone());
        self.ext_le(&i.lo, &v) && self.ext_le(&v, &i.hi)
    }

    /// Hull of the four corner products.
    pub fn interval_mul(&self, a: &EInterval, b: &EInterval) -> EInterval {
        let corners = [
            self.ext_mul(&a.lo, &b.lo),
            self.ext_mul(&a.lo, &b.hi),
            self.ext_mul(&a.hi, &b.lo),
            self.ext_mul(&a.hi, &b.hi),
        ];
        let mut lo = corners[0].clone();
        let mut hi = corners[0].clone();
        for c in &corners[1..] {
            if self.ext_cmp(c, &lo) == Ordering::Less {
                lo = c.clone();
            }
            if self.ext_cmp(c, &hi) == Ordering::Greater {
                hi = c.clone();
            }
        }
        EInterval { lo, hi }
    }

    pub fn interval_shift(&self, a: &EInterval, s: &Quad) -> EInterval {
        EInterval { lo: self.ext_add(&a.lo, s), hi: self.ext_add(&a.hi, s) }
    }

    fn ext_recip(&self, a: &Ext, zero_side: Ordering) -> Ext {
        match a {
            Ext::NegInf | Ext::PosInf => Ext::Fin(Quad::zero()),
            Ext::Fin(q) => match self.inv(q) {
                Some(r) => Ext::Fin(r),
                None if zero_side == Ordering::Greater => Ext::PosInf,
                None => Ext::NegInf,
            },
        }
    }

    /// Closure of `{1/v : v in a, v != 0}` for an interval that does not
    /// contain zero in its interior and is not `[0, 0]`.
    pub fn interval_recip(&self, a: &EInterval) -> Option<EInterval> {
        let slo = self.ext_sign(&a.lo);
        let shi = self.ext_sign(&a.hi);
        if slo == Ordering::Less && shi == Ordering::Greater {
            return None;
        }
        if slo == Ordering::Equal && shi == Ordering::Equal {
            return None;
        }
        let side = if slo == Ordering::Less || shi == Ordering::Less {
            Ordering::Less
        } else {
            Ordering::Greater
        };
        // 1/v is decreasing on each side of zero
        Some(EInterval {
            lo: self.ext_recip(&a.hi, side),
            hi: self.ext_recip(&a.lo, side),
        })
    }

    pub fn width_f64(&self, a: &EInterval) -> f64 {
        match (&a.lo, &a.hi) {
            (Ext::Fin(l), Ext::Fin(h)) => self.to_f64(&self.sub(h, l)),
            _ => f64::INFINITY,
        }
    }

    /// Splits at the midpoint; unbounded sides are split at a point one
    /// unit (or one magnitude) beyond the finite end.
    pub fn split(&self, a: &EInterval) -> (EInterval, EInterval) {
        let mid = match (&a.lo, &a.hi) {
            (Ext::Fin(l), Ext::Fin(h)) => self.half(&self.add(l, h)),
            (Ext::Fin(l), _) => {
                let step = Quad::rational(rational_of(self.to_f64(l).abs().max(1.0).ceil()));
                self.add(l, &step)
            }
            (_, Ext::Fin(h)) => {
                let step = Quad::rational(rational_of(self.to_f64(h).abs().max(1.0).ceil()));
                self.sub(h, &step)
            }
            _ => Quad::zero(),
        };
        (
            EInterval { lo: a.lo.clone(), hi: Ext::Fin(mid.clone()) },
            EInterval { lo: Ext::Fin(mid), hi: a.hi.clone() },
        )
    }
}

/// Closed rectangle `x × y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ERect {
    pub x: EInterval,
    pub y: EInterval,
}

impl Field {
    pub fn rect_contains(&self, outer: &ERect, inner: &ERect) -> bool {
        self.contains(&outer.x, &inner.x) && self.contains(&outer.y, &inner.y)
    }

    pub fn point_in(&self, r: &ERect, x: &Quad, y: &Quad) -> bool {
        self.contains_value(&r.x, x) && self.contains_value(&r.y, y)
    }

    fn breakpoints(&self, span: &EInterval, cuts: impl Iterator<Item = Ext>) -> Vec<Ext> {
        let mut pts = vec![span.lo.clone(), span.hi.clone()];
        for c in cuts {
            if self.ext_cmp(&span.lo, &c) == Ordering::Less && self.ext_cmp(&c, &span.hi) == Ordering::Less {
                pts.push(c);
            }
        }
        pts.sort_by(|a, b| self.ext_cmp(a, b));
        pts.dedup_by(|a, b| self.ext_cmp(a, b) == Ordering::Equal);
        pts
    }

    fn cells(pts: &[Ext]) -> Vec<EInterval> {
        if pts.len() == 1 {
            return vec![EInterval::new(pts[0].clone(), pts[0].clone())];
        }
        pts.windows(2).map(|w| EInterval::new(w[0].clone(), w[1].clone())).collect()
    }

    /// Indices of targets that together cover `b`, or `None` if they do not.
    ///
    /// `b` is cut along every target edge that crosses it; each resulting
    /// cell lies on one side of every edge, so it is covered iff a single
    /// target contains it.
    pub fn covering(&self, b: &ERect, targets: &[ERect]) -> Option<Vec<usize>> {
        if let Some(i) = targets.iter().position(|t| self.rect_contains(t, b)) {
            return Some(vec![i]);
        }
        let xs = self.breakpoints(&b.x, targets.iter().flat_map(|t| [t.x.lo.clone(), t.x.hi.clone()]));
        let ys = self.breakpoints(&b.y, targets.iter().flat_map(|t| [t.y.lo.clone(), t.y.hi.clone()]));
        let mut used = Vec::new();
        for cx in Self::cells(&xs) {
            for cy in Self::cells(&ys) {
                let cell = ERect { x: cx.clone(), y: cy };
                let i = targets.iter().position(|t| self.rect_contains(t, &cell))?;
                if !used.contains(&i) {
                    used.push(i);
                }
            }
        }
        used.sort_unstable();
        Some(used)
    }
}
