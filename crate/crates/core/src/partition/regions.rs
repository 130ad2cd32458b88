//! The rectangles partitioning the real plane for `0 < c < 1/4`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::exact::{rational_of, EInterval, ERect, Ext, Field, Quad};
use crate::error::{Error, Result};
use crate::point::RPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    L,
    M,
    N,
    P,
    Q0,
    Q1,
    Q2,
    Q3,
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    R1Rect,
    R2Rect,
    /// `[0, a_1] × [a_1, ∞)`.
    AInner,
    /// `[a_1, ∞) × [0, a_1]`.
    HInner,
}

impl Region {
    /// The eighteen regions of the partition table, in a fixed order.
    pub const TABLE: [Region; 18] = [
        Region::L,
        Region::M,
        Region::N,
        Region::P,
        Region::Q0,
        Region::Q1,
        Region::Q2,
        Region::Q3,
        Region::A,
        Region::B,
        Region::C,
        Region::D,
        Region::E,
        Region::F,
        Region::G,
        Region::H,
        Region::R1Rect,
        Region::R2Rect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Region::L => "L",
            Region::M => "M",
            Region::N => "N",
            Region::P => "P",
            Region::Q0 => "Q0",
            Region::Q1 => "Q1",
            Region::Q2 => "Q2",
            Region::Q3 => "Q3",
            Region::A => "A",
            Region::B => "B",
            Region::C => "C",
            Region::D => "D",
            Region::E => "E",
            Region::F => "F",
            Region::G => "G",
            Region::H => "H",
            Region::R1Rect => "R1rect",
            Region::R2Rect => "R2rect",
            Region::AInner => "A''",
            Region::HInner => "H''",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed real interval; infinite endpoints mean unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XInterval {
    pub lo: f64,
    pub hi: f64,
}

impl XInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        XInterval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledRect {
    pub label: Region,
    pub x: XInterval,
    pub y: XInterval,
}

impl LabeledRect {
    pub fn contains(&self, z: &RPoint) -> bool {
        self.x.contains(z.x) && self.y.contains(z.y)
    }
}

/// Symbolic endpoints shared by the float and exact builders.
#[derive(Debug, Clone, Copy, PartialEq)]
enum End {
    NegInf,
    MinusOne,
    Zero,
    OnePlusC,
    A1,
    A2,
    PosInf,
}

fn shape(region: Region) -> [End; 4] {
    use End::*;
    match region {
        Region::L => [A2, PosInf, A2, PosInf],
        Region::M => [NegInf, MinusOne, OnePlusC, PosInf],
        Region::N => [NegInf, MinusOne, NegInf, MinusOne],
        Region::P => [OnePlusC, PosInf, NegInf, MinusOne],
        Region::Q0 => [Zero, OnePlusC, Zero, A2],
        Region::Q1 => [MinusOne, Zero, Zero, OnePlusC],
        Region::Q2 => [MinusOne, Zero, MinusOne, Zero],
        Region::Q3 => [Zero, OnePlusC, MinusOne, Zero],
        Region::A => [Zero, A2, A2, PosInf],
        Region::B => [MinusOne, Zero, OnePlusC, PosInf],
        Region::C => [NegInf, MinusOne, Zero, OnePlusC],
        Region::D => [NegInf, MinusOne, MinusOne, Zero],
        Region::E => [MinusOne, Zero, NegInf, MinusOne],
        Region::F => [Zero, OnePlusC, NegInf, MinusOne],
        Region::G => [OnePlusC, PosInf, MinusOne, Zero],
        Region::H => [OnePlusC, PosInf, Zero, A2],
        Region::R1Rect => [MinusOne, Zero, MinusOne, OnePlusC],
        Region::R2Rect => [Zero, OnePlusC, MinusOne, A2],
        Region::AInner => [Zero, A1, A1, PosInf],
        Region::HInner => [A1, PosInf, Zero, A1],
    }
}

pub fn check_partition_parameter(c: f64) -> Result<()> {
    if c > 0.0 && c < 0.25 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            what: "c",
            value: c,
            range: "0 < c < 1/4",
        })
    }
}

fn float_end(e: End, c: f64, a1: f64, a2: f64) -> f64 {
    match e {
        End::NegInf => f64::NEG_INFINITY,
        End::MinusOne => -1.0,
        End::Zero => 0.0,
        End::OnePlusC => 1.0 + c,
        End::A1 => a1,
        End::A2 => a2,
        End::PosInf => f64::INFINITY,
    }
}

/// `(a_1, a_2)` in floating point for real `c <= 1/4`.
pub fn real_fixed_values(c: f64) -> (f64, f64) {
    let a2 = (1.0 + (1.0 - 4.0 * c).sqrt()) / 2.0;
    (c / a2, a2)
}

pub fn region_rect(c: f64, region: Region) -> LabeledRect {
    let (a1, a2) = real_fixed_values(c);
    let s = shape(region);
    LabeledRect {
        label: region,
        x: XInterval::new(float_end(s[0], c, a1, a2), float_end(s[1], c, a1, a2)),
        y: XInterval::new(float_end(s[2], c, a1, a2), float_end(s[3], c, a1, a2)),
    }
}

/// The eighteen labelled rectangles for `0 < c < 1/4`.
pub fn build_regions(c: f64) -> Result<Vec<LabeledRect>> {
    check_partition_parameter(c)?;
    Ok(Region::TABLE.iter().map(|r| region_rect(c, *r)).collect())
}

/// Labels of every table region containing `z` (rectangles are closed, so
/// boundary points carry several labels).
pub fn locate(regions: &[LabeledRect], z: &RPoint) -> Vec<Region> {
    regions.iter().filter(|r| r.contains(z)).map(|r| r.label).collect()
}

/// The exact field and constants for a parameter.
#[derive(Debug, Clone)]
pub struct ExactParams {
    pub field: Field,
    pub c: Quad,
    pub one_plus_c: Quad,
    pub a1: Quad,
    pub a2: Quad,
}

impl ExactParams {
    /// Reads `c` as the exact rational value of the float; needs `c <= 1/4`.
    pub fn new(c: f64) -> Self {
        let cq = rational_of(c);
        let four = BigRational::from_integer(BigInt::from(4));
        let d = BigRational::one() - &cq * four;
        let field = Field::new(d);
        let one = Quad::int(1);
        let root = field.sqrt_d();
        let a2 = field.half(&field.add(&one, &root));
        let a1 = field.half(&field.sub(&one, &root));
        let c = Quad::rational(cq);
        let one_plus_c = field.add(&one, &c);
        ExactParams { field, c, one_plus_c, a1, a2 }
    }

    fn end(&self, e: End) -> Ext {
        match e {
            End::NegInf => Ext::NegInf,
            End::MinusOne => Ext::int(-1),
            End::Zero => Ext::int(0),
            End::OnePlusC => Ext::Fin(self.one_plus_c.clone()),
            End::A1 => Ext::Fin(self.a1.clone()),
            End::A2 => Ext::Fin(self.a2.clone()),
            End::PosInf => Ext::PosInf,
        }
    }

    pub fn rect(&self, region: Region) -> ERect {
        let s = shape(region);
        ERect {
            x: EInterval::new(self.end(s[0]), self.end(s[1])),
            y: EInterval::new(self.end(s[2]), self.end(s[3])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_point_labels() {
        let regions = build_regions(0.2).unwrap();
        let mut got = locate(&regions, &RPoint::new(-1.0, -1.0));
        got.sort();
        assert_eq!(got, vec![Region::N, Region::Q2, Region::D, Region::E, Region::R1Rect]);
    }

    #[test]
    fn parameter_range() {
        assert!(build_regions(0.3).is_err());
        assert!(build_regions(0.0).is_err());
        assert_eq!(build_regions(0.1).unwrap().len(), 18);
    }

    #[test]
    fn sample_points_are_covered() {
        let regions = build_regions(0.2).unwrap();
        for i in -40..=40 {
            for j in -40..=40 {
                let z = RPoint::new(i as f64 * 0.137, j as f64 * 0.129);
                assert!(!locate(&regions, &z).is_empty(), "{z:?}");
            }
        }
    }
}
