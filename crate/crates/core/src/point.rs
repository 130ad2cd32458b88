//! Scalars and points of the phase space.
//!
//! The map is iterated either on the real plane (`f64`) or on C^2
//! (`Complex64`). Everything that only needs ring operations and a modulus is
//! written once against [`Scalar`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
    fn from_f64(v: f64) -> Self;
    /// `None` when `c` cannot be represented in this field.
    fn from_complex(c: Complex64) -> Option<Self>;
    fn to_complex(self) -> Complex64;

    fn is_zero(self) -> bool {
        self.modulus() == 0.0
    }
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_complex(c: Complex64) -> Option<Self> {
        (c.im == 0.0).then_some(c.re)
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_complex(c: Complex64) -> Option<Self> {
        Some(c)
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// A point `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

pub type CPoint = Point2<Complex64>;
pub type RPoint = Point2<f64>;

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    /// Max norm `max(|x|, |y|)`.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.x.modulus().max(self.y.modulus())
    }

    #[inline]
    pub fn min_modulus(&self) -> f64 {
        self.x.modulus().min(self.y.modulus())
    }

    /// Max-norm distance.
    #[inline]
    pub fn dist(&self, other: &Self) -> f64 {
        (self.x - other.x).modulus().max((self.y - other.y).modulus())
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn to_complex(self) -> CPoint {
        Point2::new(self.x.to_complex(), self.y.to_complex())
    }
}

impl RPoint {
    /// Euclidean distance in the real plane.
    pub fn euclid(&self, other: &RPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl CPoint {
    pub fn real(x: f64, y: f64) -> Self {
        Point2::new(Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    }

    /// Real part, if both imaginary parts vanish.
    pub fn as_real(&self) -> Option<RPoint> {
        (self.x.im == 0.0 && self.y.im == 0.0).then(|| Point2::new(self.x.re, self.y.re))
    }
}
