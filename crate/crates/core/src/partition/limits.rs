//! Itineraries through the partition and classification of forward and
//! backward limits of real orbits for `0 < c < 1/4`.

use serde::{Deserialize, Serialize};

use super::regions::{build_regions, locate, real_fixed_values, LabeledRect, Region};
use crate::dynamics::{forward, inverse, Direction};
use crate::error::{Error, Result};
use crate::escape::{escape_radii, in_gr, in_vr};
use crate::point::RPoint;

/// Steps an orbit must stay near a periodic point after first reaching it.
pub const CONFIRM_STEPS: usize = 10;

pub const DEFAULT_LIMIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LimitClass {
    Alpha,
    Theta,
    /// Converges to the 3-cycle; the phase is the index of the cycle point
    /// the orbit was near when convergence was confirmed.
    Cycle3(u8),
    /// Entered `L ∪ M ∪ N ∪ P` away from the periodic points at this step.
    Escape(usize),
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BackwardLimitClass {
    Theta,
    Cycle3(u8),
    /// Entered `A ∪ ... ∪ H` away from the periodic points at this step.
    BackwardEscape(usize),
    InverseUndefined(usize),
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ItineraryEnd {
    Budget,
    Escaped(usize),
    InverseUndefined(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    pub labels: Vec<Vec<Region>>,
    pub end: ItineraryEnd,
}

/// Parameter-specific data for the real plane with `0 < c < 1/4`.
#[derive(Debug, Clone)]
pub struct RealPartition {
    pub c: f64,
    pub a1: f64,
    pub a2: f64,
    pub alpha: RPoint,
    pub theta: RPoint,
    /// `(-1, -1), (1 + c, -1), (-1, 1 + c)`.
    pub cycle: [RPoint; 3],
    pub regions: Vec<LabeledRect>,
    r_forward: f64,
    r_backward: f64,
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Alpha,
    Theta,
    Cycle(usize),
}

impl RealPartition {
    pub fn new(c: f64) -> Result<Self> {
        let regions = build_regions(c)?;
        let (a1, a2) = real_fixed_values(c);
        let radii = escape_radii(num_complex::Complex64::new(c, 0.0))?;
        Ok(RealPartition {
            c,
            a1,
            a2,
            alpha: RPoint::new(a1, a1),
            theta: RPoint::new(a2, a2),
            cycle: [RPoint::new(-1.0, -1.0), RPoint::new(1.0 + c, -1.0), RPoint::new(-1.0, 1.0 + c)],
            regions,
            r_forward: radii.r0,
            r_backward: radii.r1,
        })
    }

    pub fn locate(&self, z: &RPoint) -> Vec<Region> {
        locate(&self.regions, z)
    }

    /// `L ∪ M ∪ N ∪ P`.
    #[inline]
    pub fn in_outer(&self, z: &RPoint) -> bool {
        let (x, y, a2, k) = (z.x, z.y, self.a2, 1.0 + self.c);
        (x >= a2 && y >= a2) || (x <= -1.0 && y >= k) || (x <= -1.0 && y <= -1.0) || (x >= k && y <= -1.0)
    }

    /// `A ∪ B ∪ ... ∪ H`.
    #[inline]
    pub fn in_strips(&self, z: &RPoint) -> bool {
        let (x, y, a2, k) = (z.x, z.y, self.a2, 1.0 + self.c);
        let xa = (0.0..=a2).contains(&x);
        let xb = (-1.0..=0.0).contains(&x);
        let xf = (0.0..=k).contains(&x);
        (xa && y >= a2)
            || (xb && y >= k)
            || (x <= -1.0 && (-1.0..=k).contains(&y))
            || (xb && y <= -1.0)
            || (xf && y <= -1.0)
            || (x >= k && (-1.0..=a2).contains(&y))
    }

    fn target_point(&self, t: Target, shift: isize) -> RPoint {
        match t {
            Target::Alpha => self.alpha,
            Target::Theta => self.theta,
            Target::Cycle(j) => self.cycle[(j as isize + shift).rem_euclid(3) as usize],
        }
    }

    fn near_target(&self, z: &RPoint, tol: f64, with_alpha: bool) -> Option<Target> {
        if with_alpha && z.dist(&self.alpha) < tol {
            return Some(Target::Alpha);
        }
        if z.dist(&self.theta) < tol {
            return Some(Target::Theta);
        }
        (0..3).find(|j| z.dist(&self.cycle[*j]) < tol).map(Target::Cycle)
    }

    fn near_exceptional(&self, z: &RPoint, tol: f64) -> bool {
        self.near_target(z, tol, true).is_some()
    }

    fn confirms(&self, z: RPoint, t: Target, tol: f64, dir: Direction) -> bool {
        let mut p = z;
        for k in 1..=CONFIRM_STEPS {
            let next = match dir {
                Direction::Forward => forward(self.c, p),
                Direction::Backward => inverse(self.c, p),
            };
            p = match next {
                Ok(q) => q,
                Err(_) => return false,
            };
            let shift = if dir == Direction::Forward { k as isize } else { -(k as isize) };
            if p.dist(&self.target_point(t, shift)) > 2.0 * tol {
                return false;
            }
        }
        true
    }

    /// Forward limit of a real orbit.
    pub fn classify_limit(&self, z: RPoint, budget: usize, tol: f64) -> LimitClass {
        let mut p = z;
        for n in 0..budget {
            if let Some(t) = self.near_target(&p, tol, true) {
                if self.confirms(p, t, tol, Direction::Forward) {
                    return match t {
                        Target::Alpha => LimitClass::Alpha,
                        Target::Theta => LimitClass::Theta,
                        Target::Cycle(j) => LimitClass::Cycle3(j as u8),
                    };
                }
            } else if self.in_outer(&p) {
                return LimitClass::Escape(n);
            }
            p = match forward(self.c, p) {
                Ok(q) => q,
                Err(_) => return LimitClass::Escape(n + 1),
            };
        }
        LimitClass::Undecided
    }

    /// Backward limit of a real orbit along the inverse branch.
    pub fn classify_backward_limit(&self, z: RPoint, budget: usize, tol: f64) -> BackwardLimitClass {
        let mut p = z;
        for n in 0..budget {
            if let Some(t) = self.near_target(&p, tol, false) {
                if self.confirms(p, t, tol, Direction::Backward) {
                    return match t {
                        Target::Cycle(j) => BackwardLimitClass::Cycle3(j as u8),
                        _ => BackwardLimitClass::Theta,
                    };
                }
            } else if self.in_strips(&p) && !self.near_exceptional(&p, tol) {
                return BackwardLimitClass::BackwardEscape(n);
            }
            p = match inverse(self.c, p) {
                Ok(q) => q,
                Err(Error::InverseUndefined) => return BackwardLimitClass::InverseUndefined(n),
                Err(_) => return BackwardLimitClass::BackwardEscape(n + 1),
            };
        }
        BackwardLimitClass::Undecided
    }

    /// Region labels along an orbit, stopping at the budget, on entering the
    /// escape region (`V_R` forward, `G_R` backward) or where the inverse
    /// branch is undefined.
    pub fn itinerary(&self, z: RPoint, direction: Direction, budget: usize) -> Itinerary {
        let mut labels = vec![self.locate(&z)];
        let mut p = z;
        for n in 0..budget {
            let escaped = match direction {
                Direction::Forward => in_vr(&p, self.r_forward),
                Direction::Backward => in_gr(&p, self.r_backward),
            };
            if escaped {
                return Itinerary { labels, end: ItineraryEnd::Escaped(n) };
            }
            let next = match direction {
                Direction::Forward => forward(self.c, p),
                Direction::Backward => inverse(self.c, p),
            };
            p = match next {
                Ok(q) => q,
                Err(Error::InverseUndefined) => {
                    return Itinerary { labels, end: ItineraryEnd::InverseUndefined(n) }
                }
                Err(_) => return Itinerary { labels, end: ItineraryEnd::Escaped(n + 1) },
            };
            labels.push(self.locate(&p));
        }
        Itinerary { labels, end: ItineraryEnd::Budget }
    }
}
