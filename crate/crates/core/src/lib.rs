//! Dynamics of the Fibonacci map `f_c(x, y) = (xy + c, x)` on the real plane
//! and on C^2.
//!
//! The crate covers the sets `K+` and `K-` of points with bounded forward and
//! backward orbits: escape radii and escape classification, closed forms at
//! `c = 0`, multipliers of the fixed points and of the 3-cycle through
//! `(-1, -1)`, a certified rectangle partition of the real plane for
//! `0 < c < 1/4`, traced stable and unstable manifolds, Monte Carlo volume
//! estimates, and deterministic rasters.

pub mod context;
pub mod dynamics;
pub mod error;
pub mod escape;
pub mod grid;
pub mod linalg;
pub mod manifolds;
pub mod measure;
pub mod monomial;
pub mod partition;
pub mod point;
pub mod render;
pub mod rng;
pub mod spectral;

pub use context::ParamContext;
pub use dynamics::{Direction, OrbitStatus, OrbitTrace};
pub use error::{Error, Result};
pub use point::{CPoint, Point2, RPoint, Scalar};
