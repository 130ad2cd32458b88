//! Pixel grids over a rectangle of the viewing plane.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `width x height` pixels over `[x0, x1] x [y0, y1]`. Row 0 is the top
/// (`y` near `y1`); samples are taken at pixel centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelGrid {
    pub window: [f64; 4],
    pub width: usize,
    pub height: usize,
}

impl PixelGrid {
    pub fn new(window: [f64; 4], width: usize, height: usize) -> Result<Self> {
        let g = PixelGrid { window, width, height };
        g.validate()?;
        Ok(g)
    }

    /// Square grid over `[-r, r]^2`.
    pub fn centered(r: f64, n: usize) -> Result<Self> {
        Self::new([-r, r, -r, r], n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let [x0, x1, y0, y1] = self.window;
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidSpec(format!("empty pixel grid {}x{}", self.width, self.height)));
        }
        if !(x0 < x1 && y0 < y1) || !self.window.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec(format!("empty window {x0},{x1},{y0},{y1}")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pixel_size(&self) -> (f64, f64) {
        let [x0, x1, y0, y1] = self.window;
        ((x1 - x0) / self.width as f64, (y1 - y0) / self.height as f64)
    }

    #[inline]
    pub fn center(&self, row: usize, col: usize) -> (f64, f64) {
        let [x0, _, _, y1] = self.window;
        let (dx, dy) = self.pixel_size();
        (x0 + (col as f64 + 0.5) * dx, y1 - (row as f64 + 0.5) * dy)
    }

    /// Evaluates `f(x, y)` at every pixel centre, rows in parallel, in
    /// row-major order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync,
    {
        (0..self.height)
            .into_par_iter()
            .flat_map_iter(|row| {
                let f = &f;
                (0..self.width).map(move |col| {
                    let (x, y) = self.center(row, col);
                    f(x, y)
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centres_and_order() {
        let g = PixelGrid::new([0.0, 2.0, 0.0, 1.0], 2, 1).unwrap();
        assert_eq!(g.center(0, 0), (0.5, 0.5));
        assert_eq!(g.center(0, 1), (1.5, 0.5));
        let v = g.map(|x, _| x);
        assert_eq!(v, vec![0.5, 1.5]);
    }

    #[test]
    fn rejects_empty() {
        assert!(PixelGrid::new([0.0, 0.0, 0.0, 1.0], 1, 1).is_err());
        assert!(PixelGrid::new([0.0, 1.0, 0.0, 1.0], 0, 1).is_err());
    }
}
