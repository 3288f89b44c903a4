use crate::error::{Error, Result};

/// Uniform 1-D detection grid. Bin `i` covers
/// `[x_min + i dx, x_min + (i + 1) dx)` and is represented by its center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_bins: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_bins: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Validation("grid bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::Validation(format!(
                "grid requires x_min < x_max (got {x_min} >= {x_max})"
            )));
        }
        if n_bins < 2 {
            return Err(Error::Validation(format!(
                "grid requires at least 2 bins (got {n_bins})"
            )));
        }
        let grid = Self { x_min, x_max, n_bins };
        if !(grid.dx() > 0.0) {
            return Err(Error::Validation("bin width underflows to zero".into()));
        }
        Ok(grid)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_bins as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_bins).map(move |i| self.center(i))
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "grid [{}, {}]x{} does not match [{}, {}]x{}",
                self.x_min, self.x_max, self.n_bins, other.x_min, other.x_max, other.n_bins
            )))
        }
    }
}
