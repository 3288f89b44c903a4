//! Far-field slit amplitudes and detection-plate densities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hilbert::{BranchState, SpatialAmplitude};

/// Physical inputs behind the per-slit amplitudes. Lengths are in units of
/// the de Broglie wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitGeometry {
    wavelength: f64,
    slit_separation: f64,
    slit_width: f64,
    screen_distance: f64,
    grid: GridSpec,
}

impl Default for SlitGeometry {
    fn default() -> Self {
        Self::new(1.0, 10.0, 2.0, 1000.0, GridSpec::new(-500.0, 500.0, 2048).unwrap()).unwrap()
    }
}

impl SlitGeometry {
    pub fn new(
        wavelength: f64,
        slit_separation: f64,
        slit_width: f64,
        screen_distance: f64,
        grid: GridSpec,
    ) -> Result<Self> {
        let lengths = [
            ("wavelength", wavelength),
            ("slit separation", slit_separation),
            ("slit width", slit_width),
            ("screen distance", screen_distance),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be positive (got {v})")));
            }
        }
        if slit_separation <= slit_width {
            return Err(Error::Validation(format!(
                "slit separation {slit_separation} must exceed slit width {slit_width}"
            )));
        }
        if screen_distance < 100.0 * slit_separation {
            return Err(Error::Validation(format!(
                "screen distance {screen_distance} must be at least 100x the slit separation"
            )));
        }
        Ok(Self {
            wavelength,
            slit_separation,
            slit_width,
            screen_distance,
            grid,
        })
    }

    pub fn with_grid(self, grid: GridSpec) -> Self {
        Self { grid, ..self }
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn slit_separation(&self) -> f64 {
        self.slit_separation
    }

    pub fn slit_width(&self) -> f64 {
        self.slit_width
    }

    pub fn screen_distance(&self) -> f64 {
        self.screen_distance
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Spacing `lambda L / d` of the two-slit fringes.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength * self.screen_distance / self.slit_separation
    }

    /// Half-width `lambda L / a` of the central single-slit lobe.
    pub fn envelope_half_width(&self) -> f64 {
        self.wavelength * self.screen_distance / self.slit_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slit {
    One,
    Two,
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Fraunhofer amplitude of slit `slit` alone: a single-slit sinc envelope
/// times the linear phase of a slit displaced by `+-d/2`, normalized on the
/// grid.
pub fn diffracted_amplitude(geom: &SlitGeometry, slit: Slit) -> SpatialAmplitude {
    let offset = match slit {
        Slit::One => geom.slit_separation / 2.0,
        Slit::Two => -geom.slit_separation / 2.0,
    };
    let scale = geom.wavelength * geom.screen_distance;
    let values: Vec<Complex64> = geom
        .grid
        .centers()
        .map(|x| {
            let envelope = sinc(PI * geom.slit_width * x / scale);
            Complex64::from_polar(envelope, 2.0 * PI * x * offset / scale)
        })
        .collect();
    let norm = (values.iter().map(|v| v.norm_sqr()).sum::<f64>() * geom.grid.dx()).sqrt();
    let values = values.into_iter().map(|v| v / norm).collect();
    SpatialAmplitude::new(geom.grid, values).expect("finite amplitudes on the geometry grid")
}

/// Probability density sampled at bin centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Density {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_bins() {
            return Err(Error::Dimension(format!(
                "{} density values for a {}-bin grid",
                values.len(),
                grid.n_bins()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sum_i p_i dx`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    /// Probability mass of every bin, `p_i dx`.
    pub fn masses(&self) -> Vec<f64> {
        let dx = self.grid.dx();
        self.values.iter().map(|p| p * dx).collect()
    }

    pub fn max_abs_diff(&self, other: &Density) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `int |p - q| dx`.
    pub fn l1_distance(&self, other: &Density) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * self.grid.dx())
    }

    pub fn add(&self, other: &Density) -> Result<Density> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Density {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scaled(&self, factor: f64) -> Density {
        Density {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Unconditioned detection-plate density `P(x) = sum_b |psi_b(x)|^2`.
pub fn pattern(s: &BranchState) -> Density {
    let mut values = vec![0.0; s.grid().n_bins()];
    for (_, psi) in s.branches() {
        for (p, v) in values.iter_mut().zip(psi.values()) {
            *p += v.norm_sqr();
        }
    }
    Density {
        grid: *s.grid(),
        values,
    }
}
