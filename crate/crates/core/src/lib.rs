//! Simulator for which-way and quantum-eraser double-slit experiments.
//!
//! The atom/marker state is kept as a sum of spatial amplitudes tagged by
//! orthonormal marker labels ([`hilbert`]). Slit amplitudes come from the
//! far-field model in [`optics`]; [`dynamics`] holds the laser tagging,
//! shutter and plate-removal maps, and [`measurement`] the projective
//! readouts. [`scenario`] strings these into the nine catalogued
//! situations and [`montecarlo`] samples them at volume.

pub mod dynamics;
pub mod error;
pub mod fringe;
pub mod grid;
pub mod hilbert;
pub mod measurement;
pub mod montecarlo;
pub mod optics;
pub mod scenario;
pub mod stream;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use hilbert::{BranchState, Cavity, MarkerLabel, MarkerUnitary, SpatialAmplitude, Wall};
pub use measurement::{JointTable, MarkerObservable, MarkerOutcome, MeasurementOrder};
pub use montecarlo::{compare, simulate, ComparisonReport, Histogram, Simulation};
pub use optics::{pattern, Density, SlitGeometry};
pub use scenario::{analytic_pattern, run_timeline, DetectionRecord, Event, Scenario, ScenarioId};
