//! Projective measurements on branch states and the joint position/marker
//! statistics they generate.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::hilbert::{
    apply_marker_unitary, normalize, BasisFamily, BranchState, Cavity, MarkerLabel, MarkerUnitary,
    SpatialAmplitude, Wall,
};
use crate::optics::{pattern, Density};

/// Eigenvalue of a marker observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MarkerOutcome {
    Plus,
    Minus,
}

impl MarkerOutcome {
    pub const BOTH: [MarkerOutcome; 2] = [MarkerOutcome::Plus, MarkerOutcome::Minus];

    pub fn value(self) -> i8 {
        match self {
            MarkerOutcome::Plus => 1,
            MarkerOutcome::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            1 => Some(MarkerOutcome::Plus),
            -1 => Some(MarkerOutcome::Minus),
            _ => None,
        }
    }

    fn index(self) -> usize {
        match self {
            MarkerOutcome::Plus => 0,
            MarkerOutcome::Minus => 1,
        }
    }
}

impl fmt::Display for MarkerOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MarkerOutcome::Plus => "+1",
            MarkerOutcome::Minus => "-1",
        })
    }
}

/// Cavity observables. `SigmaParallel` asks which cavity holds the photon
/// (`+1` for cavity 1); `SigmaPerp` asks for the symmetric (`+1`, wall
/// excited) or antisymmetric (`-1`, wall ground) photon state. In the
/// `(C1, C2)` basis they are the Pauli `z` and `x` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkerObservable {
    SigmaParallel,
    SigmaPerp,
}

impl MarkerObservable {
    pub fn name(self) -> &'static str {
        match self {
            MarkerObservable::SigmaParallel => "sigma_parallel",
            MarkerObservable::SigmaPerp => "sigma_perp",
        }
    }

    /// Matrix in the `(C1, C2)` basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            MarkerObservable::SigmaParallel => [[one, zero], [zero, -one]],
            MarkerObservable::SigmaPerp => [[zero, one], [one, zero]],
        }
    }

    /// Outcome carried by `label`, or `None` if the label is not one of the
    /// observable's eigenvectors.
    fn eigenvalue(self, label: MarkerLabel) -> Option<MarkerOutcome> {
        match (self, label.cavity, label.wall) {
            (MarkerObservable::SigmaParallel, Cavity::C1, _) => Some(MarkerOutcome::Plus),
            (MarkerObservable::SigmaParallel, Cavity::C2, _) => Some(MarkerOutcome::Minus),
            (MarkerObservable::SigmaPerp, Cavity::Plus, _) => Some(MarkerOutcome::Plus),
            (MarkerObservable::SigmaPerp, Cavity::Vac, Wall::E) => Some(MarkerOutcome::Plus),
            (MarkerObservable::SigmaPerp, Cavity::Minus, _) => Some(MarkerOutcome::Minus),
            _ => None,
        }
    }

    /// Rewrites `s` in this observable's eigenbasis.
    fn eigenbasis(self, s: &BranchState) -> Result<BranchState> {
        let rotation = match (self, s.family()?) {
            (MarkerObservable::SigmaParallel, Some(BasisFamily::Symmetric)) => {
                Some(MarkerUnitary::symmetric_to_path as fn(Wall) -> MarkerUnitary)
            }
            (MarkerObservable::SigmaPerp, Some(BasisFamily::Path)) => Some(MarkerUnitary::path_to_symmetric as _),
            _ => None,
        };
        let rotated = match rotation {
            Some(make) => {
                let wall = s
                    .labels()
                    .find(|l| l.cavity.family().is_some())
                    .map(|l| l.wall)
                    .unwrap_or(Wall::G);
                apply_marker_unitary(s, &make(wall))?
            }
            None => s.clone(),
        };
        if let Some(label) = rotated.labels().find(|l| self.eigenvalue(*l).is_none()) {
            return Err(Error::IncompatibleObservable {
                observable: self.name(),
                label,
            });
        }
        Ok(rotated)
    }
}

/// Norm of the commutator `[a, b]` in the largest-singular-value sense.
pub fn commutator_norm(a: MarkerObservable, b: MarkerObservable) -> f64 {
    let (ma, mb) = (a.matrix(), b.matrix());
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                c[i][j] += ma[i][k] * mb[k][j] - mb[i][k] * ma[k][j];
            }
        }
    }
    spectral_norm_2x2(&c)
}

fn spectral_norm_2x2(m: &[[Complex64; 2]; 2]) -> f64 {
    // eigenvalues of the Hermitian m^dagger m
    let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = m.iter().map(|row| row[i].conj() * row[j]).sum();
        }
    }
    let half_trace = 0.5 * (g[0][0].re + g[1][1].re);
    let det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).re;
    let disc = (half_trace * half_trace - det).max(0.0).sqrt();
    (half_trace + disc).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Position,
    Marker(MarkerObservable),
}

/// A single measurement result. `value` is a bin index for position and
/// `+-1` for marker observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub observable: Observable,
    pub value: i64,
    pub timestamp: usize,
}

impl Outcome {
    pub fn with_timestamp(self, timestamp: usize) -> Self {
        Self { timestamp, ..self }
    }

    pub fn marker(&self) -> Option<MarkerOutcome> {
        match self.observable {
            Observable::Marker(_) => MarkerOutcome::from_value(self.value as i8),
            Observable::Position => None,
        }
    }
}

/// Inverse-CDF sampler over detection bins. A uniform draw `u` lands in bin
/// `i` when `CDF(i-1) <= u < CDF(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionSampler {
    cdf: Vec<f64>,
}

impl PositionSampler {
    pub fn new(density: &Density) -> Result<Self> {
        let masses = density.masses();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = masses
            .iter()
            .map(|&m| {
                acc += m.max(0.0);
                acc
            })
            .collect();
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::DegenerateState);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        // the last bin with mass closes the CDF so every draw in [0, 1) lands
        let last = masses.iter().rposition(|&m| m > 0.0).expect("positive total");
        for c in &mut cdf[last..] {
            *c = 1.0;
        }
        Ok(Self { cdf })
    }

    pub fn sample_with(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample_with(rng.random::<f64>())
    }
}

/// State after the atom was found in `bin`: each branch keeps only its
/// amplitude at that bin, renormalized.
pub fn collapse_position(s: &BranchState, bin: usize) -> Result<BranchState> {
    if bin >= s.grid().n_bins() {
        return Err(Error::Dimension(format!(
            "bin {bin} outside a {}-bin grid",
            s.grid().n_bins()
        )));
    }
    let branches: Vec<(MarkerLabel, SpatialAmplitude)> = s
        .branches()
        .iter()
        .map(|(l, psi)| (*l, psi.restricted_to(bin)))
        .collect();
    normalize(&BranchState::from_sorted_parts(*s.grid(), branches))
}

pub fn measure_position<R: Rng + ?Sized>(s: &BranchState, rng: &mut R) -> Result<(Outcome, BranchState)> {
    let sampler = PositionSampler::new(&pattern(s))?;
    let bin = sampler.sample(rng);
    let outcome = Outcome {
        observable: Observable::Position,
        value: bin as i64,
        timestamp: 0,
    };
    Ok((outcome, collapse_position(s, bin)?))
}

/// Maps a uniform draw to a marker outcome: `+1` when `u < P(+1)`. An
/// outcome with zero probability is never chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerChooser {
    p_plus: f64,
    minus_possible: bool,
}

impl MarkerChooser {
    pub fn choose(&self, u: f64) -> MarkerOutcome {
        if u < self.p_plus || !self.minus_possible {
            MarkerOutcome::Plus
        } else {
            MarkerOutcome::Minus
        }
    }
}

/// A state decomposed along the eigenspaces of a marker observable.
#[derive(Debug, Clone)]
pub struct MarkerSplit {
    grid: GridSpec,
    parts: [Vec<(MarkerLabel, SpatialAmplitude)>; 2],
    weights: [f64; 2],
}

impl MarkerSplit {
    pub fn new(s: &BranchState, op: MarkerObservable) -> Result<Self> {
        let rotated = op.eigenbasis(s)?;
        let mut parts: [Vec<_>; 2] = [Vec::new(), Vec::new()];
        let mut weights = [0.0; 2];
        for (label, psi) in rotated.branches() {
            let k = op.eigenvalue(*label).expect("eigenbasis checked").index();
            weights[k] += psi.norm_sqr();
            parts[k].push((*label, psi.clone()));
        }
        Ok(Self {
            grid: *s.grid(),
            parts,
            weights,
        })
    }

    /// Born probability of `outcome`.
    pub fn probability(&self, outcome: MarkerOutcome) -> f64 {
        let total = self.weights[0] + self.weights[1];
        if total > 0.0 {
            self.weights[outcome.index()] / total
        } else {
            0.0
        }
    }

    pub fn chooser(&self) -> MarkerChooser {
        MarkerChooser {
            p_plus: self.probability(MarkerOutcome::Plus),
            minus_possible: self.weights[1] > 0.0,
        }
    }

    pub fn choose(&self, u: f64) -> MarkerOutcome {
        self.chooser().choose(u)
    }

    pub fn collapse(&self, outcome: MarkerOutcome) -> Result<BranchState> {
        let branches = self.parts[outcome.index()].clone();
        if branches.is_empty() {
            return Err(Error::EmptyEnsemble(outcome.value()));
        }
        normalize(&BranchState::new(self.grid, branches)?)
    }
}

pub fn measure_marker<R: Rng + ?Sized>(
    s: &BranchState,
    op: MarkerObservable,
    rng: &mut R,
) -> Result<(Outcome, BranchState)> {
    let split = MarkerSplit::new(s, op)?;
    let value = split.choose(rng.random::<f64>());
    let outcome = Outcome {
        observable: Observable::Marker(op),
        value: value.value() as i64,
        timestamp: 0,
    };
    Ok((outcome, split.collapse(value)?))
}

/// Order in which position and marker are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementOrder {
    /// Position first, then the marker.
    A1,
    /// Marker first, then position.
    A2,
}

/// Joint probability mass over (bin, marker outcome).
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    grid: GridSpec,
    observable: MarkerObservable,
    masses: Vec<[f64; 2]>,
}

impl JointTable {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn observable(&self) -> MarkerObservable {
        self.observable
    }

    pub fn mass(&self, bin: usize, outcome: MarkerOutcome) -> f64 {
        self.masses[bin][outcome.index()]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().map(|m| m[0] + m[1]).sum()
    }

    pub fn marker_marginal(&self, outcome: MarkerOutcome) -> f64 {
        self.masses.iter().map(|m| m[outcome.index()]).sum()
    }

    /// Density obtained by summing over marker outcomes.
    pub fn position_marginal(&self) -> Density {
        let dx = self.grid.dx();
        let values = self.masses.iter().map(|m| (m[0] + m[1]) / dx).collect();
        Density::new(self.grid, values).expect("table matches grid")
    }

    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .masses
            .iter()
            .zip(&other.masses)
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max))
    }
}

/// `p(bin, outcome)` computed through the chain rule in the given order:
/// `A1` as `p(bin) p(outcome | bin)`, `A2` as `p(outcome) p(bin | outcome)`.
pub fn joint_distribution(
    s: &BranchState,
    op: MarkerObservable,
    order: MeasurementOrder,
) -> Result<JointTable> {
    let grid = *s.grid();
    let mut masses = vec![[0.0; 2]; grid.n_bins()];
    match order {
        MeasurementOrder::A1 => {
            let p_bin = pattern(s).masses();
            for (bin, &p) in p_bin.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                let split = MarkerSplit::new(&collapse_position(s, bin)?, op)?;
                for outcome in MarkerOutcome::BOTH {
                    masses[bin][outcome.index()] = p * split.probability(outcome);
                }
            }
        }
        MeasurementOrder::A2 => {
            let split = MarkerSplit::new(s, op)?;
            for outcome in MarkerOutcome::BOTH {
                let p = split.probability(outcome);
                if p <= 0.0 {
                    continue;
                }
                let conditional = pattern(&split.collapse(outcome)?).masses();
                for (bin, q) in conditional.into_iter().enumerate() {
                    masses[bin][outcome.index()] = p * q;
                }
            }
        }
    }
    Ok(JointTable {
        grid,
        observable: op,
        masses,
    })
}

/// Joint density of detecting the atom at `x` together with `outcome`. The
/// two outcomes' densities add up to the unconditioned pattern.
pub fn conditional_pattern(table: &JointTable, outcome: MarkerOutcome) -> Result<Density> {
    if !(table.marker_marginal(outcome) > 0.0) {
        return Err(Error::EmptyEnsemble(outcome.value()));
    }
    let dx = table.grid.dx();
    let values = table.masses.iter().map(|m| m[outcome.index()] / dx).collect();
    Density::new(table.grid, values)
}

/// Same as [`conditional_pattern`] but normalized within the sub-ensemble.
pub fn normalized_conditional_pattern(table: &JointTable, outcome: MarkerOutcome) -> Result<Density> {
    let joint = conditional_pattern(table, outcome)?;
    Ok(joint.scaled(table.marker_marginal(outcome).recip()))
}
