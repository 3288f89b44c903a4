//! Branch-decomposed composite states.
//!
//! A composite atom/marker state is stored as `sum_b psi_b(x) (x) |b>` where
//! the marker labels `b` are mutually orthonormal. Spatial parts use the
//! density convention `<psi|psi> = sum_i |psi(x_i)|^2 dx`, so a normalized
//! state has a pattern that integrates to one independent of the bin count.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Tolerance on `U^dagger U = 1` accepted by [`MarkerUnitary::new`].
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialAmplitude {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl SpatialAmplitude {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_bins() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a {}-bin grid",
                values.len(),
                grid.n_bins()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Validation("amplitude contains a non-finite value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_bins()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &SpatialAmplitude) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(sum * self.grid.dx())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &SpatialAmplitude, factor: Complex64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * factor;
        }
    }

    /// Keeps only bin `bin`, zeroing every other entry.
    pub(crate) fn restricted_to(&self, bin: usize) -> Self {
        let mut out = Self::zeros(self.grid);
        out.values[bin] = self.values[bin];
        out
    }
}

/// Photon configuration of the two-cavity marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cavity {
    /// Laser off: the atom carries no marker.
    None,
    /// Photon in cavity 1, none in cavity 2.
    C1,
    /// Photon in cavity 2, none in cavity 1.
    C2,
    /// Both cavities empty (photon absorbed by the detector wall).
    Vac,
    /// One photon in the merged cavity once the separating plate is gone.
    T,
    /// Symmetric combination `(C1 + C2)/sqrt(2)`.
    Plus,
    /// Antisymmetric combination `(C1 - C2)/sqrt(2)`.
    Minus,
}

/// Two-level detector wall between the cavities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Wall {
    G,
    E,
}

/// The two incompatible bases the cavity label may be written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    Path,
    Symmetric,
}

impl Cavity {
    pub const ALL: [Cavity; 7] = [
        Cavity::None,
        Cavity::C1,
        Cavity::C2,
        Cavity::Vac,
        Cavity::T,
        Cavity::Plus,
        Cavity::Minus,
    ];

    pub fn family(self) -> Option<BasisFamily> {
        match self {
            Cavity::C1 | Cavity::C2 => Some(BasisFamily::Path),
            Cavity::Plus | Cavity::Minus => Some(BasisFamily::Symmetric),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkerLabel {
    pub cavity: Cavity,
    pub wall: Wall,
}

impl MarkerLabel {
    pub const fn new(cavity: Cavity, wall: Wall) -> Self {
        Self { cavity, wall }
    }
}

impl fmt::Display for MarkerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.cavity, self.wall)
    }
}

/// `Psi = sum_b psi_b (x) |b>` over pairwise distinct labels, sorted by label.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    grid: GridSpec,
    branches: Vec<(MarkerLabel, SpatialAmplitude)>,
}

impl BranchState {
    pub fn new(grid: GridSpec, mut branches: Vec<(MarkerLabel, SpatialAmplitude)>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Validation("a state needs at least one branch".into()));
        }
        for (_, psi) in &branches {
            grid.ensure_same(psi.grid())?;
        }
        branches.sort_by_key(|(label, _)| *label);
        if let Some(w) = branches.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::LabelCollision(w[0].0));
        }
        let state = Self { grid, branches };
        state.family()?;
        Ok(state)
    }

    pub fn single(label: MarkerLabel, psi: SpatialAmplitude) -> Self {
        Self {
            grid: *psi.grid(),
            branches: vec![(label, psi)],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn branches(&self) -> &[(MarkerLabel, SpatialAmplitude)] {
        &self.branches
    }

    pub fn labels(&self) -> impl Iterator<Item = MarkerLabel> + '_ {
        self.branches.iter().map(|(l, _)| *l)
    }

    pub fn branch(&self, label: MarkerLabel) -> Option<&SpatialAmplitude> {
        self.branches
            .binary_search_by_key(&label, |(l, _)| *l)
            .ok()
            .map(|i| &self.branches[i].1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.branches.iter().map(|(_, psi)| psi.norm_sqr()).sum()
    }

    /// Cavity basis the state is written in; `None` when no label pins one.
    pub fn family(&self) -> Result<Option<BasisFamily>> {
        let mut family = None;
        for f in self.branches.iter().filter_map(|(l, _)| l.cavity.family()) {
            match family {
                None => family = Some(f),
                Some(prev) if prev != f => {
                    return Err(Error::Validation(
                        "C1/C2 and Plus/Minus labels cannot share one state".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(family)
    }

    pub(crate) fn from_sorted_parts(grid: GridSpec, branches: Vec<(MarkerLabel, SpatialAmplitude)>) -> Self {
        debug_assert!(branches.windows(2).all(|w| w[0].0 < w[1].0));
        Self { grid, branches }
    }

    pub(crate) fn into_branches(self) -> Vec<(MarkerLabel, SpatialAmplitude)> {
        self.branches
    }
}

/// Unitary acting on marker labels only: domain label `i` is sent to
/// `sum_j matrix[j][i] |codomain_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkerUnitary {
    domain: Vec<MarkerLabel>,
    codomain: Vec<MarkerLabel>,
    matrix: Vec<Vec<Complex64>>,
}

impl MarkerUnitary {
    pub fn new(
        domain: Vec<MarkerLabel>,
        codomain: Vec<MarkerLabel>,
        matrix: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        let n = domain.len();
        if n == 0 || codomain.len() != n {
            return Err(Error::Validation(
                "unitary needs matching, non-empty domain and codomain".into(),
            ));
        }
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!("unitary matrix must be {n}x{n}")));
        }
        for labels in [&domain, &codomain] {
            let mut sorted = labels.clone();
            sorted.sort();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation("repeated label in unitary".into()));
            }
        }
        let defect = unitarity_defect(&matrix);
        if !(defect < UNITARITY_TOL) {
            return Err(Error::Validation(format!(
                "matrix is not unitary (max |U^dagger U - 1| = {defect:e})"
            )));
        }
        Ok(Self {
            domain,
            codomain,
            matrix,
        })
    }

    /// `(C1, C2) -> (Plus, Minus)` at a fixed wall state.
    pub fn path_to_symmetric(wall: Wall) -> Self {
        Self::hadamard(
            [Cavity::C1, Cavity::C2],
            [Cavity::Plus, Cavity::Minus],
            wall,
        )
    }

    /// `(Plus, Minus) -> (C1, C2)` at a fixed wall state.
    pub fn symmetric_to_path(wall: Wall) -> Self {
        Self::hadamard(
            [Cavity::Plus, Cavity::Minus],
            [Cavity::C1, Cavity::C2],
            wall,
        )
    }

    fn hadamard(from: [Cavity; 2], to: [Cavity; 2], wall: Wall) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            domain: from.iter().map(|&c| MarkerLabel::new(c, wall)).collect(),
            codomain: to.iter().map(|&c| MarkerLabel::new(c, wall)).collect(),
            matrix: vec![vec![h, h], vec![h, -h]],
        }
    }

    pub fn domain(&self) -> &[MarkerLabel] {
        &self.domain
    }

    pub fn codomain(&self) -> &[MarkerLabel] {
        &self.codomain
    }

    pub fn matrix(&self) -> &[Vec<Complex64>] {
        &self.matrix
    }
}

fn unitarity_defect(m: &[Vec<Complex64>]) -> f64 {
    let n = m.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let dot: Complex64 = (0..n).map(|k| m[k][i].conj() * m[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    worst
}

/// `<a|b>`: spatial overlaps summed over labels present in both states.
pub fn inner_product(a: &BranchState, b: &BranchState) -> Result<Complex64> {
    a.grid.ensure_same(&b.grid)?;
    if let (Some(fa), Some(fb)) = (a.family()?, b.family()?) {
        if fa != fb {
            return Err(Error::BasisMismatch);
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (label, psi_a) in &a.branches {
        if let Some(psi_b) = b.branch(*label) {
            total += psi_a.inner(psi_b)?;
        }
    }
    Ok(total)
}

pub fn normalize(s: &BranchState) -> Result<BranchState> {
    let norm_sqr = s.norm_sqr();
    if !(norm_sqr > 0.0 && norm_sqr.is_finite()) {
        return Err(Error::DegenerateState);
    }
    let factor = Complex64::new(norm_sqr.sqrt().recip(), 0.0);
    Ok(BranchState {
        grid: s.grid,
        branches: s
            .branches
            .iter()
            .map(|(l, psi)| (*l, psi.scaled(factor)))
            .collect(),
    })
}

/// Rotates marker labels by `u`. Codomain labels that receive no
/// contribution from the state are not materialized.
pub fn apply_marker_unitary(s: &BranchState, u: &MarkerUnitary) -> Result<BranchState> {
    let mut sources = Vec::with_capacity(u.domain.len());
    for (label, psi) in &s.branches {
        match u.domain.iter().position(|d| d == label) {
            Some(i) => sources.push((i, psi)),
            None => {
                return Err(Error::Validation(format!(
                    "label {label} is outside the unitary's domain"
                )))
            }
        }
    }
    let mut branches = Vec::with_capacity(u.codomain.len());
    for (j, target) in u.codomain.iter().enumerate() {
        let mut acc = SpatialAmplitude::zeros(s.grid);
        let mut touched = false;
        for &(i, psi) in &sources {
            let coeff = u.matrix[j][i];
            if coeff != Complex64::new(0.0, 0.0) {
                acc.add_scaled(psi, coeff);
                touched = true;
            }
        }
        if touched {
            branches.push((*target, acc));
        }
    }
    BranchState::new(s.grid, branches)
}

/// Sums the branches labelled by `from` into a single branch `to` and
/// renormalizes. This map does not preserve inner products.
pub fn merge_labels(s: &BranchState, from: &[MarkerLabel], to: MarkerLabel) -> Result<BranchState> {
    let (merged, kept): (Vec<_>, Vec<_>) = s
        .branches
        .iter()
        .partition(|(label, _)| from.contains(label));
    if merged.is_empty() {
        return Ok(s.clone());
    }
    if kept.iter().any(|(label, _)| *label == to) {
        return Err(Error::LabelCollision(to));
    }
    let mut sum = SpatialAmplitude::zeros(s.grid);
    for (_, psi) in &merged {
        sum.add_scaled(psi, Complex64::new(1.0, 0.0));
    }
    let mut branches: Vec<_> = kept.into_iter().cloned().collect();
    branches.push((to, sum));
    normalize(&BranchState::new(s.grid, branches)?)
}
