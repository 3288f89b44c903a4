//! Preparation and marker maps: laser tagging, shutter opening, plate removal.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_marker_unitary, merge_labels, normalize, BasisFamily, BranchState, Cavity, MarkerLabel,
    MarkerUnitary, SpatialAmplitude, Wall,
};
use crate::optics::{diffracted_amplitude, Slit, SlitGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationConfig {
    pub laser_on: bool,
    /// Ignored when the laser is off.
    pub plate_in: bool,
    pub geom: SlitGeometry,
}

/// State of atom and marker once the atom has left the slits.
///
/// With the plate out at emission time the photon is born in the merged
/// cavity, which is the same state as tagging and then removing the plate.
pub fn prepare(cfg: &PreparationConfig) -> Result<BranchState> {
    let psi1 = diffracted_amplitude(&cfg.geom, Slit::One);
    let psi2 = diffracted_amplitude(&cfg.geom, Slit::Two);
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    if !cfg.laser_on {
        let sum = add(&psi1.scaled(half), &psi2.scaled(half));
        let state = BranchState::single(MarkerLabel::new(Cavity::None, Wall::G), sum);
        return normalize(&state);
    }
    let tagged = normalize(&BranchState::new(
        *cfg.geom.grid(),
        vec![
            (MarkerLabel::new(Cavity::C1, Wall::G), psi1.scaled(half)),
            (MarkerLabel::new(Cavity::C2, Wall::G), psi2.scaled(half)),
        ],
    )?)?;
    if cfg.plate_in {
        Ok(tagged)
    } else {
        remove_plate(&tagged)
    }
}

fn add(a: &SpatialAmplitude, b: &SpatialAmplitude) -> SpatialAmplitude {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect();
    SpatialAmplitude::new(*a.grid(), values).expect("same grid")
}

/// Lets the detector wall interact with the cavities. Only the symmetric
/// photon state couples: `(Plus,G) -> (Vac,E)`, `(Minus,G)` is untouched.
pub fn open_shutters(s: &BranchState) -> Result<BranchState> {
    if s.labels().any(|l| l.wall == Wall::E) {
        return Err(Error::ProtocolOrder(
            "shutters opened with the detector wall already excited".into(),
        ));
    }
    if let Some(label) = s.labels().find(|l| l.cavity.family().is_none()) {
        return Err(Error::ProtocolOrder(format!(
            "shutters need a photon in the two-cavity marker, found {label}"
        )));
    }
    let symmetric = match s.family()? {
        Some(BasisFamily::Path) => apply_marker_unitary(s, &MarkerUnitary::path_to_symmetric(Wall::G))?,
        _ => s.clone(),
    };
    let branches = symmetric
        .into_branches()
        .into_iter()
        .map(|(label, psi)| match label.cavity {
            Cavity::Plus => (MarkerLabel::new(Cavity::Vac, Wall::E), psi),
            _ => (label, psi),
        })
        .collect();
    BranchState::new(*s.grid(), branches)
}

/// Removes the plate between the cavities, merging `C1` and `C2` into the
/// single-cavity label `T`. A state without `C1`/`C2` labels is returned
/// unchanged.
pub fn remove_plate(s: &BranchState) -> Result<BranchState> {
    if let Some(label) = s
        .labels()
        .find(|l| matches!(l.cavity, Cavity::Plus | Cavity::Minus | Cavity::Vac))
    {
        return Err(Error::ProtocolOrder(format!(
            "plate removal is defined on the path basis, found {label}"
        )));
    }
    let mut walls = s
        .labels()
        .filter(|l| matches!(l.cavity, Cavity::C1 | Cavity::C2))
        .map(|l| l.wall);
    let Some(wall) = walls.next() else {
        return Ok(s.clone());
    };
    if walls.any(|w| w != wall) {
        return Err(Error::Validation(
            "plate removal needs a uniform detector-wall state".into(),
        ));
    }
    merge_labels(
        s,
        &[MarkerLabel::new(Cavity::C1, wall), MarkerLabel::new(Cavity::C2, wall)],
        MarkerLabel::new(Cavity::T, wall),
    )
}
