//! The nine catalogued experimental situations, as executable event
//! timelines with closed-form reference densities.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::dynamics::{open_shutters, prepare, remove_plate, PreparationConfig};
use crate::error::{Error, Result};
use crate::hilbert::BranchState;
use crate::measurement::{
    measure_marker, measure_position, MarkerObservable, MarkerOutcome, MeasurementOrder,
};
use crate::optics::{diffracted_amplitude, Density, Slit, SlitGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    I,
    IIa,
    IIb,
    IIc,
    IIIa,
    IIIb,
    IIIc,
    IVa,
    IVb,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 9] = [
        ScenarioId::I,
        ScenarioId::IIa,
        ScenarioId::IIb,
        ScenarioId::IIc,
        ScenarioId::IIIa,
        ScenarioId::IIIb,
        ScenarioId::IIIc,
        ScenarioId::IVa,
        ScenarioId::IVb,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioId::I => "I",
            ScenarioId::IIa => "IIa",
            ScenarioId::IIb => "IIb",
            ScenarioId::IIc => "IIc",
            ScenarioId::IIIa => "IIIa",
            ScenarioId::IIIb => "IIIb",
            ScenarioId::IIIc => "IIIc",
            ScenarioId::IVa => "IVa",
            ScenarioId::IVb => "IVb",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ScenarioId::I => "laser off; detection plate only",
            ScenarioId::IIa => "laser on, shutters closed; detection plate only",
            ScenarioId::IIb => "laser on, shutters closed; photon found in cavity 1",
            ScenarioId::IIc => "laser on, shutters closed; photon found in cavity 2",
            ScenarioId::IIIa => "laser on, shutters open; detection plate only",
            ScenarioId::IIIb => "laser on, shutters open; detector wall excited",
            ScenarioId::IIIc => "laser on, shutters open; detector wall in ground state",
            ScenarioId::IVa => "plate between cavities removed while the atom is in flight",
            ScenarioId::IVb => "plate between cavities removed after detection",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            ScenarioId::I => "(1/2)[|psi1|^2 + |psi2|^2 + 2Re(psi1* psi2)]",
            ScenarioId::IIa | ScenarioId::IIIa | ScenarioId::IVb => "(1/2)[|psi1|^2 + |psi2|^2]",
            ScenarioId::IIb => "(1/2)|psi1|^2",
            ScenarioId::IIc => "(1/2)|psi2|^2",
            ScenarioId::IIIb => "(1/4)[|psi1|^2 + |psi2|^2 + 2Re(psi1* psi2)]",
            ScenarioId::IIIc => "(1/4)[|psi1|^2 + |psi2|^2 - 2Re(psi1* psi2)]",
            ScenarioId::IVa => "(1/2){|psi1|^2 + |psi2|^2 + 2Re(psi1* psi2)}",
        }
    }

    /// Shutters-open family, the only one with a choice of readout order.
    pub fn is_shutter_family(self) -> bool {
        matches!(self, ScenarioId::IIIa | ScenarioId::IIIb | ScenarioId::IIIc)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown scenario id '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    /// Atom leaves the slits; the plate starts in place.
    Prepare { laser_on: bool },
    OpenShutters,
    RemovePlate,
    DetectAtom,
    MeasureMarker(MarkerObservable),
}

impl Event {
    fn is_measurement(self) -> bool {
        matches!(self, Event::DetectAtom | Event::MeasureMarker(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    id: ScenarioId,
    timeline: Vec<Event>,
    conditioning: Option<MarkerOutcome>,
}

impl Scenario {
    pub fn new(id: ScenarioId, timeline: Vec<Event>, conditioning: Option<MarkerOutcome>) -> Result<Self> {
        let invalid = |msg: &str| Err(Error::Validation(format!("scenario {id}: {msg}")));
        if !matches!(timeline.first(), Some(Event::Prepare { .. })) {
            return invalid("timeline must start with a preparation");
        }
        if timeline[1..].iter().any(|e| matches!(e, Event::Prepare { .. })) {
            return invalid("only one preparation per run");
        }
        let position_of = |target: Event| timeline.iter().position(|e| *e == target);
        let detect = match timeline.iter().filter(|e| **e == Event::DetectAtom).count() {
            1 => position_of(Event::DetectAtom).unwrap(),
            _ => return invalid("exactly one atom detection per run"),
        };
        let markers = timeline.iter().filter(|e| matches!(e, Event::MeasureMarker(_))).count();
        if markers > 1 {
            return invalid("at most one marker measurement per run");
        }
        if conditioning.is_some() && markers == 0 {
            return invalid("conditioning needs a marker measurement");
        }
        match id {
            ScenarioId::IVa | ScenarioId::IVb => {
                let Some(removal) = position_of(Event::RemovePlate) else {
                    return invalid("plate removal missing");
                };
                if id == ScenarioId::IVa && removal > detect {
                    return invalid("plate must be removed before detection");
                }
                if id == ScenarioId::IVb && removal < detect {
                    return invalid("plate must be removed after detection");
                }
            }
            _ if id.is_shutter_family() => {
                let first_measurement = timeline.iter().position(|e| e.is_measurement()).unwrap();
                match position_of(Event::OpenShutters) {
                    Some(open) if open < first_measurement => {}
                    _ => return invalid("shutters must open before any measurement"),
                }
            }
            _ => {}
        }
        Ok(Self {
            id,
            timeline,
            conditioning,
        })
    }

    /// Canonical timeline of `id`, reading position before the marker.
    pub fn catalog(id: ScenarioId) -> Self {
        Self::with_order(id, MeasurementOrder::A1).expect("catalog timelines are valid")
    }

    /// Canonical timeline with an explicit readout order. Only the
    /// shutters-open family accepts `A2`.
    pub fn with_order(id: ScenarioId, order: MeasurementOrder) -> Result<Self> {
        use Event::*;
        if order == MeasurementOrder::A2 && !id.is_shutter_family() {
            return Err(Error::Validation(format!(
                "readout order applies to the shutters-open scenarios only, not {id}"
            )));
        }
        let on = Prepare { laser_on: true };
        let perp = MeasureMarker(MarkerObservable::SigmaPerp);
        let par = MeasureMarker(MarkerObservable::SigmaParallel);
        let ordered = |marker: Event| match order {
            MeasurementOrder::A1 => vec![DetectAtom, marker],
            MeasurementOrder::A2 => vec![marker, DetectAtom],
        };
        let (timeline, conditioning) = match id {
            ScenarioId::I => (vec![Prepare { laser_on: false }, DetectAtom], None),
            ScenarioId::IIa => (vec![on, DetectAtom], None),
            ScenarioId::IIb => ([vec![on], ordered(par)].concat(), Some(MarkerOutcome::Plus)),
            ScenarioId::IIc => ([vec![on], ordered(par)].concat(), Some(MarkerOutcome::Minus)),
            ScenarioId::IIIa => (vec![on, OpenShutters, DetectAtom], None),
            ScenarioId::IIIb => ([vec![on, OpenShutters], ordered(perp)].concat(), Some(MarkerOutcome::Plus)),
            ScenarioId::IIIc => ([vec![on, OpenShutters], ordered(perp)].concat(), Some(MarkerOutcome::Minus)),
            ScenarioId::IVa => (vec![on, RemovePlate, DetectAtom], None),
            ScenarioId::IVb => (vec![on, DetectAtom, RemovePlate], None),
        };
        Self::new(id, timeline, conditioning)
    }

    pub fn id(&self) -> ScenarioId {
        self.id
    }

    pub fn timeline(&self) -> &[Event] {
        &self.timeline
    }

    pub fn conditioning(&self) -> Option<MarkerOutcome> {
        self.conditioning
    }

    /// Whether a run produces a marker outcome.
    pub fn measures_marker(&self) -> bool {
        self.timeline.iter().any(|e| matches!(e, Event::MeasureMarker(_)))
    }
}

/// Closed-form detection density of a scenario. Conditioned scenarios
/// return joint densities (they integrate to the outcome probability).
pub fn analytic_pattern(id: ScenarioId, geom: &SlitGeometry) -> Density {
    let psi1 = diffracted_amplitude(geom, Slit::One);
    let psi2 = diffracted_amplitude(geom, Slit::Two);
    let terms = psi1.values().iter().zip(psi2.values()).map(|(a, b)| {
        (a.norm_sqr(), b.norm_sqr(), 2.0 * (a.conj() * b).re)
    });
    let values: Vec<f64> = match id {
        ScenarioId::I | ScenarioId::IVa => {
            let raw: Vec<f64> = terms.map(|(p1, p2, cross)| 0.5 * (p1 + p2 + cross)).collect();
            // on a finite window the slit amplitudes are not exactly orthogonal
            let z = raw.iter().sum::<f64>() * geom.grid().dx();
            raw.into_iter().map(|p| p / z).collect()
        }
        ScenarioId::IIa | ScenarioId::IIIa | ScenarioId::IVb => {
            terms.map(|(p1, p2, _)| 0.5 * (p1 + p2)).collect()
        }
        ScenarioId::IIb => terms.map(|(p1, _, _)| 0.5 * p1).collect(),
        ScenarioId::IIc => terms.map(|(_, p2, _)| 0.5 * p2).collect(),
        ScenarioId::IIIb => terms.map(|(p1, p2, cross)| 0.25 * (p1 + p2 + cross)).collect(),
        ScenarioId::IIIc => terms.map(|(p1, p2, cross)| 0.25 * (p1 + p2 - cross)).collect(),
    };
    Density::new(*geom.grid(), values).expect("grid-sized density")
}

/// Outcome of one run: where the atom landed and, if read, the marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DetectionRecord {
    pub scenario: ScenarioId,
    pub bin: usize,
    pub marker: Option<MarkerOutcome>,
}

/// Applies a non-measurement event. `detected` is true once the atom has
/// hit the plate.
pub(crate) fn apply_map(
    event: Event,
    state: Option<&BranchState>,
    geom: &SlitGeometry,
    detected: bool,
) -> Result<BranchState> {
    match (event, state) {
        (Event::Prepare { laser_on }, None) => prepare(&PreparationConfig {
            laser_on,
            plate_in: true,
            geom: *geom,
        }),
        (Event::Prepare { .. }, Some(_)) => Err(Error::ProtocolOrder("second preparation".into())),
        (_, None) => Err(Error::ProtocolOrder(format!("{event:?} before preparation"))),
        (Event::OpenShutters, Some(s)) => open_shutters(s),
        (Event::RemovePlate, Some(s)) => match remove_plate(s) {
            // the record is already fixed; a vanishing merged amplitude at
            // the detected bin leaves nothing to relabel
            Err(Error::DegenerateState) if detected => Ok(s.clone()),
            other => other,
        },
        (Event::DetectAtom | Event::MeasureMarker(_), Some(_)) => {
            unreachable!("measurements are not maps")
        }
    }
}

/// Executes one run of `sc`, drawing one uniform variate per measurement in
/// timeline order.
pub fn run_timeline<R: Rng + ?Sized>(sc: &Scenario, geom: &SlitGeometry, rng: &mut R) -> Result<DetectionRecord> {
    let mut state: Option<BranchState> = None;
    let mut bin = None;
    let mut marker = None;
    for event in &sc.timeline {
        let next = match *event {
            Event::DetectAtom => {
                let current = state.as_ref().ok_or_else(|| Error::ProtocolOrder("detection before preparation".into()))?;
                let (outcome, collapsed) = measure_position(current, rng)?;
                bin = Some(outcome.value as usize);
                collapsed
            }
            Event::MeasureMarker(op) => {
                let current = state.as_ref().ok_or_else(|| Error::ProtocolOrder("marker read before preparation".into()))?;
                let (outcome, collapsed) = measure_marker(current, op, rng)?;
                marker = outcome.marker();
                collapsed
            }
            map => apply_map(map, state.as_ref(), geom, bin.is_some())?,
        };
        state = Some(next);
    }
    Ok(DetectionRecord {
        scenario: sc.id,
        bin: bin.expect("scenario invariants guarantee one detection"),
        marker,
    })
}
