//! Seeded high-volume sampling, histogram accumulation and goodness-of-fit.

use crate::error::{Error, Result};
use crate::fringe::count_visibility;
use crate::grid::GridSpec;
use crate::hilbert::BranchState;
use crate::measurement::{collapse_position, MarkerChooser, MarkerOutcome, MarkerSplit, PositionSampler};
use crate::optics::{pattern, Density, SlitGeometry};
use crate::scenario::{apply_map, DetectionRecord, Event, Scenario, ScenarioId};
use crate::stream::StreamFactory;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Trials handed to one worker at a time.
const CHUNK: u64 = 8192;

/// Minimum expected count per chi-square cell.
pub const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;

/// Detection counts of one conditioning class.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    grid: GridSpec,
    counts: Vec<u64>,
    /// Trials in the run the class was drawn from.
    n_trials: u64,
    conditioning: Option<MarkerOutcome>,
    scenario: Option<ScenarioId>,
}

impl Histogram {
    pub fn new(
        grid: GridSpec,
        counts: Vec<u64>,
        n_trials: u64,
        conditioning: Option<MarkerOutcome>,
        scenario: Option<ScenarioId>,
    ) -> Result<Self> {
        if counts.len() != grid.n_bins() {
            return Err(Error::Dimension(format!(
                "{} counts for a {}-bin grid",
                counts.len(),
                grid.n_bins()
            )));
        }
        let h = Self {
            grid,
            counts,
            n_trials,
            conditioning,
            scenario,
        };
        if h.n_events() > n_trials {
            return Err(Error::Validation(format!(
                "{} events exceed the {n_trials} trials of the run",
                h.n_events()
            )));
        }
        Ok(h)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Events in this histogram (the sub-ensemble size when conditioned).
    pub fn n_events(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    pub fn conditioning(&self) -> Option<MarkerOutcome> {
        self.conditioning
    }

    pub fn scenario(&self) -> Option<ScenarioId> {
        self.scenario
    }

    /// Adds the counts of a partial histogram of the same class.
    pub fn merge(&mut self, other: &Histogram) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.conditioning != other.conditioning {
            return Err(Error::Validation("cannot merge different conditioning classes".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n_trials += other.n_trials;
        Ok(())
    }

    /// Empirical mass per bin relative to the whole run.
    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n_trials as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    pub fn fringe_visibility(&self, geom: &SlitGeometry) -> f64 {
        count_visibility(&self.counts, &self.grid, geom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub scenario: Option<ScenarioId>,
    pub conditioning: Option<MarkerOutcome>,
    pub n_events: u64,
    pub n_trials: u64,
    pub tv_distance: f64,
    pub chi_square: f64,
    pub dof: usize,
}

/// Compares counts with a reference density. Frequencies are taken relative
/// to the whole run, so a conditioned histogram is matched against the
/// joint density of its class.
pub fn compare(h: &Histogram, reference: &Density) -> Result<ComparisonReport> {
    h.grid.ensure_same(reference.grid())?;
    if h.n_events() == 0 {
        return Err(Error::Validation("histogram holds no events".into()));
    }
    let n = h.n_trials as f64;
    let expected_mass = reference.masses();
    let tv = 0.5
        * h.counts
            .iter()
            .zip(&expected_mass)
            .map(|(&c, &p)| (c as f64 / n - p).abs())
            .sum::<f64>();

    // walk left to right, closing a cell once it expects enough counts; a
    // short tail joins the last closed cell
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &p) in h.counts.iter().zip(&expected_mass) {
        obs += c as f64;
        exp += n * p;
        if exp >= CHI_SQUARE_MIN_EXPECTED {
            cells.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => cells.push((obs, exp)),
        }
    }
    let chi_square = cells
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e).powi(2) / e)
        .sum();
    Ok(ComparisonReport {
        scenario: h.scenario,
        conditioning: h.conditioning,
        n_events: h.n_events(),
        n_trials: h.n_trials,
        tv_distance: tv.clamp(0.0, 1.0),
        chi_square,
        dof: cells.len().saturating_sub(1),
    })
}

/// Per-class histograms of one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub scenario: ScenarioId,
    pub seed: u64,
    pub n_trials: u64,
    pub histograms: Vec<Histogram>,
}

impl Simulation {
    pub fn class(&self, conditioning: Option<MarkerOutcome>) -> Option<&Histogram> {
        self.histograms.iter().find(|h| h.conditioning == conditioning)
    }

    /// The histogram matching the scenario's own conditioning.
    pub fn primary(&self, sc: &Scenario) -> Option<&Histogram> {
        self.class(sc.conditioning())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Backend::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Backend::Sequential
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf,
    Position {
        sampler: PositionSampler,
        /// One continuation per bin; bins without mass hold `Leaf`.
        next: Vec<Node>,
    },
    Marker {
        chooser: MarkerChooser,
        next: Box<[Node; 2]>,
    },
}

/// A scenario unrolled into a sampling tree. Deterministic maps are applied
/// once; every measurement stores the exact sampler `run_timeline` would
/// build at that point, so a plan fed the same stream reproduces
/// `run_timeline` draw for draw.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    scenario: ScenarioId,
    root: Node,
}

impl TrialPlan {
    pub fn compile(sc: &Scenario, geom: &SlitGeometry) -> Result<Self> {
        let root = compile_node(sc.timeline(), None, geom, false)?;
        Ok(Self {
            scenario: sc.id(),
            root,
        })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> DetectionRecord {
        let mut node = &self.root;
        let mut bin = None;
        let mut marker = None;
        loop {
            match node {
                Node::Leaf => break,
                Node::Position { sampler, next } => {
                    let b = sampler.sample(rng);
                    bin = Some(b);
                    node = &next[b];
                }
                Node::Marker { chooser, next } => {
                    let outcome = chooser.choose(rng.random::<f64>());
                    marker = Some(outcome);
                    node = &next[outcome_slot(outcome)];
                }
            }
        }
        DetectionRecord {
            scenario: self.scenario,
            bin: bin.expect("scenario invariants guarantee one detection"),
            marker,
        }
    }
}

fn outcome_slot(o: MarkerOutcome) -> usize {
    match o {
        MarkerOutcome::Plus => 0,
        MarkerOutcome::Minus => 1,
    }
}

fn compile_node(
    events: &[Event],
    state: Option<BranchState>,
    geom: &SlitGeometry,
    detected: bool,
) -> Result<Node> {
    let Some((&event, rest)) = events.split_first() else {
        return Ok(Node::Leaf);
    };
    match event {
        Event::DetectAtom => {
            let s = state.ok_or_else(|| Error::ProtocolOrder("detection before preparation".into()))?;
            let masses = pattern(&s).masses();
            let sampler = PositionSampler::new(&pattern(&s))?;
            let next = masses
                .iter()
                .enumerate()
                .map(|(bin, &m)| {
                    if m > 0.0 {
                        compile_node(rest, Some(collapse_position(&s, bin)?), geom, true)
                    } else {
                        Ok(Node::Leaf)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Node::Position { sampler, next })
        }
        Event::MeasureMarker(op) => {
            let s = state.ok_or_else(|| Error::ProtocolOrder("marker read before preparation".into()))?;
            let split = MarkerSplit::new(&s, op)?;
            let branch = |o: MarkerOutcome| -> Result<Node> {
                if split.probability(o) > 0.0 {
                    compile_node(rest, Some(split.collapse(o)?), geom, detected)
                } else {
                    Ok(Node::Leaf)
                }
            };
            Ok(Node::Marker {
                chooser: split.chooser(),
                next: Box::new([branch(MarkerOutcome::Plus)?, branch(MarkerOutcome::Minus)?]),
            })
        }
        map => {
            let next = apply_map(map, state.as_ref(), geom, detected)?;
            compile_node(rest, Some(next), geom, detected)
        }
    }
}

/// Runs `n_events` trials of `sc` with the default backend.
pub fn simulate(sc: &Scenario, geom: &SlitGeometry, n_events: u64, seed: u64) -> Result<Simulation> {
    simulate_with(sc, geom, n_events, seed, Backend::default())
}

/// Runs `n_events` trials; trial `k` draws from `trial_stream(seed, k)`.
/// Histograms are identical for every backend and worker count.
pub fn simulate_with(
    sc: &Scenario,
    geom: &SlitGeometry,
    n_events: u64,
    seed: u64,
    backend: Backend,
) -> Result<Simulation> {
    if n_events == 0 {
        return Err(Error::Validation("a run needs at least one trial".into()));
    }
    let plan = TrialPlan::compile(sc, geom)?;
    let classes: Vec<Option<MarkerOutcome>> = if sc.measures_marker() {
        MarkerOutcome::BOTH.iter().copied().map(Some).collect()
    } else {
        vec![None]
    };
    let n_bins = geom.grid().n_bins();
    let streams = StreamFactory::new(seed);
    let n_chunks = n_events.div_ceil(CHUNK);

    let chunk_counts = |chunk: u64| -> Vec<Vec<u64>> {
        let mut counts = vec![vec![0u64; n_bins]; classes.len()];
        let end = ((chunk + 1) * CHUNK).min(n_events);
        for trial in chunk * CHUNK..end {
            let record = plan.sample(&mut streams.stream(trial));
            let class = classes
                .iter()
                .position(|c| *c == record.marker)
                .expect("record class is one of the scenario classes");
            counts[class][record.bin] += 1;
        }
        counts
    };
    let add = |mut a: Vec<Vec<u64>>, b: Vec<Vec<u64>>| {
        for (row_a, row_b) in a.iter_mut().zip(b) {
            for (x, y) in row_a.iter_mut().zip(row_b) {
                *x += y;
            }
        }
        a
    };
    let zero = || vec![vec![0u64; n_bins]; classes.len()];

    let totals = match backend {
        Backend::Sequential => (0..n_chunks).map(chunk_counts).fold(zero(), add),
        #[cfg(feature = "parallel")]
        Backend::Parallel => (0..n_chunks).into_par_iter().map(chunk_counts).reduce(zero, add),
    };

    let histograms = classes
        .into_iter()
        .zip(totals)
        .map(|(class, counts)| Histogram::new(*geom.grid(), counts, n_events, class, Some(sc.id())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Simulation {
        scenario: sc.id(),
        seed,
        n_trials: n_events,
        histograms,
    })
}
