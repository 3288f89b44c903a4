//! Run configuration: command-line flags layered over an optional
//! `key=value` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use eraser::{GridSpec, MeasurementOrder, Scenario, ScenarioId, SlitGeometry};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Scenario id (I, IIa, IIb, IIc, IIIa, IIIb, IIIc, IVa, IVb)
    #[arg(long)]
    pub scenario: Option<String>,
    /// Number of simulated runs
    #[arg(long)]
    pub events: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Detection-screen bins
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub wavelength: Option<f64>,
    #[arg(long = "slit-sep")]
    pub slit_sep: Option<f64>,
    #[arg(long = "slit-width")]
    pub slit_width: Option<f64>,
    #[arg(long = "screen-dist")]
    pub screen_dist: Option<f64>,
    /// Readout order a1 (position first) or a2 (marker first); scenario III only
    #[arg(long)]
    pub ordering: Option<String>,
    /// Output file for patterns or histograms (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output file for the JSON report (stdout when absent)
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// key=value file; flags given on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const KEYS: [&str; 13] = [
    "scenario",
    "events",
    "seed",
    "bins",
    "xmin",
    "xmax",
    "wavelength",
    "slit-sep",
    "slit-width",
    "screen-dist",
    "ordering",
    "out",
    "report",
];

pub const DEFAULT_EVENTS: u64 = 1_000_000;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub geometry: SlitGeometry,
    /// `None` when neither flag nor file set it.
    pub n_events: Option<u64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("{}:{}: unknown key '{key}'", path.display(), n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("bad value '{v}' for {key}"))))
        .transpose()
}

impl Flags {
    /// Resolves flags, config file and defaults into a validated config.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => parse_file(path)?,
            None => BTreeMap::new(),
        };
        let scenario: String = pick(self.scenario, &file, "scenario")?
            .ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
        let id: ScenarioId = scenario.parse().map_err(|e: eraser::Error| CliError::Usage(e.to_string()))?;
        let ordering: Option<String> = pick(self.ordering, &file, "ordering")?;
        let order = match ordering.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None => MeasurementOrder::A1,
            Some(_) if !id.is_shutter_family() => {
                return Err(CliError::Usage(format!("--ordering applies to scenarios IIIa/IIIb/IIIc only, not {id}")))
            }
            Some("a1") => MeasurementOrder::A1,
            Some("a2") => MeasurementOrder::A2,
            Some(other) => return Err(CliError::Usage(format!("unknown ordering '{other}' (expected a1 or a2)"))),
        };
        let scenario = Scenario::with_order(id, order).map_err(|e| CliError::Usage(e.to_string()))?;

        let defaults = SlitGeometry::default();
        let grid = defaults.grid();
        let grid = GridSpec::new(
            pick(self.xmin, &file, "xmin")?.unwrap_or(grid.x_min()),
            pick(self.xmax, &file, "xmax")?.unwrap_or(grid.x_max()),
            pick(self.bins, &file, "bins")?.unwrap_or(grid.n_bins()),
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;
        let geometry = SlitGeometry::new(
            pick(self.wavelength, &file, "wavelength")?.unwrap_or(defaults.wavelength()),
            pick(self.slit_sep, &file, "slit-sep")?.unwrap_or(defaults.slit_separation()),
            pick(self.slit_width, &file, "slit-width")?.unwrap_or(defaults.slit_width()),
            pick(self.screen_dist, &file, "screen-dist")?.unwrap_or(defaults.screen_distance()),
            grid,
        )
        .map_err(|e| CliError::Usage(e.to_string()))?;

        let n_events = pick(self.events, &file, "events")?;
        if n_events == Some(0) {
            return Err(CliError::Usage("--events must be positive".into()));
        }
        Ok(RunConfig {
            scenario,
            geometry,
            n_events,
            seed: pick(self.seed, &file, "seed")?.unwrap_or(0),
            out: pick(self.out, &file, "out")?,
            report: pick(self.report, &file, "report")?,
        })
    }
}
