//! File formats: pattern and histogram CSV, JSON report.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use eraser::{Density, GridSpec, Histogram, MarkerOutcome};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: String,
    pub n_events: u64,
    pub seed: u64,
    pub tv_distance: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub fringe_visibility: f64,
    pub pass: bool,
}

/// 17 significant digits, so values survive a text round trip.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn pattern_csv(density: &Density, outcome: Option<MarkerOutcome>) -> String {
    let mut s = String::from("x,probability_density");
    if outcome.is_some() {
        s.push_str(",outcome");
    }
    s.push('\n');
    for (x, p) in density.grid().centers().zip(density.values()) {
        let _ = write!(s, "{},{}", float(x), float(*p));
        if let Some(o) = outcome {
            let _ = write!(s, ",{o}");
        }
        s.push('\n');
    }
    s
}

pub fn histogram_csv(histograms: &[Histogram]) -> String {
    let conditioned = histograms.iter().any(|h| h.conditioning().is_some());
    let mut s = String::from(if conditioned { "x,count,outcome\n" } else { "x,count\n" });
    for h in histograms {
        for (x, c) in h.grid().centers().zip(h.counts()) {
            let _ = write!(s, "{},{c}", float(x));
            if let Some(o) = h.conditioning() {
                let _ = write!(s, ",{o}");
            }
            s.push('\n');
        }
    }
    s
}

/// Per-class counts read back from a histogram CSV, in file order.
pub struct CountTable {
    pub classes: Vec<(Option<MarkerOutcome>, Vec<u64>)>,
}

impl CountTable {
    pub fn total(&self) -> u64 {
        self.classes.iter().flat_map(|(_, c)| c).sum()
    }

    pub fn class(&self, outcome: Option<MarkerOutcome>) -> Option<&[u64]> {
        self.classes.iter().find(|(o, _)| *o == outcome).map(|(_, c)| c.as_slice())
    }
}

pub fn parse_histogram_csv(text: &str, grid: &GridSpec) -> Result<CountTable, CliError> {
    let bad = |line: usize, msg: &str| CliError::Usage(format!("histogram line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, h)| h.trim()).unwrap_or_default();
    let with_outcome = match header {
        "x,count" => false,
        "x,count,outcome" => true,
        _ => return Err(bad(1, "expected header 'x,count[,outcome]'")),
    };
    let mut classes: Vec<(Option<MarkerOutcome>, Vec<u64>)> = Vec::new();
    for (n, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 + usize::from(with_outcome) {
            return Err(bad(n + 1, "wrong number of columns"));
        }
        let x: f64 = fields[0].parse().map_err(|_| bad(n + 1, "bad x"))?;
        let count: u64 = fields[1].parse().map_err(|_| bad(n + 1, "bad count"))?;
        let outcome = if with_outcome {
            let v: i8 = fields[2].parse().map_err(|_| bad(n + 1, "bad outcome"))?;
            Some(MarkerOutcome::from_value(v).ok_or_else(|| bad(n + 1, "outcome must be +1 or -1"))?)
        } else {
            None
        };
        let idx = match classes.iter().position(|(o, _)| *o == outcome) {
            Some(i) => i,
            None => {
                classes.push((outcome, Vec::with_capacity(grid.n_bins())));
                classes.len() - 1
            }
        };
        let counts = &mut classes[idx].1;
        let bin = counts.len();
        if bin >= grid.n_bins() || (x - grid.center(bin)).abs() > 1e-9 * grid.dx().max(x.abs()) {
            return Err(bad(n + 1, "x does not match the configured grid"));
        }
        counts.push(count);
    }
    if classes.is_empty() || classes.iter().any(|(_, c)| c.len() != grid.n_bins()) {
        return Err(CliError::Usage(format!(
            "histogram does not cover the {}-bin grid",
            grid.n_bins()
        )));
    }
    Ok(CountTable { classes })
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| CliError::Io(format!("writing stdout: {e}"))),
    }
}
