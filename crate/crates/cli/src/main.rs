//! `eraser`: list scenarios, write analytic patterns, run and check
//! Monte-Carlo simulations.

mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eraser::{analytic_pattern, compare, simulate, Histogram, MarkerOutcome, ScenarioId};

use config::{Flags, RunConfig, DEFAULT_EVENTS};
use output::Report;

/// A run passes when every class is within this TV distance of its pattern.
const PASS_TV: f64 = 0.02;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    /// The run completed but missed the TV threshold.
    Rejected,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::Rejected => write!(f, "TV distance at or above {PASS_TV}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Rejected => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "eraser", version, about = "Which-way and quantum-eraser double-slit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the scenario catalog
    List,
    /// Write the closed-form detection density as CSV
    Analytic(Flags),
    /// Simulate, write histograms and a comparison report
    Run(Flags),
    /// Compare a histogram CSV written by `run` with the closed form
    Compare {
        /// Histogram CSV
        histogram: std::path::PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

fn list() -> String {
    let mut s = String::new();
    for id in ScenarioId::ALL {
        s.push_str(&format!("{:<5} {:<48} {}\n", id.as_str(), id.formula(), id.description()));
    }
    s
}

/// Closed form matching a conditioning class of `id`'s family.
fn reference_id(id: ScenarioId, class: Option<MarkerOutcome>) -> ScenarioId {
    use ScenarioId::*;
    match (id, class) {
        (IIa | IIb | IIc, Some(MarkerOutcome::Plus)) => IIb,
        (IIa | IIb | IIc, Some(MarkerOutcome::Minus)) => IIc,
        (IIIa | IIIb | IIIc, Some(MarkerOutcome::Plus)) => IIIb,
        (IIIa | IIIb | IIIc, Some(MarkerOutcome::Minus)) => IIIc,
        (other, _) => other,
    }
}

fn analytic(cfg: &RunConfig) -> Result<(), CliError> {
    let id = cfg.scenario.id();
    let csv = output::pattern_csv(&analytic_pattern(id, &cfg.geometry), cfg.scenario.conditioning());
    output::emit(cfg.out.as_deref(), &csv)
}

/// Report for `primary`; `pass` covers every class in `all`.
fn report_for(cfg: &RunConfig, n_events: u64, primary: &Histogram, all: &[&Histogram]) -> Result<Report, CliError> {
    let id = cfg.scenario.id();
    let mut pass = true;
    let mut main = None;
    for h in all {
        if h.n_events() == 0 {
            pass = false;
            continue;
        }
        let reference = analytic_pattern(reference_id(id, h.conditioning()), &cfg.geometry);
        let r = compare(h, &reference).map_err(|e| CliError::Usage(e.to_string()))?;
        pass &= r.tv_distance < PASS_TV;
        if h.conditioning() == primary.conditioning() {
            main = Some(r);
        }
    }
    let main = main.ok_or_else(|| CliError::Usage("no events in the reported class".into()))?;
    Ok(Report {
        scenario: id.to_string(),
        n_events,
        seed: cfg.seed,
        tv_distance: main.tv_distance,
        chi_square: main.chi_square,
        dof: main.dof,
        fringe_visibility: primary.fringe_visibility(&cfg.geometry),
        pass,
    })
}

fn finish(cfg: &RunConfig, report: &Report) -> Result<(), CliError> {
    output::emit(cfg.report.as_deref(), &output::report_json(report))?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Rejected)
    }
}

fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let n = cfg.n_events.unwrap_or(DEFAULT_EVENTS);
    let sim = simulate(&cfg.scenario, &cfg.geometry, n, cfg.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(path) = &cfg.out {
        output::emit(Some(path), &output::histogram_csv(&sim.histograms))?;
    }
    let primary = sim.primary(&cfg.scenario).expect("scenario class is simulated");
    let all: Vec<&Histogram> = sim.histograms.iter().collect();
    finish(cfg, &report_for(cfg, n, primary, &all)?)
}

fn compare_file(path: &std::path::Path, cfg: &RunConfig) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let grid = *cfg.geometry.grid();
    let table = output::parse_histogram_csv(&text, &grid)?;
    let n = cfg.n_events.unwrap_or_else(|| table.total());
    let conditioning = cfg.scenario.conditioning();
    let counts = table.class(conditioning).ok_or_else(|| {
        CliError::Usage(match conditioning {
            Some(o) => format!("histogram has no rows with outcome {o}"),
            None => "histogram has conditioned rows; expected an unconditioned scenario".into(),
        })
    })?;
    let h = Histogram::new(grid, counts.to_vec(), n, conditioning, Some(cfg.scenario.id()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    finish(cfg, &report_for(cfg, n, &h, &[&h])?)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => output::emit(None, &list()),
        Command::Analytic(flags) => analytic(&flags.resolve()?),
        Command::Run(flags) => run(&flags.resolve()?),
        Command::Compare { histogram, flags } => compare_file(&histogram, &flags.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
