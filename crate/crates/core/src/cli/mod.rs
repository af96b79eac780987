//! The `ghz-phase` command line.
//!
//! ```text
//! ghz-phase [--seed N] sweep   --config run.toml
//! ghz-phase [--seed N] oracle  --kind K --placement L --p1 P --p2 P --phi ANGLE
//! ghz-phase [--seed N] analyze trajectory.csv [--t 0.1] [--output report.json] [--svg plot.svg]
//! ghz-phase [--seed N] plot    trajectory.csv plot.svg
//! ghz-phase schema
//! ```
//!
//! Exit codes: 0 success, 1 validation or parse error, 2 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::channels::{Location, NoiseKind};
use crate::oracle::OracleQuery;
use crate::trajectory::{classify, sweep, ClassifyConfig, Trajectory};

pub mod config;
pub mod report;
pub mod svg;
pub mod table;

pub use config::{RunConfig, SweepJob, CONFIG_SCHEMA};
pub use report::{AnalysisReport, OracleReport};
pub use svg::render_svg;
pub use table::{read_csv, to_csv_string, write_csv, CSV_HEADER};

/// Fewest rows `analyze` accepts.
pub const MIN_ANALYZE_ROWS: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ghz-phase", version, about = "GHZ-like state phase trajectories under noise")]
struct Cli {
    /// Base seed for shot sampling; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the preparation phase and write the trajectory CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the closed-form noisy density matrix and its witnesses as JSON.
    Oracle {
        #[arg(long)]
        kind: NoiseKind,
        /// before_cnot, after_cnot or after_phase.
        #[arg(long)]
        placement: Location,
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        #[arg(long, default_value_t = 0.0)]
        p2: f64,
        /// Radians, or degrees with a `deg` suffix.
        #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Classify a trajectory CSV and print the JSON report.
    Analyze {
        input: PathBuf,
        /// Gate time used for T1 inference.
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        /// Write the report here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Render a trajectory CSV as SVG.
    Plot { input: PathBuf, output: PathBuf },
    /// Print the JSON schema of the sweep configuration.
    Schema,
}

/// Parses `0.5`, `0.5rad` or `45deg`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let (num, scale) = if let Some(v) = t.strip_suffix("deg") {
        (v, std::f64::consts::PI / 180.0)
    } else if let Some(v) = t.strip_suffix("rad") {
        (v, 1.0)
    } else {
        (t, 1.0)
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("'{s}' is not an angle (radians, or degrees with a 'deg' suffix)"))?;
    if !v.is_finite() {
        return Err(format!("angle '{s}' must be finite"));
    }
    Ok(v * scale)
}

/// Runs the command line with explicit output streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs with the process arguments and standard streams.
pub fn main_exit_code() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Io(format!("cannot write output: {e}")))
}

fn load_csv(path: &Path) -> Result<Trajectory, CliError> {
    let text = read_text(path)?;
    read_csv(text.as_bytes()).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config } => cmd_sweep(&config, cli.seed, out),
        Command::Oracle {
            kind,
            placement,
            p1,
            p2,
            phi,
        } => {
            let report = OracleReport::new(&OracleQuery::new(kind, placement, p1, p2, phi)?)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            emit(out, &format!("{json}\n"))
        }
        Command::Analyze {
            input,
            t,
            output,
            svg,
        } => {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::Invalid(format!("--t must be > 0, got {t}")));
            }
            let traj = load_csv(&input)?;
            if traj.len() < MIN_ANALYZE_ROWS {
                return Err(CliError::Invalid(format!(
                    "{}: need at least {MIN_ANALYZE_ROWS} data rows, found {}",
                    input.display(),
                    traj.len()
                )));
            }
            let fit = classify(&traj, &ClassifyConfig::default())?;
            let report = AnalysisReport::new(&traj, &fit, t);
            let json = format!(
                "{}\n",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            if let Some(path) = svg {
                write_file(&path, render_svg(&traj).as_bytes())?;
            }
            match output {
                Some(path) => write_file(&path, json.as_bytes()),
                None => emit(out, &json),
            }
        }
        Command::Plot { input, output } => {
            let traj = load_csv(&input)?;
            if traj.is_empty() {
                return Err(CliError::Invalid(format!("{}: no data rows", input.display())));
            }
            write_file(&output, render_svg(&traj).as_bytes())
        }
        Command::Schema => emit(out, CONFIG_SCHEMA),
    }
}

fn cmd_sweep(path: &Path, seed: Option<u64>, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_text(path)?;
    let mut config = RunConfig::from_toml(&text)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    if let Some(s) = seed {
        config.seed = s;
    }
    let job = config.validate().map_err(|v| {
        CliError::Invalid(format!(
            "{} is invalid:\n{}",
            path.display(),
            v.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n")
        ))
    })?;
    let traj = sweep(&job.grid, &job.schedule, &job.plan)?;
    let csv = to_csv_string(&traj);
    if let Some(p) = &job.output.svg {
        write_file(p, render_svg(&traj).as_bytes())?;
    }
    match &job.output.csv {
        Some(p) => write_file(p, csv.as_bytes()),
        None => emit(out, &csv),
    }
}
