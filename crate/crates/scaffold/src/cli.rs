//! `scaffold` command line.
//!
//! Exit codes: 0 success, 1 validation or physics failure, 2 usage or file
//! error.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use scaffold_core::{run as simulate_run, RigConfig, SimError, TelemetryRecord};

use crate::analysis::{analyze, format_table};
use crate::scenario::{bundled_scenarios, load_scenario, save_scenario, Scenario, ScenarioError};
use crate::telemetry::{read_csv, write_csv, write_plot};
use crate::validate::{mobility, quick_suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "scaffold", version, about = "Cable-suspended scaffold simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Gains {
    /// Gains from the scenario's `kp`/`ki`.
    Simulation,
    /// The hardware gains stored as scenario metadata.
    Experimental,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its telemetry CSV.
    Simulate {
        #[arg(required_unless_present = "sweep")]
        scenario: Option<PathBuf>,
        /// Output CSV. With --sweep, the directory receiving one CSV per scenario.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run several scenarios in parallel.
        #[arg(long, num_args = 1.., conflicts_with = "scenario")]
        sweep: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Gains::Simulation)]
        gains: Gains,
    },
    /// Print RMS tracking errors and power from a telemetry CSV.
    Analyze {
        log: PathBuf,
        #[arg(long)]
        json: bool,
        /// Scenario whose rig geometry applies (defaults to the standard rig).
        #[arg(long)]
        scenario: Option<PathBuf>,
    },
    /// Write one channel of a telemetry CSV as two-column plot data.
    Plot {
        log: PathBuf,
        #[arg(long)]
        channel: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check mobility and run the built-in invariant suite.
    Validate,
    /// Bundled scenario files.
    Scenarios {
        #[command(subcommand)]
        action: ScenarioAction,
    },
}

#[derive(Debug, Subcommand)]
enum ScenarioAction {
    /// Write the demonstration move and both experiments as JSON.
    EmitPaper {
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// Parse `args` (program name first) and execute.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_FAILURE, message: message.into() }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        if e.is_file_error() {
            usage(e.to_string())
        } else {
            failure(e.to_string())
        }
    }
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    usage(format!("{}: {e}", path.display()))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Simulate { scenario, out: target, sweep, gains } => {
            if sweep.is_empty() {
                let path = scenario.expect("required unless sweep");
                let s = prepare(&path, gains)?;
                let target = target.or_else(|| s.output_path.clone()).unwrap_or_else(|| default_output(&path));
                simulate_one(&path, &s, &target, out)
            } else {
                simulate_sweep(&sweep, target.as_deref(), gains, out)
            }
        }
        Command::Analyze { log, json, scenario } => {
            let records = load_log(&log)?;
            let rig = match scenario {
                Some(p) => load_scenario(&p)?.config.rig,
                None => RigConfig::default(),
            };
            let a = analyze(&records, &rig).map_err(|e| failure(format!("{}: {e}", log.display())))?;
            let text = if json {
                serde_json::to_string_pretty(&a).expect("report serializes") + "\n"
            } else {
                format_table(&a)
            };
            out.write_all(text.as_bytes()).map_err(|e| file_error(Path::new("<stdout>"), e))?;
            Ok(EXIT_OK)
        }
        Command::Plot { log, channel, out: target } => {
            let records = load_log(&log)?;
            let file = File::create(&target).map_err(|e| file_error(&target, e))?;
            write_plot(&records, &channel, BufWriter::new(file)).map_err(|e| match e {
                crate::telemetry::TelemetryError::UnknownChannel(_) => usage(e.to_string()),
                other => file_error(&target, other),
            })?;
            let _ = writeln!(out, "wrote {} rows of `{channel}` to {}", records.len(), target.display());
            Ok(EXIT_OK)
        }
        Command::Validate => {
            let _ = writeln!(out, "Grübler DOF: {}", mobility());
            let checks = quick_suite();
            for c in &checks {
                let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Scenarios { action: ScenarioAction::EmitPaper { dir } } => {
            fs::create_dir_all(&dir).map_err(|e| file_error(&dir, e))?;
            for (file, s) in bundled_scenarios() {
                let path = dir.join(file);
                save_scenario(&path, &s)?;
                let _ = writeln!(out, "wrote {}", path.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn default_output(scenario: &Path) -> PathBuf {
    scenario.with_extension("csv")
}

fn prepare(path: &Path, gains: Gains) -> Result<Scenario, Failure> {
    let s = load_scenario(path)?;
    match gains {
        Gains::Simulation => Ok(s),
        Gains::Experimental => s
            .with_experimental_gains()
            .ok_or_else(|| usage(format!("{}: no experimental_kp/experimental_ki in scenario", path.display()))),
    }
}

fn load_log(path: &Path) -> Result<Vec<TelemetryRecord>, Failure> {
    let file = File::open(path).map_err(|e| file_error(path, e))?;
    read_csv(BufReader::new(file)).map_err(|e| file_error(path, e))
}

fn save_log(path: &Path, records: &[TelemetryRecord]) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| file_error(path, e))?;
    write_csv(records, BufWriter::new(file)).map_err(|e| file_error(path, e))
}

fn summary(path: &Path, target: &Path, records: &[TelemetryRecord]) -> String {
    let last = records.last().copied().unwrap_or_default();
    format!(
        "{}: {} rows to {}; final pose ({:.6} m, {:.6} m, {:.6} rad)",
        path.display(),
        records.len(),
        target.display(),
        last.pose.x,
        last.pose.y,
        last.pose.theta
    )
}

/// Write telemetry, or on an instability abort the diagnostic tail next to
/// the intended output.
fn finish(path: &Path, target: &Path, result: Result<Vec<TelemetryRecord>, SimError>) -> Result<String, Failure> {
    match result {
        Ok(records) => {
            save_log(target, &records)?;
            Ok(summary(path, target, &records))
        }
        Err(SimError::Unstable { time, reason, tail }) => {
            let tail_path = target.with_extension("tail.csv");
            save_log(&tail_path, &tail)?;
            Err(failure(format!(
                "{}: simulation unstable at t = {time} s ({reason}); last {} records in {}",
                path.display(),
                tail.len(),
                tail_path.display()
            )))
        }
        Err(e) => Err(failure(format!("{}: {e}", path.display()))),
    }
}

fn simulate_one(path: &Path, s: &Scenario, target: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let line = finish(path, target, simulate_run(&s.config))?;
    let _ = writeln!(out, "{line}");
    Ok(EXIT_OK)
}

fn simulate_sweep(paths: &[PathBuf], dir: Option<&Path>, gains: Gains, out: &mut dyn Write) -> Result<i32, Failure> {
    let dir = dir.unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| file_error(dir, e))?;
    let scenarios = paths.iter().map(|p| prepare(p, gains)).collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<String, Failure>> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .zip(&scenarios)
            .map(|(path, s)| {
                let name = path.file_stem().map_or_else(|| "scenario".into(), |n| n.to_os_string());
                let target = dir.join(name).with_extension("csv");
                scope.spawn(move || finish(path, &target, simulate_run(&s.config)))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let mut code = EXIT_OK;
    let mut first_error = None;
    for r in results {
        match r {
            Ok(line) => {
                let _ = writeln!(out, "{line}");
            }
            Err(f) => {
                let _ = writeln!(out, "FAILED {}", f.message);
                code = code.max(f.code);
                first_error.get_or_insert(f.message);
            }
        }
    }
    match first_error {
        None => Ok(EXIT_OK),
        Some(message) => Err(Failure { code, message }),
    }
}
