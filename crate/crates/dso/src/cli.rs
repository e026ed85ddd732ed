//! The `dso` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dso_core::analysis::{solve_scenario, AnalysisError};
use dso_core::formulation::FormulationError;
use dso_core::solver::mps::write_mps;
use dso_core::solver::{MilpStatus, SolveOptions};

use crate::export::{export_results, solve_json, ResultBundle};
use crate::file::{bundled, load_scenario, scenario_to_string, LoadError, Loaded};
use crate::sweep::{run_sweep_parallel, sweep_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_OPTIMAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dso", version, about = "Schedule DER aggregators in energy and regulation markets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a scenario file and report every violation.
    Validate { scenario: PathBuf },
    /// Solve a scenario and write the result files.
    Solve {
        scenario: PathBuf,
        /// Directory for schedule.csv, network.csv, revenue.csv and solve.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative optimality gap.
        #[arg(long, value_parser = parse_gap)]
        gap: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_nodes: Option<u64>,
        /// Also write the problem in MPS format.
        #[arg(long)]
        mps: Option<PathBuf>,
        /// Record wall-clock time in solve.json.
        #[arg(long)]
        timing: bool,
    },
    /// Scale one aggregator's energy offers by i/10 for i = 1..40 and solve each case.
    Sweep {
        scenario: PathBuf,
        #[arg(long)]
        target: String,
        /// Directory for sweep.csv; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the built-in case study as a scenario file.
    Bundled {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_gap(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if g > 0.0 && g < 1.0 {
        Ok(g)
    } else {
        Err("gap must lie strictly between 0 and 1".into())
    }
}

struct Failure(i32, String);

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        let code = if matches!(e, LoadError::Validation(_)) { EXIT_INVALID } else { EXIT_IO };
        Failure(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::Formulation(FormulationError::Validation(_)) | AnalysisError::UnknownTarget(_) => EXIT_INVALID,
            _ => EXIT_IO,
        };
        Failure(code, e.to_string())
    }
}

fn io_fail(what: &std::path::Path, e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_IO, format!("{}: {e}", what.display()))
}

/// Run the command line with `args` (program name first). Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_IO
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let put = |out: &mut dyn Write, bytes: &[u8]| out.write_all(bytes).map_err(|e| Failure(EXIT_IO, e.to_string()));
    match cmd {
        Command::Validate { scenario } => {
            let Loaded { scenario: s, assumptions } = load_scenario(&scenario)?;
            for a in &assumptions {
                let _ = writeln!(stderr, "assumption: {a}");
            }
            put(stdout, format!("valid {}\n", s.fingerprint_hex()).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Solve { scenario, out, gap, max_nodes, mps, timing } => {
            let loaded = load_scenario(&scenario)?;
            let mut opts = SolveOptions::default();
            if let Some(g) = gap {
                opts.relative_gap = g;
            }
            if let Some(n) = max_nodes {
                opts.max_nodes = usize::try_from(n).unwrap_or(usize::MAX);
            }
            let start = Instant::now();
            let solved = solve_scenario(&loaded.scenario, &opts)?;
            let elapsed = start.elapsed();
            if let Some(path) = &mps {
                std::fs::write(path, write_mps(&solved.model.problem, "DSO", true)).map_err(|e| io_fail(path, e))?;
            }
            let bundle = ResultBundle::from_solved(&solved, opts, timing.then_some(elapsed))?;
            match &out {
                Some(dir) => export_results(&bundle, dir).map_err(|e| Failure(EXIT_IO, e.to_string()))?,
                None => put(stdout, solve_json(&bundle).as_bytes())?,
            }
            let _ = writeln!(
                stderr,
                "{:?}: objective {} after {} nodes in {:.2} s",
                bundle.status,
                bundle.objective,
                bundle.nodes,
                elapsed.as_secs_f64()
            );
            Ok(if bundle.status == MilpStatus::Optimal { EXIT_OK } else { EXIT_NOT_OPTIMAL })
        }
        Command::Sweep { scenario, target, out } => {
            let loaded = load_scenario(&scenario)?;
            let result = run_sweep_parallel(&loaded.scenario, &target, &SolveOptions::default())?;
            let bytes = sweep_csv(&result).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
            match &out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
                    let path = dir.join("sweep.csv");
                    std::fs::write(&path, bytes).map_err(|e| io_fail(&path, e))?;
                }
                None => put(stdout, &bytes)?,
            }
            let failed = result.cases.iter().filter(|c| !c.is_optimal()).count();
            if failed > 0 {
                let _ = writeln!(stderr, "{failed} of {} cases did not solve to optimality", result.cases.len());
                return Ok(EXIT_NOT_OPTIMAL);
            }
            Ok(EXIT_OK)
        }
        Command::Bundled { out } => {
            let b = bundled();
            let text = scenario_to_string(&b.scenario, &b.assumptions);
            match &out {
                Some(path) => std::fs::write(path, text).map_err(|e| io_fail(path, e))?,
                None => put(stdout, text.as_bytes())?,
            }
            Ok(EXIT_OK)
        }
    }
}
