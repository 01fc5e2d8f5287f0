//! Batch front end: JSON configuration in, CSV tables and a verification report out.
//!
//! Exit status: 0 when every requested check passes, 1 when any fails, 2 for
//! usage or configuration errors, 3 for I/O errors.

pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use config::{ConfigError, GridConfig, ProfileConfig, RunConfig, Task, Tolerances};
pub use report::{TaskRecord, VerificationReport};
pub use run::{execute, run, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ncqm", version, about = "Position-dependent noncommutative phase-space brackets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full verification pipeline.
    Run(RunArgs),
    /// Write the density and correction-field table only.
    Profile(RunArgs),
    /// Jacobi violation of a linear coordinate bracket with canonical momenta.
    Counterexample(StandaloneArgs),
    /// Checks for the second-order planar model.
    LszCheck(StandaloneArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "ncqm-out")]
    out: PathBuf,
    /// Comma-separated task list overriding the configuration.
    #[arg(long, value_delimiter = ',')]
    tasks: Option<Vec<String>>,
    /// Jet order overriding the configuration.
    #[arg(long)]
    jet_order: Option<usize>,
}

#[derive(Debug, Args)]
struct StandaloneArgs {
    /// Directory for report.json and report.txt; nothing is written when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Io(String),
}

fn load_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(|e| Failure::Usage(format!("invalid config: {e}")))?;
    if let Some(tasks) = &args.tasks {
        cfg.tasks = tasks
            .iter()
            .map(|t| t.parse::<Task>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Usage(format!("--tasks: {e}")))?;
    }
    if let Some(k) = args.jet_order {
        cfg.jet_order = k;
    }
    cfg.validate().map_err(|e| Failure::Usage(format!("invalid config: {e}")))?;
    Ok(cfg)
}

fn write_standalone(out: Option<&Path>, report: &VerificationReport) -> Result<(), Failure> {
    if let Some(dir) = out {
        let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("report.json"), report.to_json()).map_err(io)?;
        fs::write(dir.join("report.txt"), report.to_text()).map_err(io)?;
    }
    Ok(())
}

fn standalone_report(records: Vec<TaskRecord>) -> VerificationReport {
    let config = RunConfig {
        profile: ProfileConfig { theta: 0.0, alpha: 0.0, f_poly: vec![0.0, 1.0], gauge: crate::fields::Gauge::Phi },
        grid: GridConfig::default(),
        jet_order: crate::jet::DEFAULT_ORDER,
        tolerances: Tolerances::default(),
        tasks: Vec::new(),
    };
    VerificationReport {
        records,
        provenance: report::Provenance { config, version: report::ARTIFACT_VERSION.to_string() },
    }
}

fn status(report: &VerificationReport) -> i32 {
    if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run(args) => {
            let cfg = load_config(&args)?;
            let report = run::run(&cfg, &args.out).map_err(|e| Failure::Io(format!("{}: {e}", args.out.display())))?;
            print!("{}", report.to_text());
            Ok(status(&report))
        }
        Command::Profile(args) => {
            let cfg = load_config(&args)?;
            let csv = run::profile_table(&cfg).map_err(|e| Failure::Usage(e.to_string()))?;
            let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", args.out.display()));
            fs::create_dir_all(&args.out).map_err(io)?;
            fs::write(args.out.join("profile.csv"), csv).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Counterexample(args) => {
            let report = standalone_report(vec![run::counterexample_record()]);
            write_standalone(args.out.as_deref(), &report)?;
            print!("{}", report.to_text());
            Ok(status(&report))
        }
        Command::LszCheck(args) => {
            let report = standalone_report(run::lsz_records(run::LSZ_SEED, run::LSZ_STATES));
            write_standalone(args.out.as_deref(), &report)?;
            print!("{}", report.to_text());
            Ok(status(&report))
        }
    }
}

/// Parses `args` (including the program name) and runs the selected command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            EXIT_IO
        }
    }
}
