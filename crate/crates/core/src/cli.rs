//! The `bbt` command line.
//!
//! Exit codes: 0 when every selected test passed, 1 when any test did not
//! pass (or `validate` found problems), 2 on usage or load errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use clap::{Parser, Subcommand};

use crate::batch::{self, emit_report, BatchConfig, BatchReport, Cell, Format, Metadata, Row};
use crate::io::{self, LoadError};
use crate::testing::{CancelToken, TestError};
use crate::vm::{Program, Scheduler};

#[derive(Debug, Parser)]
#[command(name = "bbt", version, about = "Run block-based tests headlessly")]
struct Cli {
    /// More log output (-v warnings, -vv info, -vvv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunOpts {
    /// Seed for the random number generator.
    #[arg(long, env = "BBT_SEED", default_value_t = 0)]
    seed: u64,
    /// Default test timeout in frames (30 per second).
    #[arg(long, value_name = "FRAMES")]
    frame_budget: Option<u64>,
    /// Write the machine-readable report here instead of standard output.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the tests of one project.
    Run {
        project: PathBuf,
        /// Only run these tests (repeatable).
        #[arg(long = "test", short = 't')]
        tests: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run a suite against many projects.
    Batch {
        #[arg(long, short)]
        suite: PathBuf,
        #[arg(required = true)]
        projects: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Stop reporting after the first project with a non-passing test.
        #[arg(long)]
        fail_fast: bool,
        /// Worker threads (0 = one per core).
        #[arg(long, short = 'j', default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Check a project against the opcode catalog.
    Validate { project: PathBuf },
    /// Write the tests of a project as a suite file.
    ExtractSuite {
        project: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Suite name (defaults to the project file name).
        #[arg(long)]
        name: Option<String>,
    },
    /// Replace the tests of a project with those of a suite.
    InjectSuite {
        project: PathBuf,
        #[arg(long, short)]
        suite: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn active_token() -> &'static Mutex<Option<CancelToken>> {
    static TOKEN: OnceLock<Mutex<Option<CancelToken>>> = OnceLock::new();
    TOKEN.get_or_init(|| {
        // installed once per process; later calls swap the token it cancels
        let _ = ctrlc::set_handler(|| {
            if let Some(t) = active_token().lock().ok().and_then(|g| g.clone()) {
                t.cancel();
            }
        });
        Mutex::new(None)
    })
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Error,
        1 => log::LevelFilter::Warn,
        2 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
}

struct Failure {
    code: i32,
    message: String,
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Writes the report to `--out` (plus a timestamp sidecar) or stdout, then
/// the human summary to stdout, or to stderr when stdout carries the report.
fn deliver(report: &BatchReport, format: Format, out: Option<&Path>) -> Result<i32, Failure> {
    let bytes = emit_report(report, format);
    let summary = human_summary(report);
    match out {
        Some(path) => {
            write_bytes(path, &bytes)?;
            let meta = serde_json::json!({
                "seed": report.metadata.seed,
                "tool_version": report.metadata.tool_version,
                "timestamp": unix_time(),
            });
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".meta.json");
            write_bytes(Path::new(&sidecar), format!("{meta:#}\n").as_bytes())?;
            print!("{summary}");
        }
        None => {
            std::io::stdout().write_all(&bytes).map_err(|e| usage(e.to_string()))?;
            eprint!("{summary}");
        }
    }
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn human_summary(r: &BatchReport) -> String {
    let mut s = String::new();
    for row in &r.rows {
        for c in &row.cells {
            let flag = if c.vacuous { " (vacuous: no assertions)" } else { "" };
            s += &format!("{:<7} {}::{}{flag}", c.status.as_str(), row.file, c.test);
            if let Some(d) = c.detail.as_ref().filter(|_| c.status != batch::CellStatus::Pass) {
                s += &format!(" - {d}");
            }
            s.push('\n');
        }
    }
    let cells: usize = r.rows.iter().map(|row| row.cells.len()).sum();
    let passed: usize = r.summary.iter().map(|t| t.pass).sum();
    s += &format!("{passed}/{cells} passed");
    if r.aborted {
        s += " (aborted)";
    }
    s.push('\n');
    s
}

fn run(project: &Path, tests: &[String], format: Format, opts: &RunOpts, cancel: &CancelToken) -> Result<i32, Failure> {
    let p = io::load_project(project)?;
    let program = Program::new(p);
    let names = if tests.is_empty() { program.test_names() } else { tests.to_vec() };
    let unmatched: Vec<_> = if tests.is_empty() { program.project.unmatched_tests.clone() } else { Vec::new() };
    if names.is_empty() && unmatched.is_empty() {
        return Err(usage(format!("{} contains no tests", project.display())));
    }
    for n in &names {
        if program.test_script(n).is_none() {
            return Err(usage(format!("no test named `{n}`")));
        }
    }
    let file = file_name(project);
    let mut sched = Scheduler::new(Arc::new(program), batch::file_seed(opts.seed, &file));
    if let Some(f) = opts.frame_budget {
        sched.set_default_timeout(f);
    }
    let mut cells = Vec::new();
    let mut aborted = false;
    for n in &names {
        if aborted {
            cells.push(Cell::error(n, "not run".into()));
            continue;
        }
        let r = sched.run_test(n, cancel).map_err(|e: TestError| usage(e.to_string()))?;
        aborted = cancel.is_cancelled();
        cells.push(Cell::from_result(r));
    }
    for u in &unmatched {
        cells.push(Cell::error(u.script.test_name().unwrap_or(""), format!("sprite not found: {}", u.sprite)));
    }
    let tests: Vec<String> = cells.iter().map(|c| c.test.clone()).collect();
    let rows = vec![Row { file: file.clone(), cells }];
    let report = BatchReport {
        suite_name: file,
        summary: batch::summarize(&tests, &rows),
        tests,
        rows,
        aborted,
        metadata: Metadata { seed: opts.seed, tool_version: env!("CARGO_PKG_VERSION").to_owned() },
    };
    deliver(&report, format, opts.out.as_deref())
}

fn execute(cli: Cli, cancel: &CancelToken) -> Result<i32, Failure> {
    match cli.command {
        Command::Run { project, tests, format, opts } => run(&project, &tests, format, &opts, cancel),
        Command::Batch { suite, projects, format, fail_fast, jobs, opts } => {
            let suite = io::load_suite(&suite)?;
            let config = BatchConfig {
                seed: opts.seed,
                fail_fast,
                parallelism: jobs,
                timeout_frames: opts.frame_budget,
                cancel: cancel.clone(),
            };
            let report = batch::batch_run(&projects, &suite, &config).map_err(|e| usage(e.to_string()))?;
            deliver(&report, format, opts.out.as_deref())
        }
        Command::Validate { project } => match io::load_project(&project) {
            Ok(_) => {
                println!("{}: ok", project.display());
                Ok(0)
            }
            Err(LoadError::Invalid(diags)) => {
                for d in &diags {
                    println!("{}: {d}", project.display());
                }
                Ok(1)
            }
            Err(e) => Err(e.into()),
        },
        Command::ExtractSuite { project, out, name } => {
            let p = io::load_project(&project)?;
            let name = name.unwrap_or_else(|| file_name(&project));
            let suite = io::extract_suite(&p, &name).map_err(|e| usage(e.to_string()))?;
            write_bytes(&out, &io::serialize_suite(&suite))?;
            println!("{} test(s) written to {}", suite.tests.len(), out.display());
            Ok(0)
        }
        Command::InjectSuite { project, suite, out } => {
            let p = io::load_project(&project)?;
            let suite = io::load_suite(&suite)?;
            let injected = io::inject_suite(&p, &suite);
            write_bytes(&out, &io::serialize_project(&injected))?;
            if !injected.unmatched_tests.is_empty() {
                eprintln!("{} test(s) target sprites the project lacks", injected.unmatched_tests.len());
            }
            Ok(0)
        }
    }
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    let cancel = CancelToken::new();
    if let Ok(mut slot) = active_token().lock() {
        *slot = Some(cancel.clone());
    }
    match execute(cli, &cancel) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
