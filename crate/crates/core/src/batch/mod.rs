//! Runs one suite against many project files and collects the file × test
//! matrix.

mod report;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::io::{inject_suite, load_project, BatchTestSuite};
use crate::testing::{CancelToken, ErrorKind, TestResult, TestStatus};
use crate::vm::{Program, Scheduler};

pub use report::{emit_report, Format};

#[derive(Debug, Clone, Default)]
pub struct BatchConfig {
    pub seed: u64,
    /// Keep rows only up to and including the first row with a non-passing
    /// cell (in input order).
    pub fail_fast: bool,
    /// Worker threads; 0 picks the rayon default.
    pub parallelism: usize,
    /// Overrides the default per-test timeout, in frames.
    pub timeout_frames: Option<u64>,
    pub cancel: CancelToken,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("no project files given")]
    NoFiles,
    #[error("suite contains no tests")]
    EmptySuite,
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// CSV-level classification of one test result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Pass,
    Fail,
    Timeout,
    Error,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Pass => "pass",
            CellStatus::Fail => "fail",
            CellStatus::Timeout => "timeout",
            CellStatus::Error => "error",
        }
    }

    pub fn of(status: TestStatus) -> Self {
        match status {
            TestStatus::Passed => CellStatus::Pass,
            TestStatus::Failed => CellStatus::Fail,
            TestStatus::Error(ErrorKind::Timeout) => CellStatus::Timeout,
            _ => CellStatus::Error,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub test: String,
    pub status: CellStatus,
    /// First failure message, load error or error reason.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub frames: u64,
    pub vacuous: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TestResult>,
}

impl Cell {
    pub(crate) fn error(test: &str, detail: String) -> Self {
        Cell { test: test.to_owned(), status: CellStatus::Error, detail: Some(detail), frames: 0, vacuous: false, result: None }
    }

    pub(crate) fn from_result(r: TestResult) -> Self {
        let detail = match r.status {
            TestStatus::Idle => Some("not run".to_owned()),
            _ => r.first_failure(),
        };
        Cell {
            test: r.name.clone(),
            status: CellStatus::of(r.status),
            detail,
            frames: r.frames,
            vacuous: r.vacuous,
            result: Some(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub file: String,
    /// One cell per suite test, in suite order.
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn all_passed(&self) -> bool {
        self.cells.iter().all(|c| c.status == CellStatus::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TestSummary {
    pub test: String,
    pub pass: usize,
    pub fail: usize,
    pub timeout: usize,
    pub error: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub suite_name: String,
    pub tests: Vec<String>,
    pub rows: Vec<Row>,
    pub summary: Vec<TestSummary>,
    pub aborted: bool,
    pub metadata: Metadata,
}

impl BatchReport {
    pub fn all_passed(&self) -> bool {
        !self.aborted && self.rows.iter().all(Row::all_passed)
    }

    pub fn cell(&self, file: &str, test: &str) -> Option<&Cell> {
        self.rows.iter().find(|r| r.file == file)?.cells.iter().find(|c| c.test == test)
    }
}

/// Per-file seed derived from the global seed and the file's display name.
pub fn file_seed(seed: u64, file: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(file.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// File names for display; names shared by several inputs fall back to the
/// path as given.
pub fn display_names(files: &[PathBuf]) -> Vec<String> {
    let base = |p: &Path| p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
    let mut counts: HashMap<String, usize> = HashMap::new();
    for f in files {
        *counts.entry(base(f)).or_default() += 1;
    }
    files
        .iter()
        .map(|f| {
            let b = base(f);
            if counts[&b] > 1 {
                f.display().to_string()
            } else {
                b
            }
        })
        .collect()
}

/// Runs `suite` against one already-loaded project, as the batch does.
pub fn run_row(
    project: &crate::ast::Project,
    suite: &BatchTestSuite,
    file: &str,
    config: &BatchConfig,
) -> Row {
    let names = suite.test_names();
    if config.cancel.is_cancelled() {
        return Row { file: file.to_owned(), cells: names.iter().map(|n| Cell::error(n, "aborted".into())).collect() };
    }
    let injected = inject_suite(project, suite);
    let mut sched = Scheduler::new(Arc::new(Program::new(injected)), file_seed(config.seed, file));
    if let Some(frames) = config.timeout_frames {
        sched.set_default_timeout(frames);
    }
    let mut results = match sched.run_suite(&config.cancel) {
        Ok(r) => r.tests,
        Err(e) => {
            return Row { file: file.to_owned(), cells: names.iter().map(|n| Cell::error(n, e.to_string())).collect() }
        }
    };
    let cells = names
        .iter()
        .map(|n| match results.iter().position(|r| r.name == *n) {
            Some(i) => Cell::from_result(results.swap_remove(i)),
            None => Cell::error(n, "not run".into()),
        })
        .collect();
    Row { file: file.to_owned(), cells }
}

pub(crate) fn summarize(tests: &[String], rows: &[Row]) -> Vec<TestSummary> {
    tests
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut s = TestSummary { test: t.clone(), ..Default::default() };
            for r in rows {
                match r.cells[i].status {
                    CellStatus::Pass => s.pass += 1,
                    CellStatus::Fail => s.fail += 1,
                    CellStatus::Timeout => s.timeout += 1,
                    CellStatus::Error => s.error += 1,
                }
            }
            s
        })
        .collect()
}

/// Loads each file, injects the suite, runs it on a fresh scheduler and
/// collects one row per file in input order.
pub fn batch_run(files: &[PathBuf], suite: &BatchTestSuite, config: &BatchConfig) -> Result<BatchReport, BatchError> {
    if files.is_empty() {
        return Err(BatchError::NoFiles);
    }
    if suite.is_empty() {
        return Err(BatchError::EmptySuite);
    }
    let names = display_names(files);
    let work = |(path, name): (&PathBuf, &String)| -> Row {
        match load_project(path) {
            Ok(p) => run_row(&p, suite, name, config),
            Err(e) => Row {
                file: name.clone(),
                cells: suite.test_names().iter().map(|t| Cell::error(t, format!("load: {e}"))).collect(),
            },
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if config.parallelism > 0 {
        builder = builder.num_threads(config.parallelism);
    }
    let pool = builder.build().map_err(|e| BatchError::Pool(e.to_string()))?;
    let mut rows: Vec<Row> = pool.install(|| files.par_iter().zip(names.par_iter()).map(work).collect());

    let aborted = config.cancel.is_cancelled();
    if config.fail_fast {
        if let Some(i) = rows.iter().position(|r| !r.all_passed()) {
            rows.truncate(i + 1);
        }
    }
    let tests: Vec<String> = suite.test_names().into_iter().map(str::to_owned).collect();
    Ok(BatchReport {
        suite_name: suite.suite_name.clone(),
        summary: summarize(&tests, &rows),
        tests,
        rows,
        aborted,
        metadata: Metadata { seed: config.seed, tool_version: env!("CARGO_PKG_VERSION").to_owned() },
    })
}
