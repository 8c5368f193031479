//! Loading and saving project and suite files, and moving test scripts
//! between projects.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{Project, Script, TargetRef, UnmatchedTest, FORMAT_VERSION};
use crate::catalog::STAGE;
use crate::validate::{validate_project, Diagnostic};

pub const PROJECT_EXTENSION: &str = ".proj.json";
pub const SUITE_EXTENSION: &str = ".bbt.json";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed document at byte {offset} (line {line}, column {column}), at `{path}`: {message}")]
    Malformed { path: String, offset: usize, line: usize, column: usize, message: String },
    #[error("project has {} validation problem(s): {}", .0.len(), summarize(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("invalid suite: {0}")]
    InvalidSuite(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    let mut parts: Vec<String> = diags.iter().take(3).map(|d| d.to_string()).collect();
    if diags.len() > 3 {
        parts.push(format!("... and {} more", diags.len() - 3));
    }
    parts.join("; ")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuiteError {
    #[error("project contains no test scripts")]
    Empty,
}

/// One test of a batch suite with the sprite it is attached to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteTest {
    pub sprite: String,
    pub script: Script,
}

impl SuiteTest {
    pub fn name(&self) -> &str {
        self.script.test_name().unwrap_or("")
    }
}

/// Test scripts lifted out of one project so they can be applied to others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchTestSuite {
    pub format_version: u32,
    pub suite_name: String,
    pub tests: Vec<SuiteTest>,
}

impl BatchTestSuite {
    pub fn new(suite_name: &str, tests: Vec<SuiteTest>) -> Self {
        BatchTestSuite { format_version: FORMAT_VERSION, suite_name: suite_name.to_owned(), tests }
    }

    pub fn test_names(&self) -> Vec<&str> {
        self.tests.iter().map(SuiteTest::name).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tests.is_empty()
    }

    fn check(&self) -> Result<(), String> {
        if self.format_version != FORMAT_VERSION {
            return Err(format!("unsupported formatVersion {}", self.format_version));
        }
        let mut seen = BTreeSet::new();
        for t in &self.tests {
            if !t.script.is_test() {
                return Err(format!("suite entry for sprite `{}` is not a test script", t.sprite));
            }
            if !seen.insert(t.name()) {
                return Err(format!("duplicate test name `{}`", t.name()));
            }
        }
        Ok(())
    }
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in bytes.split(|&b| b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(bytes.len());
        }
        offset += l.len() + 1;
    }
    bytes.len()
}

fn error_offset(bytes: &[u8], e: &serde_json::Error) -> usize {
    if e.is_eof() {
        return bytes.len();
    }
    byte_offset(bytes, e.line(), e.column())
}

fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, LoadError> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let result: Result<T, _> = serde_path_to_error::deserialize(&mut de);
    let value = result.map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Malformed {
            path,
            offset: error_offset(bytes, &inner),
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| LoadError::Malformed {
        path: ".".into(),
        offset: error_offset(bytes, &e),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

/// Parses and validates a project document.
pub fn parse_project(bytes: &[u8]) -> Result<Project, LoadError> {
    let project: Project = decode(bytes)?;
    let diags = validate_project(&project);
    if diags.is_empty() {
        Ok(project)
    } else {
        Err(LoadError::Invalid(diags))
    }
}

pub fn serialize_project(p: &Project) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(p).expect("project serializes");
    out.push(b'\n');
    out
}

pub fn load_project(path: &Path) -> Result<Project, LoadError> {
    let bytes = std::fs::read(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_project(&bytes)
}

pub fn parse_suite(bytes: &[u8]) -> Result<BatchTestSuite, LoadError> {
    let suite: BatchTestSuite = decode(bytes)?;
    suite.check().map_err(LoadError::InvalidSuite)?;
    Ok(suite)
}

pub fn serialize_suite(s: &BatchTestSuite) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(s).expect("suite serializes");
    out.push(b'\n');
    out
}

pub fn load_suite(path: &Path) -> Result<BatchTestSuite, LoadError> {
    let bytes = std::fs::read(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse_suite(&bytes)
}

/// Collects the test scripts of `p` (and any unmatched tests it carries) in
/// project order.
pub fn extract_suite(p: &Project, suite_name: &str) -> Result<BatchTestSuite, SuiteError> {
    let mut tests: Vec<SuiteTest> = p
        .tests()
        .map(|(t, _, s)| SuiteTest { sprite: p.target_name(t).to_owned(), script: s.clone() })
        .collect();
    tests.extend(
        p.unmatched_tests
            .iter()
            .map(|u| SuiteTest { sprite: u.sprite.clone(), script: u.script.clone() }),
    );
    if tests.is_empty() {
        return Err(SuiteError::Empty);
    }
    Ok(BatchTestSuite::new(suite_name, tests))
}

/// Replaces every test in `p` with the suite's tests, matched to sprites by
/// exact name. Tests whose sprite is missing become unmatched records.
/// Block ids that would collide with the program's ids are renamed.
pub fn inject_suite(p: &Project, suite: &BatchTestSuite) -> Project {
    let mut out = p.clone();
    let targets: Vec<TargetRef> = out.targets().collect();
    for t in targets {
        out.scripts_of_mut(t).retain(|s| !s.is_test());
    }
    out.unmatched_tests.clear();

    let mut used: HashSet<String> = HashSet::new();
    out.walk_blocks(&mut |b| {
        used.insert(b.id.clone());
    });

    for test in &suite.tests {
        let mut script = test.script.clone();
        script.walk_mut(&mut |b| {
            if used.contains(&b.id) {
                let base = b.id.clone();
                let mut n = 1;
                while used.contains(&format!("{base}~{n}")) {
                    n += 1;
                }
                b.id = format!("{base}~{n}");
            }
            used.insert(b.id.clone());
        });
        let target = if test.sprite == STAGE {
            Some(TargetRef::Stage)
        } else {
            out.sprite_index(&test.sprite).map(TargetRef::Sprite)
        };
        match target {
            Some(t) => out.scripts_of_mut(t).push(script),
            None => out.unmatched_tests.push(UnmatchedTest { sprite: test.sprite.clone(), script }),
        }
    }
    out
}
