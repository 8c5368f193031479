use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Timeout,
    Aborted,
    EvaluationError,
    SpriteNotFound,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Timeout => "timeout",
            ErrorKind::Aborted => "aborted",
            ErrorKind::EvaluationError => "evaluation-error",
            ErrorKind::SpriteNotFound => "sprite-not-found",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "state", content = "reason")]
pub enum TestStatus {
    Idle,
    Running,
    Passed,
    Failed,
    Error(ErrorKind),
}

impl TestStatus {
    pub fn is_passed(self) -> bool {
        self == TestStatus::Passed
    }
}

impl fmt::Display for TestStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestStatus::Idle => f.write_str("idle"),
            TestStatus::Running => f.write_str("running"),
            TestStatus::Passed => f.write_str("passed"),
            TestStatus::Failed => f.write_str("failed"),
            TestStatus::Error(e) => write!(f, "error({})", e.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssertionKind {
    True,
    Equals,
    Greater,
    Less,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub block_id: String,
    pub kind: AssertionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    pub passed: bool,
    /// Set when an input could not be evaluated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub sprite: String,
    pub status: TestStatus,
    /// Completed without executing a single assertion.
    pub vacuous: bool,
    pub outcomes: Vec<AssertionOutcome>,
    pub frames: u64,
}

impl TestResult {
    pub fn idle(name: &str, sprite: &str) -> Self {
        TestResult {
            name: name.to_owned(),
            sprite: sprite.to_owned(),
            status: TestStatus::Idle,
            vacuous: false,
            outcomes: Vec::new(),
            frames: 0,
        }
    }

    /// Message of the first failing or erroring assertion, else a status
    /// explanation for errors.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(o) = self.outcomes.iter().find(|o| !o.passed) {
            return Some(o.message.clone());
        }
        match self.status {
            TestStatus::Error(ErrorKind::Timeout) => Some(format!("timed out after {} frames", self.frames)),
            TestStatus::Error(ErrorKind::Aborted) => Some("aborted".into()),
            TestStatus::Error(ErrorKind::SpriteNotFound) => {
                Some(format!("sprite not found: {}", self.sprite))
            }
            TestStatus::Error(ErrorKind::EvaluationError) => Some("evaluation error".into()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub tests: Vec<TestResult>,
    pub aborted: bool,
}

impl SuiteResult {
    pub fn passed(&self) -> usize {
        self.tests.iter().filter(|t| t.status.is_passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        !self.aborted && self.tests.iter().all(|t| t.status.is_passed())
    }

    pub fn get(&self, name: &str) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.name == name)
    }
}
