//! Test scripts: lifecycle, snapshot/restore, timeouts, assertions and
//! suite sequencing.
//!
//! A test runs as an ordinary thread on the scheduler, next to the program's
//! own scripts. Starting it captures a snapshot of the [`World`] and locks
//! external input; ending it unlocks input and resets keys and mouse.

mod blocks;
mod result;
mod runner;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

pub use result::{AssertionKind, AssertionOutcome, ErrorKind, SuiteResult, TestResult, TestStatus};
pub use runner::TestError;

use crate::vm::{ThreadId, World};

/// 5 s at 30 frames per second.
pub const DEFAULT_TIMEOUT_FRAMES: u64 = 150;

/// Cross-thread stop signal, checked at frame boundaries.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

/// Book-keeping for the test currently running on a scheduler.
#[derive(Debug, Clone)]
pub(crate) struct ActiveTest {
    pub name: String,
    pub sprite: String,
    pub thread: ThreadId,
    pub snapshot: World,
    /// Absolute value of `Scheduler::total_frames` at which the test times out.
    pub deadline: u64,
    pub outcomes: Vec<AssertionOutcome>,
    pub error: Option<ErrorKind>,
    pub restored: bool,
}
