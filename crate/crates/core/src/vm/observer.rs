use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use crate::testing::{AssertionOutcome, SuiteResult, TestResult};
use crate::vm::{Event, ThreadId};

/// Summary of one completed frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSummary {
    /// Virtual clock after the frame.
    pub clock: u64,
    pub blocks_executed: usize,
    pub turns: usize,
    pub live_threads: usize,
    pub input_locked: bool,
}

/// Callbacks fired by the scheduler and the test runner. All methods default
/// to no-ops. Implementations must not block.
#[allow(unused_variables)]
pub trait Observer: Send {
    fn thread_spawned(&mut self, thread: ThreadId, script: usize) {}
    fn block_executed(&mut self, thread: ThreadId, block_id: &str) {}
    fn frame_ended(&mut self, summary: &FrameSummary) {}
    fn event_dispatched(&mut self, event: &Event, spawned: &[ThreadId]) {}
    fn test_started(&mut self, name: &str) {}
    fn assertion_evaluated(&mut self, outcome: &AssertionOutcome) {}
    fn test_finished(&mut self, result: &TestResult) {}
    fn suite_finished(&mut self, result: &SuiteResult) {}
}

/// What a [`TraceRecorder`] has seen so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceSnapshot {
    /// Hash over the ordered `(thread, block)` execution sequence and frame
    /// boundaries.
    pub hash: u64,
    pub blocks: u64,
    pub frames: u64,
    /// Executions per block id within the most recent frame.
    pub last_frame_counts: BTreeMap<String, u32>,
    /// Largest single-frame execution count seen per block id.
    pub max_per_frame: BTreeMap<String, u32>,
    /// Input lock state at each frame end, in order.
    pub lock_by_frame: Vec<bool>,
    pub events: Vec<String>,
}

#[derive(Default)]
struct TraceState {
    hasher: DefaultHasher,
    snap: TraceSnapshot,
    current: BTreeMap<String, u32>,
}

/// Observer that fingerprints execution for determinism checks. Clone the
/// handle before registering it; both copies share state.
#[derive(Clone, Default)]
pub struct TraceRecorder {
    inner: Arc<Mutex<TraceState>>,
}

impl TraceRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn snapshot(&self) -> TraceSnapshot {
        let st = self.inner.lock().expect("trace lock");
        let mut snap = st.snap.clone();
        snap.hash = st.hasher.finish();
        snap
    }
}

impl Observer for TraceRecorder {
    fn block_executed(&mut self, thread: ThreadId, block_id: &str) {
        let mut st = self.inner.lock().expect("trace lock");
        (thread.0, block_id).hash(&mut st.hasher);
        st.snap.blocks += 1;
        *st.current.entry(block_id.to_owned()).or_default() += 1;
    }

    fn frame_ended(&mut self, summary: &FrameSummary) {
        let mut st = self.inner.lock().expect("trace lock");
        ("frame", summary.clock).hash(&mut st.hasher);
        st.snap.frames += 1;
        st.snap.lock_by_frame.push(summary.input_locked);
        let current = std::mem::take(&mut st.current);
        for (id, n) in &current {
            let max = st.snap.max_per_frame.entry(id.clone()).or_default();
            *max = (*max).max(*n);
        }
        st.snap.last_frame_counts = current;
    }

    fn event_dispatched(&mut self, event: &Event, spawned: &[ThreadId]) {
        let mut st = self.inner.lock().expect("trace lock");
        st.snap.events.push(format!("{event:?} -> {}", spawned.len()));
    }

    fn test_started(&mut self, name: &str) {
        let mut st = self.inner.lock().expect("trace lock");
        st.snap.events.push(format!("test-started {name}"));
    }

    fn test_finished(&mut self, result: &TestResult) {
        let mut st = self.inner.lock().expect("trace lock");
        st.snap.events.push(format!("test-finished {} {}", result.name, result.status));
    }
}
