// Watches a test through the observer hooks: a custom observer logs test
// events while a TraceRecorder fingerprints the block sequence.

use bbt::testing::{AssertionOutcome, TestResult};
use bbt::vm::{FrameSummary, Observer, TraceRecorder};
use bbt::{CancelToken, Event, Scheduler};

#[derive(Default)]
struct Log {
    frames: u64,
}

impl Observer for Log {
    fn test_started(&mut self, name: &str) {
        println!("start  {name}");
    }
    fn event_dispatched(&mut self, event: &Event, spawned: &[bbt::vm::ThreadId]) {
        println!("event  {event:?} -> {} thread(s)", spawned.len());
    }
    fn assertion_evaluated(&mut self, o: &AssertionOutcome) {
        println!("assert {} {}", if o.passed { "ok  " } else { "FAIL" }, o.message);
    }
    fn frame_ended(&mut self, s: &FrameSummary) {
        self.frames += 1;
        if s.blocks_executed > 1 {
            println!("frame  #{} ran {} blocks", self.frames, s.blocks_executed);
        }
    }
    fn test_finished(&mut self, r: &TestResult) {
        println!("finish {} {} after {} frames", r.name, r.status, self.frames);
    }
}

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/wait_all_done.proj.json");
    let project = bbt::io::load_project(path.as_ref()).unwrap();

    let fingerprint = |log: bool| {
        let trace = TraceRecorder::new();
        let mut sched = Scheduler::from_project(project.clone(), 0);
        sched.add_observer(Box::new(trace.clone()));
        if log {
            sched.add_observer(Box::<Log>::default());
        }
        sched.run_test("wait for movement", &CancelToken::new()).unwrap();
        trace.snapshot()
    };
    let a = fingerprint(true);
    let b = fingerprint(false);
    println!("{} blocks over {} frames, trace hash {:016x}", a.blocks, a.frames, a.hash);
    assert_eq!(a.hash, b.hash);
}
