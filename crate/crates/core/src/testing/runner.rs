use thiserror::Error;

use crate::ast::TargetRef;
use crate::testing::{ActiveTest, CancelToken, ErrorKind, SuiteResult, TestResult, TestStatus};
use crate::vm::{Origin, Owner, Scheduler, ThreadId, World};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestError {
    #[error("a test is already running")]
    AlreadyRunning,
    #[error("no test named `{0}`")]
    NotFound(String),
    #[error("project contains no tests")]
    EmptySuite,
}

impl Scheduler {
    /// Deep copy of the whole world.
    pub fn snapshot(&self) -> World {
        self.world.clone()
    }

    /// Replaces the world with a snapshot. Mid-frame this ends the frame.
    pub fn restore(&mut self, snapshot: World) {
        self.replace_world(snapshot);
    }

    pub fn active_test(&self) -> Option<&str> {
        self.test.as_ref().map(|t| t.name.as_str())
    }

    /// Starts a test: captures the snapshot, arms the timeout, locks input
    /// and spawns the test thread.
    pub fn start_test(&mut self, name: &str) -> Result<ThreadId, TestError> {
        if self.test.is_some() {
            return Err(TestError::AlreadyRunning);
        }
        let program = std::sync::Arc::clone(self.program());
        let script = program.test_script(name).ok_or_else(|| TestError::NotFound(name.to_owned()))?;
        let target = program.scripts[script].target;
        let sprite = program.project.target_name(target).to_owned();
        let owner = match target {
            TargetRef::Stage => Owner::Stage,
            TargetRef::Sprite(_) => match self.world.original(&sprite) {
                Some(s) => Owner::Sprite(s.instance),
                None => return Err(TestError::NotFound(name.to_owned())),
            },
        };
        let snapshot = self.world.clone();
        self.input_lock = true;
        self.test = Some(ActiveTest {
            name: name.to_owned(),
            sprite,
            thread: ThreadId(0),
            snapshot,
            deadline: self.total_frames() + self.default_timeout,
            outcomes: Vec::new(),
            error: None,
            restored: false,
        });
        self.notify(|o| o.test_started(name));
        let thread = self.spawn(script, owner, Origin::Test);
        self.test.as_mut().unwrap().thread = thread;
        Ok(thread)
    }

    fn test_thread_alive(&self) -> bool {
        let Some(t) = &self.test else { return false };
        !t.restored && self.world.thread(t.thread).is_some_and(|th| th.is_alive())
    }

    fn finish_test(&mut self, forced: Option<ErrorKind>, started: u64) -> TestResult {
        let test = self.test.take().expect("a running test");
        match forced {
            Some(ErrorKind::Timeout) => self.replace_world(test.snapshot),
            Some(ErrorKind::Aborted) => self.stop_all(),
            _ => {}
        }
        // drop the finished test thread from the list
        self.world.threads.retain(|t| t.id != test.thread);
        self.input_lock = false;
        self.reset_input();
        let error = forced.or(test.error);
        let status = match error {
            Some(e) => TestStatus::Error(e),
            None if test.outcomes.iter().any(|o| !o.passed) => TestStatus::Failed,
            None => TestStatus::Passed,
        };
        let result = TestResult {
            name: test.name,
            sprite: test.sprite,
            status,
            vacuous: status == TestStatus::Passed && test.outcomes.is_empty(),
            outcomes: test.outcomes,
            frames: self.total_frames() - started,
        };
        self.notify(|o| o.test_finished(&result));
        result
    }

    /// Runs one test to completion, timeout or cancellation.
    pub fn run_test(&mut self, name: &str, cancel: &CancelToken) -> Result<TestResult, TestError> {
        let started = self.total_frames();
        self.start_test(name)?;
        let forced = loop {
            if !self.test_thread_alive() {
                break None;
            }
            if cancel.is_cancelled() {
                break Some(ErrorKind::Aborted);
            }
            if self.total_frames() >= self.test.as_ref().unwrap().deadline {
                break Some(ErrorKind::Timeout);
            }
            self.run_frame();
        };
        Ok(self.finish_test(forced, started))
    }

    /// Runs every test in project order, then reports suite tests whose
    /// sprite the project lacks. Stops after an aborted test; the remaining
    /// tests stay idle.
    pub fn run_suite(&mut self, cancel: &CancelToken) -> Result<SuiteResult, TestError> {
        let program = std::sync::Arc::clone(self.program());
        let names = program.test_names();
        let unmatched = &program.project.unmatched_tests;
        if names.is_empty() && unmatched.is_empty() {
            return Err(TestError::EmptySuite);
        }
        let mut tests = Vec::new();
        let mut aborted = false;
        for name in &names {
            if aborted {
                let script = program.test_script(name).unwrap();
                let sprite = program.project.target_name(program.scripts[script].target);
                tests.push(TestResult::idle(name, sprite));
                continue;
            }
            let result = self.run_test(name, cancel)?;
            aborted = result.status == TestStatus::Error(ErrorKind::Aborted);
            tests.push(result);
        }
        for u in unmatched {
            let name = u.script.test_name().unwrap_or("");
            let mut r = TestResult::idle(name, &u.sprite);
            if !aborted {
                r.status = TestStatus::Error(ErrorKind::SpriteNotFound);
            }
            tests.push(r);
        }
        let result = SuiteResult { tests, aborted };
        self.notify(|o| o.suite_finished(&result));
        Ok(result)
    }
}
