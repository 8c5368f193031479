//! Semantics of the test-category blocks.

use crate::ast::Block;
use crate::catalog::MYSELF;
use crate::testing::{AssertionKind, AssertionOutcome, ErrorKind};
use crate::value::{compare, to_bool, to_text, values_equal, Value};
use crate::vm::scheduler::{Event, InputChange, Scheduler, Step, Turn};
use crate::vm::{normalize_key, seconds_to_frames, EvalError, Owner, Thread};

fn show(v: &Value) -> String {
    match v {
        Value::String(s) => format!("\"{s}\""),
        other => to_text(other),
    }
}

impl Scheduler {
    fn is_active_test(&self, th: &Thread) -> bool {
        self.test.as_ref().is_some_and(|t| t.thread == th.id)
    }

    pub(crate) fn exec_test_block(&mut self, th: &mut Thread, b: &Block) -> Step {
        match b.opcode.as_str() {
            "test_start" => Step::Continue,
            "test_restore" => {
                if self.is_active_test(th) {
                    let test = self.test.as_mut().unwrap();
                    test.restored = true;
                    let snapshot = test.snapshot.clone();
                    self.replace_world(snapshot);
                }
                Step::Finish
            }
            "test_set_timeout" => {
                let secs = self.eval_number_lenient(th, b.inputs.get("SECONDS"), &b.id);
                let now = self.total_frames();
                if let Some(t) = self.test.as_mut().filter(|t| t.thread == th.id) {
                    t.deadline = now + seconds_to_frames(secs).max(1);
                }
                Step::Continue
            }
            "test_yield" => Step::Yield(Turn::Soft),
            "test_wait_all_done" => {
                if self.program_threads_alive() > 0 {
                    Step::Stay(Turn::Waiting)
                } else {
                    Step::Continue
                }
            }
            "test_green_flag" => {
                self.dispatch_event(&Event::GreenFlag);
                Step::Yield(Turn::Soft)
            }
            "test_press_key" => {
                let key = normalize_key(b.field("KEY").unwrap_or(""));
                self.dispatch_event(&Event::KeyPressed(key));
                Step::Yield(Turn::Soft)
            }
            "test_key_down" => {
                self.apply_input(&InputChange::KeyDown(b.field("KEY").unwrap_or("").into()));
                Step::Yield(Turn::Soft)
            }
            "test_key_up" => {
                self.apply_input(&InputChange::KeyUp(b.field("KEY").unwrap_or("").into()));
                Step::Yield(Turn::Soft)
            }
            "test_click_sprite" => {
                let target = b.field("SPRITE").unwrap_or(MYSELF);
                let name = if target == MYSELF {
                    match th.owner {
                        Owner::Sprite(id) => self.world.sprite(id).map(|s| s.name.clone()),
                        Owner::Stage => None,
                    }
                } else {
                    Some(target.to_owned())
                };
                match name {
                    Some(n) => {
                        self.dispatch_event(&Event::SpriteClicked(n));
                    }
                    None => self.warn(Some(&b.id), "click target is not a sprite".into()),
                }
                Step::Yield(Turn::Soft)
            }
            "test_broadcast" => {
                let v = self.eval_lenient(th, b.inputs.get("MESSAGE"), &b.id);
                self.dispatch_event(&Event::Broadcast(to_text(&v)));
                Step::Yield(Turn::Soft)
            }
            "test_move_mouse" => {
                let x = self.eval_number_lenient(th, b.inputs.get("X"), &b.id);
                let y = self.eval_number_lenient(th, b.inputs.get("Y"), &b.id);
                self.apply_input(&InputChange::MouseMove { x, y });
                Step::Yield(Turn::Soft)
            }
            "test_set_mouse_down" => {
                let down = self.eval_bool_lenient(th, b.inputs.get("DOWN"), &b.id);
                self.apply_input(&InputChange::MouseButton(down));
                Step::Yield(Turn::Soft)
            }
            "test_assert" | "test_assert_equals" | "test_assert_greater" | "test_assert_less" => {
                let outcome = self.assertion(th, b);
                self.record(th, outcome);
                Step::Continue
            }
            other => {
                self.warn(Some(&b.id), format!("`{other}` is not a test command"));
                Step::Continue
            }
        }
    }

    fn assertion(&mut self, th: &Thread, b: &Block) -> Result<AssertionOutcome, (AssertionKind, EvalError)> {
        let (kind, a, c) = match b.opcode.as_str() {
            "test_assert" => {
                let v = self.eval(th, b.inputs.get("CONDITION")).map_err(|e| (AssertionKind::True, e))?;
                let passed = b.inputs.contains_key("CONDITION") && to_bool(&v);
                return Ok(AssertionOutcome {
                    block_id: b.id.clone(),
                    kind: AssertionKind::True,
                    expected: Some("true".into()),
                    actual: Some(passed.to_string()),
                    passed,
                    error: None,
                    message: if passed { "condition holds".into() } else { "expected true, got false".into() },
                });
            }
            "test_assert_equals" => (AssertionKind::Equals, "ACTUAL", "EXPECTED"),
            "test_assert_greater" => (AssertionKind::Greater, "ACTUAL", "LIMIT"),
            _ => (AssertionKind::Less, "ACTUAL", "LIMIT"),
        };
        let actual = self.eval(th, b.inputs.get(a)).map_err(|e| (kind, e))?;
        let other = self.eval(th, b.inputs.get(c)).map_err(|e| (kind, e))?;
        let (passed, expected) = match kind {
            AssertionKind::Equals => (values_equal(&actual, &other), show(&other)),
            AssertionKind::Greater => (compare(&actual, &other).is_gt(), format!("> {}", show(&other))),
            _ => (compare(&actual, &other).is_lt(), format!("< {}", show(&other))),
        };
        let message = if passed {
            format!("{} is {expected}", show(&actual))
        } else {
            format!("expected {expected}, got {}", show(&actual))
        };
        Ok(AssertionOutcome {
            block_id: b.id.clone(),
            kind,
            expected: Some(expected),
            actual: Some(show(&actual)),
            passed,
            error: None,
            message,
        })
    }

    fn record(&mut self, th: &Thread, result: Result<AssertionOutcome, (AssertionKind, EvalError)>) {
        let outcome = match result {
            Ok(o) => o,
            Err((kind, e)) => {
                let reason = if e.sprite_not_found { ErrorKind::SpriteNotFound } else { ErrorKind::EvaluationError };
                if let Some(t) = self.test.as_mut().filter(|t| t.thread == th.id) {
                    t.error.get_or_insert(reason);
                }
                AssertionOutcome {
                    block_id: e.block_id.clone(),
                    kind,
                    expected: None,
                    actual: None,
                    passed: false,
                    error: Some(e.message.clone()),
                    message: format!("evaluation error: {}", e.message),
                }
            }
        };
        if !outcome.passed {
            log::debug!("assertion {} failed: {}", outcome.block_id, outcome.message);
        }
        self.notify(|o| o.assertion_evaluated(&outcome));
        match self.test.as_mut().filter(|t| t.thread == th.id) {
            Some(t) => t.outcomes.push(outcome),
            None => self.warn(None, "assertion outside a running test ignored".into()),
        }
    }
}
