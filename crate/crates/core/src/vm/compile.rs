//! Lowers block scripts to flat op lists with explicit jumps and loop edges.

use crate::ast::{Block, Input, Project, Script, TargetRef};
use crate::vm::normalize_key;

/// The event a script's hat listens for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trigger {
    GreenFlag,
    Key(String),
    Clicked,
    Broadcast(String),
    CloneStart,
    Test(String),
    /// Headless script: runnable only by direct start.
    None,
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    /// A block without nested control flow.
    Exec(Block),
    /// Pushes the iteration count of a counted loop.
    RepeatInit { id: String, times: Option<Input> },
    /// Pops and exits when the counter is spent, otherwise decrements.
    RepeatCheck { exit: usize },
    /// End of a counted loop body. Yields for the frame unless this was the
    /// last iteration.
    RepeatEdge { head: usize },
    /// Exits a repeat-until loop once its condition holds.
    UntilCheck { id: String, cond: Option<Input>, exit: usize },
    /// End of a forever or repeat-until body: always yields for the frame.
    LoopEdge { head: usize },
    JumpUnless { id: String, cond: Option<Input>, target: usize },
    Jump(usize),
}

#[derive(Debug, Clone)]
pub struct CompiledScript {
    pub target: TargetRef,
    /// Index of the script within its target.
    pub index: usize,
    pub trigger: Trigger,
    pub hat_id: Option<String>,
    pub(crate) ops: Vec<Op>,
}

impl CompiledScript {
    pub fn op_count(&self) -> usize {
        self.ops.len()
    }
}

/// An immutable project plus its compiled scripts. Shared by every scheduler
/// running the project.
#[derive(Debug, Clone)]
pub struct Program {
    pub project: Project,
    pub scripts: Vec<CompiledScript>,
}

impl Program {
    pub fn new(project: Project) -> Self {
        let scripts = project
            .scripts()
            .map(|(target, index, script)| compile_script(target, index, script))
            .collect();
        Program { project, scripts }
    }

    /// Compiled-script index of `(target, index)`.
    pub fn script_index(&self, target: TargetRef, index: usize) -> Option<usize> {
        self.scripts.iter().position(|s| s.target == target && s.index == index)
    }

    pub fn scripts_for(&self, target: TargetRef) -> impl Iterator<Item = (usize, &CompiledScript)> {
        self.scripts.iter().enumerate().filter(move |(_, s)| s.target == target)
    }

    /// Compiled-script index of the test with the given name.
    pub fn test_script(&self, name: &str) -> Option<usize> {
        self.scripts
            .iter()
            .position(|s| matches!(&s.trigger, Trigger::Test(n) if n == name))
    }

    /// Names of all tests in project order.
    pub fn test_names(&self) -> Vec<String> {
        self.scripts
            .iter()
            .filter_map(|s| match &s.trigger {
                Trigger::Test(n) => Some(n.clone()),
                _ => None,
            })
            .collect()
    }
}

fn trigger_of(hat: Option<&Block>) -> Trigger {
    let Some(hat) = hat else { return Trigger::None };
    match hat.opcode.as_str() {
        "event_whenflagclicked" => Trigger::GreenFlag,
        "event_whenkeypressed" => Trigger::Key(normalize_key(hat.field("KEY_OPTION").unwrap_or(""))),
        "event_whenthisspriteclicked" => Trigger::Clicked,
        "event_whenbroadcastreceived" => {
            Trigger::Broadcast(hat.field("BROADCAST_OPTION").unwrap_or("").to_lowercase())
        }
        "control_start_as_clone" => Trigger::CloneStart,
        "test_start" => Trigger::Test(hat.field("NAME").unwrap_or("").to_owned()),
        _ => Trigger::None,
    }
}

fn compile_script(target: TargetRef, index: usize, script: &Script) -> CompiledScript {
    let mut ops = Vec::new();
    compile_list(&script.body, &mut ops);
    CompiledScript {
        target,
        index,
        trigger: trigger_of(script.hat.as_ref()),
        hat_id: script.hat.as_ref().map(|h| h.id.clone()),
        ops,
    }
}

fn compile_list(blocks: &[Block], ops: &mut Vec<Op>) {
    for b in blocks {
        compile_block(b, ops);
    }
}

fn placeholder() -> usize {
    usize::MAX
}

fn compile_block(b: &Block, ops: &mut Vec<Op>) {
    let cond = || b.inputs.get("CONDITION").cloned();
    match b.opcode.as_str() {
        "control_repeat" => {
            ops.push(Op::RepeatInit { id: b.id.clone(), times: b.inputs.get("TIMES").cloned() });
            let head = ops.len();
            ops.push(Op::RepeatCheck { exit: placeholder() });
            compile_list(b.substack("SUBSTACK"), ops);
            ops.push(Op::RepeatEdge { head });
            let exit = ops.len();
            ops[head] = Op::RepeatCheck { exit };
        }
        "control_repeat_until" => {
            let head = ops.len();
            ops.push(Op::UntilCheck { id: b.id.clone(), cond: cond(), exit: placeholder() });
            compile_list(b.substack("SUBSTACK"), ops);
            ops.push(Op::LoopEdge { head });
            let exit = ops.len();
            ops[head] = Op::UntilCheck { id: b.id.clone(), cond: cond(), exit };
        }
        "control_forever" => {
            let head = ops.len();
            compile_list(b.substack("SUBSTACK"), ops);
            ops.push(Op::LoopEdge { head });
        }
        "control_if" => {
            let at = ops.len();
            ops.push(Op::JumpUnless { id: b.id.clone(), cond: None, target: placeholder() });
            compile_list(b.substack("SUBSTACK"), ops);
            let end = ops.len();
            ops[at] = Op::JumpUnless { id: b.id.clone(), cond: cond(), target: end };
        }
        "control_if_else" => {
            let at = ops.len();
            ops.push(Op::JumpUnless { id: b.id.clone(), cond: None, target: placeholder() });
            compile_list(b.substack("SUBSTACK"), ops);
            let jump = ops.len();
            ops.push(Op::Jump(placeholder()));
            let else_start = ops.len();
            compile_list(b.substack("SUBSTACK2"), ops);
            let end = ops.len();
            ops[at] = Op::JumpUnless { id: b.id.clone(), cond: cond(), target: else_start };
            ops[jump] = Op::Jump(end);
        }
        _ => {
            // Substacks are lowered above; everything else executes as a unit.
            ops.push(Op::Exec(b.clone()));
        }
    }
}
