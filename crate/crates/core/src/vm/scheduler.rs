use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ast::TargetRef;
use crate::catalog::{Category, OpcodeCatalog};
use crate::testing::ActiveTest;
use crate::vm::compile::{Op, Program, Trigger};
use crate::vm::observer::{FrameSummary, Observer};
use crate::vm::{
    normalize_key, InputState, InstanceId, Origin, Owner, SpriteState, Thread, ThreadId,
    ThreadStatus, World, SOFT_YIELD_CAP, STAGE_HALF_HEIGHT, STAGE_HALF_WIDTH,
};

/// Something that can activate hat scripts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    GreenFlag,
    KeyPressed(String),
    SpriteClicked(String),
    Broadcast(String),
    CloneStart(InstanceId),
}

/// A change to keyboard or mouse state.
#[derive(Debug, Clone, PartialEq)]
pub enum InputChange {
    KeyDown(String),
    KeyUp(String),
    MouseMove { x: f64, y: f64 },
    MouseButton(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeDiagnostic {
    pub clock: u64,
    pub block_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("condition not reached within {frames} frames")]
pub struct Timeout {
    pub frames: u64,
}

/// How a thread's turn ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Turn {
    /// Done for this frame (loop edge, timer).
    Frame,
    /// Blocked on a condition; re-checked at its next turn.
    Waiting,
    /// Back of this frame's queue.
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Step {
    Continue,
    Jump(usize),
    JumpYield(usize, Turn),
    /// Advance past the current op, then yield.
    Yield(Turn),
    /// Yield without advancing; the op runs again next turn.
    Stay(Turn),
    Finish,
}

const DIAGNOSTIC_CAP: usize = 1000;

/// The sequencer. Strictly single-threaded; may be moved between threads.
pub struct Scheduler {
    program: Arc<Program>,
    pub(crate) world: World,
    pub(crate) input_lock: bool,
    queue: VecDeque<ThreadId>,
    in_frame: bool,
    /// Set when the world was replaced mid-frame; the frame ends at once and
    /// the clock does not advance.
    pub(crate) frame_aborted: bool,
    current: Option<ThreadId>,
    current_killed: bool,
    pub(crate) test: Option<ActiveTest>,
    observers: Vec<Box<dyn Observer>>,
    diagnostics: Vec<RuntimeDiagnostic>,
    total_frames: u64,
    frame_blocks: usize,
    pub(crate) default_timeout: u64,
    seed: u64,
}

impl std::fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Scheduler")
            .field("clock", &self.world.clock)
            .field("threads", &self.world.threads.len())
            .field("input_lock", &self.input_lock)
            .finish_non_exhaustive()
    }
}

fn initial_world(program: &Program, seed: u64) -> World {
    let sprites: Vec<SpriteState> = program
        .project
        .sprites
        .iter()
        .enumerate()
        .map(|(i, s)| SpriteState {
            instance: InstanceId(i as u32),
            sprite: i,
            name: s.name.clone(),
            x: s.x.clamp(-STAGE_HALF_WIDTH, STAGE_HALF_WIDTH),
            y: s.y.clamp(-STAGE_HALF_HEIGHT, STAGE_HALF_HEIGHT),
            direction: crate::vm::wrap_direction(s.direction),
            size: s.size,
            visible: s.visible,
            volume: s.volume.clamp(0.0, 100.0),
            costume: s.current_costume.min(s.costumes.len().saturating_sub(1)),
            bubble: None,
            bubble_deadline: None,
            variables: s.variables.clone(),
            is_clone: false,
        })
        .collect();
    World {
        next_instance: sprites.len() as u32,
        sprites,
        stage_variables: program.project.stage.variables.clone(),
        threads: Vec::new(),
        clock: 0,
        input: InputState::default(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        next_thread: 1,
    }
}

impl Scheduler {
    pub fn new(program: Arc<Program>, seed: u64) -> Self {
        let world = initial_world(&program, seed);
        Scheduler {
            program,
            world,
            input_lock: false,
            queue: VecDeque::new(),
            in_frame: false,
            frame_aborted: false,
            current: None,
            current_killed: false,
            test: None,
            observers: Vec::new(),
            diagnostics: Vec::new(),
            total_frames: 0,
            frame_blocks: 0,
            default_timeout: crate::testing::DEFAULT_TIMEOUT_FRAMES,
            seed,
        }
    }

    /// Convenience constructor compiling a project on the spot.
    pub fn from_project(project: crate::ast::Project, seed: u64) -> Self {
        Self::new(Arc::new(Program::new(project)), seed)
    }

    pub fn program(&self) -> &Arc<Program> {
        &self.program
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Direct mutable access, for fixtures and tools. Not used by the runtime.
    pub fn world_mut(&mut self) -> &mut World {
        &mut self.world
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn clock(&self) -> u64 {
        self.world.clock
    }

    /// Frames run by this scheduler, including frames whose clock advance was
    /// undone by a restore.
    pub fn total_frames(&self) -> u64 {
        self.total_frames
    }

    pub fn input_locked(&self) -> bool {
        self.input_lock
    }

    pub fn diagnostics(&self) -> &[RuntimeDiagnostic] {
        &self.diagnostics
    }

    pub fn add_observer(&mut self, observer: Box<dyn Observer>) {
        self.observers.push(observer);
    }

    /// Default test timeout in frames for tests started on this scheduler.
    pub fn set_default_timeout(&mut self, frames: u64) {
        self.default_timeout = frames;
    }

    pub fn default_timeout(&self) -> u64 {
        self.default_timeout
    }

    pub(crate) fn notify(&mut self, mut f: impl FnMut(&mut dyn Observer)) {
        for o in &mut self.observers {
            f(o.as_mut());
        }
    }

    pub(crate) fn warn(&mut self, block_id: Option<&str>, message: String) {
        log::warn!("{message}");
        if self.diagnostics.len() < DIAGNOSTIC_CAP {
            self.diagnostics.push(RuntimeDiagnostic {
                clock: self.world.clock,
                block_id: block_id.map(str::to_owned),
                message,
            });
        }
    }

    /// Program-origin threads that have not finished.
    pub fn program_threads_alive(&self) -> usize {
        self.world
            .threads
            .iter()
            .filter(|t| t.origin == Origin::Program && t.is_alive())
            .count()
    }

    pub(crate) fn spawn(&mut self, script: usize, owner: Owner, origin: Origin) -> ThreadId {
        let id = ThreadId(self.world.next_thread);
        self.world.next_thread += 1;
        self.world.threads.push(Thread::new(id, script, owner, origin));
        if self.in_frame {
            self.queue.push_back(id);
        }
        self.notify(|o| o.thread_spawned(id, script));
        id
    }

    /// Starts a script directly, regardless of its hat.
    pub fn start_script(&mut self, target: TargetRef, index: usize) -> Option<ThreadId> {
        let script = self.program.script_index(target, index)?;
        let owner = match target {
            TargetRef::Stage => Owner::Stage,
            TargetRef::Sprite(i) => Owner::Sprite(self.world.original(&self.program.project.sprites[i].name)?.instance),
        };
        Some(self.spawn(script, owner, Origin::Program))
    }

    pub(crate) fn kill(&mut self, id: ThreadId) {
        if let Some(t) = self.world.thread_mut(id) {
            t.status = ThreadStatus::Finished;
        }
        if self.current == Some(id) {
            self.current_killed = true;
        }
    }

    /// Retires every program thread (the native "stop all").
    pub(crate) fn stop_program_threads(&mut self) {
        let ids: Vec<ThreadId> = self
            .world
            .threads
            .iter()
            .filter(|t| t.origin == Origin::Program && t.is_alive())
            .map(|t| t.id)
            .collect();
        for id in ids {
            self.kill(id);
        }
    }

    /// Retires every thread, tests included.
    pub fn stop_all(&mut self) {
        let ids: Vec<ThreadId> = self.world.threads.iter().map(|t| t.id).collect();
        for id in ids {
            self.kill(id);
        }
    }

    fn owners_for(&mut self, event: &Event) -> Vec<(TargetRef, Owner)> {
        match event {
            Event::CloneStart(inst) => match self.world.sprite(*inst) {
                Some(s) => vec![(TargetRef::Sprite(s.sprite), Owner::Sprite(*inst))],
                None => Vec::new(),
            },
            Event::SpriteClicked(name) => match self.world.original(name) {
                Some(s) => vec![(TargetRef::Sprite(s.sprite), Owner::Sprite(s.instance))],
                None => {
                    self.warn(None, format!("click on unknown sprite `{name}` ignored"));
                    Vec::new()
                }
            },
            _ => std::iter::once((TargetRef::Stage, Owner::Stage))
                .chain(
                    self.world
                        .sprites
                        .iter()
                        .map(|s| (TargetRef::Sprite(s.sprite), Owner::Sprite(s.instance))),
                )
                .collect(),
        }
    }

    fn hat_matches(event: &Event, trigger: &Trigger) -> bool {
        match (event, trigger) {
            (Event::GreenFlag, Trigger::GreenFlag) => true,
            (Event::KeyPressed(k), Trigger::Key(hk)) => hk == "any" || *hk == normalize_key(k),
            (Event::SpriteClicked(_), Trigger::Clicked) => true,
            (Event::Broadcast(m), Trigger::Broadcast(hm)) => *hm == m.to_lowercase(),
            (Event::CloneStart(_), Trigger::CloneStart) => true,
            _ => false,
        }
    }

    /// Activates matching hats. Returns `(activated, already_running)`.
    pub(crate) fn fire(&mut self, event: &Event) -> (Vec<ThreadId>, Vec<ThreadId>) {
        let program = Arc::clone(&self.program);
        let mut activated = Vec::new();
        let mut running = Vec::new();
        // Threads that finished earlier in this frame still count as running
        // until the frame ends; otherwise two receivers broadcasting to each
        // other would ping-pong forever inside one frame.
        let in_frame = self.in_frame;
        let live: HashMap<(usize, Owner), usize> = self
            .world
            .threads
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_alive() || in_frame)
            .map(|(i, t)| ((t.script, t.owner), i))
            .collect();
        for (target, owner) in self.owners_for(event) {
            for (si, script) in program.scripts_for(target) {
                if !Self::hat_matches(event, &script.trigger) {
                    continue;
                }
                match live.get(&(si, owner)).map(|&i| &mut self.world.threads[i]) {
                    Some(t) if *event == Event::GreenFlag => {
                        t.restart();
                        let id = t.id;
                        if self.in_frame && !self.queue.contains(&id) && self.current != Some(id) {
                            self.queue.push_back(id);
                        }
                        activated.push(id);
                    }
                    Some(t) => running.push(t.id),
                    None => activated.push(self.spawn(si, owner, Origin::Program)),
                }
            }
        }
        if activated.is_empty() && running.is_empty() {
            if let Event::Broadcast(m) = event {
                self.warn(None, format!("broadcast `{m}` has no receivers"));
            }
        }
        self.notify(|o| o.event_dispatched(event, &activated));
        (activated, running)
    }

    /// Activates every hat script listening for `event` that is not already
    /// running (green flag restarts running ones). Returns the activated
    /// thread ids in activation order.
    pub fn dispatch_event(&mut self, event: &Event) -> Vec<ThreadId> {
        self.fire(event).0
    }

    pub(crate) fn apply_input(&mut self, change: &InputChange) {
        match change {
            InputChange::KeyDown(k) => {
                let k = normalize_key(k);
                self.world.input.keys_down.insert(k.clone());
                self.dispatch_event(&Event::KeyPressed(k));
            }
            InputChange::KeyUp(k) => {
                self.world.input.keys_down.remove(&normalize_key(k));
            }
            InputChange::MouseMove { x, y } => {
                self.world.input.mouse_x = x.clamp(-STAGE_HALF_WIDTH, STAGE_HALF_WIDTH);
                self.world.input.mouse_y = y.clamp(-STAGE_HALF_HEIGHT, STAGE_HALF_HEIGHT);
            }
            InputChange::MouseButton(down) => self.world.input.mouse_down = *down,
        }
    }

    /// External (user) input. Rejected while a test holds the input lock.
    pub fn inject_input(&mut self, change: InputChange) -> bool {
        if self.input_lock {
            return false;
        }
        self.apply_input(&change);
        true
    }

    pub(crate) fn reset_input(&mut self) {
        self.world.input = InputState::default();
    }

    /// Runs one frame: every live thread gets turns until it is done for the
    /// frame, waiting, or finished. Then the clock advances by one.
    pub fn run_frame(&mut self) -> FrameSummary {
        self.in_frame = true;
        self.frame_aborted = false;
        self.frame_blocks = 0;
        let mut turns = 0;
        for t in &mut self.world.threads {
            t.soft_turns = 0;
            if t.is_alive() {
                t.status = ThreadStatus::Runnable;
            }
        }
        self.queue = self.world.threads.iter().filter(|t| t.is_alive()).map(|t| t.id).collect();
        while let Some(id) = self.queue.pop_front() {
            turns += 1;
            self.run_turn(id);
            if self.frame_aborted {
                break;
            }
        }
        self.queue.clear();
        self.in_frame = false;
        if !self.frame_aborted {
            self.world.threads.retain(Thread::is_alive);
            self.world.clock += 1;
        }
        self.total_frames += 1;
        let summary = FrameSummary {
            clock: self.world.clock,
            blocks_executed: self.frame_blocks,
            turns,
            live_threads: self.world.threads.len(),
            input_locked: self.input_lock,
        };
        self.notify(|o| o.frame_ended(&summary));
        summary
    }

    /// Runs frames until `pred` holds or `budget` frames have run.
    pub fn advance_until(
        &mut self,
        mut pred: impl FnMut(&Scheduler) -> bool,
        budget: u64,
    ) -> Result<u64, Timeout> {
        let mut frames = 0;
        loop {
            if pred(self) {
                return Ok(frames);
            }
            if frames >= budget {
                return Err(Timeout { frames });
            }
            self.run_frame();
            frames += 1;
        }
    }

    fn run_turn(&mut self, id: ThreadId) {
        let Ok(idx) = self.world.threads.binary_search_by_key(&id, |t| t.id) else { return };
        if !self.world.threads[idx].is_alive() {
            return;
        }
        let mut th = self.world.threads[idx].clone();
        let program = Arc::clone(&self.program);
        let ops = &program.scripts[th.script].ops;
        self.current = Some(id);
        self.current_killed = false;

        let end = loop {
            let Some(op) = ops.get(th.pc) else { break None };
            let step = self.exec_op(&mut th, op);
            if self.frame_aborted {
                self.current = None;
                return;
            }
            if self.current_killed {
                break None;
            }
            match step {
                Step::Continue => th.pc += 1,
                Step::Jump(target) => th.pc = target,
                Step::JumpYield(target, turn) => {
                    th.pc = target;
                    break Some(turn);
                }
                Step::Yield(turn) => {
                    th.pc += 1;
                    break Some(turn);
                }
                Step::Stay(turn) => break Some(turn),
                Step::Finish => break None,
            }
        };
        self.current = None;

        match end {
            None => th.status = ThreadStatus::Finished,
            Some(Turn::Frame) => th.status = ThreadStatus::DoneForFrame,
            Some(Turn::Waiting) => th.status = ThreadStatus::Waiting,
            Some(Turn::Soft) => {
                th.soft_turns += 1;
                if th.soft_turns >= SOFT_YIELD_CAP {
                    th.status = ThreadStatus::DoneForFrame;
                } else {
                    th.status = ThreadStatus::Runnable;
                    self.queue.push_back(id);
                }
            }
        }
        if let Some(slot) = self.world.threads.iter_mut().find(|t| t.id == id) {
            if slot.is_alive() {
                *slot = th;
            }
        }
    }

    pub(crate) fn block_executed(&mut self, thread: ThreadId, block_id: &str) {
        self.frame_blocks += 1;
        self.notify(|o| o.block_executed(thread, block_id));
    }

    fn exec_op(&mut self, th: &mut Thread, op: &Op) -> Step {
        match op {
            Op::Exec(b) => {
                self.block_executed(th.id, &b.id);
                let category = OpcodeCatalog::global().get(&b.opcode).map(|s| s.category);
                match category {
                    Some(
                        Category::TestControl | Category::TestTrigger | Category::TestAssertion,
                    ) => self.exec_test_block(th, b),
                    _ => self.exec_native(th, b),
                }
            }
            Op::RepeatInit { id, times } => {
                self.block_executed(th.id, id);
                let n = self.eval_number_lenient(th, times.as_ref(), id).round();
                th.loops.push(if n > 0.0 { n.min(i64::MAX as f64) as i64 } else { 0 });
                Step::Continue
            }
            Op::RepeatCheck { exit } => match th.loops.last_mut() {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    Step::Continue
                }
                _ => {
                    th.loops.pop();
                    Step::Jump(*exit)
                }
            },
            Op::RepeatEdge { head, .. } => {
                if th.loops.last().copied().unwrap_or(0) > 0 {
                    Step::JumpYield(*head, Turn::Frame)
                } else {
                    Step::Jump(*head)
                }
            }
            Op::UntilCheck { id, cond, exit } => {
                self.block_executed(th.id, id);
                if self.eval_bool_lenient(th, cond.as_ref(), id) {
                    Step::Jump(*exit)
                } else {
                    Step::Continue
                }
            }
            Op::LoopEdge { head, .. } => Step::JumpYield(*head, Turn::Frame),
            Op::JumpUnless { id, cond, target } => {
                self.block_executed(th.id, id);
                if self.eval_bool_lenient(th, cond.as_ref(), id) {
                    Step::Continue
                } else {
                    Step::Jump(*target)
                }
            }
            Op::Jump(target) => Step::Jump(*target),
        }
    }

    /// Replaces the whole world mid-frame (used by restore). The current
    /// frame ends immediately without advancing the clock.
    pub(crate) fn replace_world(&mut self, world: World) {
        self.world = world;
        if self.in_frame {
            self.frame_aborted = true;
            self.queue.clear();
        }
    }
}
