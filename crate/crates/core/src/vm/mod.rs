//! The sequencer and the native block runtime.
//!
//! Scripts are compiled to a flat op list per script. A [`Scheduler`] owns the
//! mutable [`World`] (sprites, variables, threads, clock, input, rng) and
//! advances it one frame at a time. One frame is 1/30 s of virtual time.

pub mod collision;
mod compile;
mod native;
mod observer;
pub(crate) mod scheduler;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use compile::{CompiledScript, Program, Trigger};
pub use native::{limit_precision, EvalError};
pub use observer::{FrameSummary, Observer, TraceRecorder, TraceSnapshot};
pub use scheduler::{Event, InputChange, RuntimeDiagnostic, Scheduler, Timeout};

use crate::value::Value;

pub const FRAMES_PER_SECOND: f64 = 30.0;
pub const STAGE_HALF_WIDTH: f64 = 240.0;
pub const STAGE_HALF_HEIGHT: f64 = 180.0;
/// Soft-yield re-entries a single thread may take within one frame.
pub const SOFT_YIELD_CAP: u32 = 100;
pub const CLONE_LIMIT: usize = 300;

/// Converts a duration in seconds to whole frames, rounding up. Products
/// within 1e-9 of an integer count as that integer, so 0.1 s is 3 frames.
pub fn seconds_to_frames(seconds: f64) -> u64 {
    let exact = seconds * FRAMES_PER_SECOND;
    let frames = if (exact - exact.round()).abs() < 1e-9 { exact.round() } else { exact.ceil() };
    if frames.is_finite() && frames > 0.0 {
        frames as u64
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ThreadId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceId(pub u32);

/// The stage or one live sprite instance (original or clone).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Owner {
    Stage,
    Sprite(InstanceId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Program,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThreadStatus {
    Runnable,
    DoneForFrame,
    Waiting,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum WaitState {
    None,
    Timer(u64),
    Threads(Vec<ThreadId>),
}

/// A script under execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Thread {
    pub id: ThreadId,
    /// Index into [`Program::scripts`].
    pub script: usize,
    pub owner: Owner,
    pub origin: Origin,
    pub status: ThreadStatus,
    pub(crate) pc: usize,
    /// Remaining iterations of each enclosing counted loop, innermost last.
    pub(crate) loops: Vec<i64>,
    pub(crate) wait: WaitState,
    pub(crate) soft_turns: u32,
}

impl Thread {
    pub(crate) fn new(id: ThreadId, script: usize, owner: Owner, origin: Origin) -> Self {
        Thread {
            id,
            script,
            owner,
            origin,
            status: ThreadStatus::Runnable,
            pc: 0,
            loops: Vec::new(),
            wait: WaitState::None,
            soft_turns: 0,
        }
    }

    pub(crate) fn restart(&mut self) {
        self.pc = 0;
        self.loops.clear();
        self.wait = WaitState::None;
        self.status = ThreadStatus::Runnable;
    }

    pub fn is_alive(&self) -> bool {
        self.status != ThreadStatus::Finished
    }

    pub fn loop_counters(&self) -> &[i64] {
        &self.loops
    }

    pub fn position(&self) -> usize {
        self.pc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BubbleKind {
    Say,
    Think,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bubble {
    pub kind: BubbleKind,
    pub text: String,
}

/// Live state of one sprite instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpriteState {
    pub instance: InstanceId,
    /// Index of the sprite in the project; clones share their original's.
    pub sprite: usize,
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub direction: f64,
    pub size: f64,
    pub visible: bool,
    pub volume: f64,
    pub costume: usize,
    pub bubble: Option<Bubble>,
    /// Frame at which a timed say/think bubble is cleared.
    pub bubble_deadline: Option<u64>,
    pub variables: BTreeMap<String, Value>,
    pub is_clone: bool,
}

impl SpriteState {
    pub fn bubble_text(&self) -> &str {
        self.bubble.as_ref().map_or("", |b| b.text.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InputState {
    pub keys_down: BTreeSet<String>,
    pub mouse_x: f64,
    pub mouse_y: f64,
    pub mouse_down: bool,
}

/// Everything a snapshot captures: program state plus execution state.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub sprites: Vec<SpriteState>,
    pub stage_variables: BTreeMap<String, Value>,
    pub threads: Vec<Thread>,
    /// Frames elapsed on the virtual clock.
    pub clock: u64,
    pub input: InputState,
    pub(crate) rng: rand_chacha::ChaCha8Rng,
    pub(crate) next_thread: u64,
    pub(crate) next_instance: u32,
}

impl World {
    pub fn sprite(&self, id: InstanceId) -> Option<&SpriteState> {
        self.sprites.iter().find(|s| s.instance == id)
    }

    pub fn sprite_mut(&mut self, id: InstanceId) -> Option<&mut SpriteState> {
        self.sprites.iter_mut().find(|s| s.instance == id)
    }

    /// The original (non-clone) instance of a sprite by name.
    pub fn original(&self, name: &str) -> Option<&SpriteState> {
        self.sprites.iter().find(|s| !s.is_clone && s.name == name)
    }

    /// Threads are kept sorted by id.
    pub fn thread(&self, id: ThreadId) -> Option<&Thread> {
        self.threads.binary_search_by_key(&id, |t| t.id).ok().map(|i| &self.threads[i])
    }

    pub(crate) fn thread_mut(&mut self, id: ThreadId) -> Option<&mut Thread> {
        self.threads.binary_search_by_key(&id, |t| t.id).ok().map(|i| &mut self.threads[i])
    }

    pub fn clone_count(&self, sprite: usize) -> usize {
        self.sprites.iter().filter(|s| s.is_clone && s.sprite == sprite).count()
    }
}

pub(crate) fn normalize_key(key: &str) -> String {
    key.trim().to_lowercase()
}

/// Wraps a direction into (-180, 180].
pub fn wrap_direction(d: f64) -> f64 {
    if !d.is_finite() {
        return 90.0;
    }
    180.0 - (180.0 - d).rem_euclid(360.0)
}
