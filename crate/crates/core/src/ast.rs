//! Block AST shared by program scripts and test scripts, plus the on-disk
//! project encoding.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalog::STAGE;
use crate::value::Value;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_COSTUME_SIZE: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    #[serde(rename = "op")]
    pub opcode: String,
    pub id: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inputs: BTreeMap<String, Input>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub fields: BTreeMap<String, String>,
}

/// Contents of an input slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Stack(Vec<Block>),
    Block(Box<Block>),
    Literal(Value),
}

impl Block {
    pub fn new(opcode: &str, id: impl Into<String>) -> Self {
        Block {
            opcode: opcode.to_owned(),
            id: id.into(),
            inputs: BTreeMap::new(),
            fields: BTreeMap::new(),
        }
    }

    pub fn with_input(mut self, slot: &str, input: impl Into<Input>) -> Self {
        self.inputs.insert(slot.to_owned(), input.into());
        self
    }

    pub fn with_field(mut self, name: &str, value: &str) -> Self {
        self.fields.insert(name.to_owned(), value.to_owned());
        self
    }

    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields.get(name).map(String::as_str)
    }

    pub fn substack(&self, slot: &str) -> &[Block] {
        match self.inputs.get(slot) {
            Some(Input::Stack(blocks)) => blocks,
            _ => &[],
        }
    }

    /// Visits this block and every nested block, depth first.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Block)) {
        f(self);
        for input in self.inputs.values() {
            match input {
                Input::Stack(blocks) => blocks.iter().for_each(|b| b.walk(f)),
                Input::Block(b) => b.walk(f),
                Input::Literal(_) => {}
            }
        }
    }

    fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Block)) {
        f(self);
        for input in self.inputs.values_mut() {
            match input {
                Input::Stack(blocks) => blocks.iter_mut().for_each(|b| b.walk_mut(f)),
                Input::Block(b) => b.walk_mut(f),
                Input::Literal(_) => {}
            }
        }
    }
}

impl From<Block> for Input {
    fn from(b: Block) -> Self {
        Input::Block(Box::new(b))
    }
}

impl From<Vec<Block>> for Input {
    fn from(b: Vec<Block>) -> Self {
        Input::Stack(b)
    }
}

impl<T: Into<Value>> From<T> for Input {
    fn from(v: T) -> Self {
        Input::Literal(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Script {
    pub hat: Option<Block>,
    #[serde(default)]
    pub body: Vec<Block>,
}

impl Script {
    pub fn new(hat: Option<Block>, body: Vec<Block>) -> Self {
        Script { hat, body }
    }

    pub fn is_test(&self) -> bool {
        self.hat.as_ref().is_some_and(|h| h.opcode == "test_start")
    }

    pub fn test_name(&self) -> Option<&str> {
        self.hat
            .as_ref()
            .filter(|h| h.opcode == "test_start")
            .map(|h| h.field("NAME").unwrap_or(""))
    }

    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Block)) {
        if let Some(h) = &self.hat {
            h.walk(f);
        }
        for b in &self.body {
            b.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Block)) {
        if let Some(h) = &mut self.hat {
            h.walk_mut(f);
        }
        for b in &mut self.body {
            b.walk_mut(f);
        }
    }
}

/// A costume is a name plus the bounding box used for collision sensing.
#[derive(Debug, Clone, PartialEq)]
pub struct Costume {
    pub name: String,
    pub width: f64,
    pub height: f64,
}

impl Costume {
    pub fn named(name: &str) -> Self {
        Costume { name: name.to_owned(), width: DEFAULT_COSTUME_SIZE, height: DEFAULT_COSTUME_SIZE }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CostumeRepr {
    Name(String),
    Sized { name: String, width: f64, height: f64 },
}

impl Serialize for Costume {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.width == DEFAULT_COSTUME_SIZE && self.height == DEFAULT_COSTUME_SIZE {
            CostumeRepr::Name(self.name.clone()).serialize(s)
        } else {
            CostumeRepr::Sized { name: self.name.clone(), width: self.width, height: self.height }
                .serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Costume {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match CostumeRepr::deserialize(d)? {
            CostumeRepr::Name(name) => Costume::named(&name),
            CostumeRepr::Sized { name, width, height } => Costume { name, width, height },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColorRegion {
    pub color: String,
    /// `[x1, y1, x2, y2]` in stage coordinates; corners in any order.
    pub rect: [f64; 4],
}

impl ColorRegion {
    /// Normalized `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let [x1, y1, x2, y2] = self.rect;
        (x1.min(x2), y1.min(y2), x1.max(x2), y1.max(y2))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Stage {
    #[serde(default)]
    pub variables: BTreeMap<String, Value>,
    #[serde(default)]
    pub scripts: Vec<Script>,
    #[serde(default)]
    pub color_regions: Vec<ColorRegion>,
}

fn default_direction() -> f64 {
    90.0
}
fn default_hundred() -> f64 {
    100.0
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Sprite {
    pub name: String,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    #[serde(default = "default_direction")]
    pub direction: f64,
    #[serde(default = "default_hundred")]
    pub size: f64,
    #[serde(default = "default_true")]
    pub visible: bool,
    #[serde(default = "default_hundred")]
    pub volume: f64,
    #[serde(default)]
    pub costumes: Vec<Costume>,
    #[serde(default)]
    pub current_costume: usize,
    #[serde(default)]
    pub variables: BTreeMap<String, Value>,
    #[serde(default)]
    pub scripts: Vec<Script>,
}

impl Sprite {
    pub fn new(name: &str, costumes: &[&str]) -> Self {
        Sprite {
            name: name.to_owned(),
            x: 0.0,
            y: 0.0,
            direction: 90.0,
            size: 100.0,
            visible: true,
            volume: 100.0,
            costumes: costumes.iter().map(|c| Costume::named(c)).collect(),
            current_costume: 0,
            variables: BTreeMap::new(),
            scripts: Vec::new(),
        }
    }
}

/// A suite test that targets a sprite the project does not have. Kept so the
/// runner can report it instead of dropping it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnmatchedTest {
    pub sprite: String,
    pub script: Script,
}

/// Which target owns a script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TargetRef {
    Stage,
    Sprite(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Project {
    pub format_version: u32,
    #[serde(default)]
    pub stage: Stage,
    #[serde(default)]
    pub sprites: Vec<Sprite>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unmatched_tests: Vec<UnmatchedTest>,
}

impl Default for Project {
    fn default() -> Self {
        Project {
            format_version: FORMAT_VERSION,
            stage: Stage::default(),
            sprites: Vec::new(),
            unmatched_tests: Vec::new(),
        }
    }
}

impl Project {
    pub fn sprite_index(&self, name: &str) -> Option<usize> {
        self.sprites.iter().position(|s| s.name == name)
    }

    pub fn target_name(&self, target: TargetRef) -> &str {
        match target {
            TargetRef::Stage => STAGE,
            TargetRef::Sprite(i) => &self.sprites[i].name,
        }
    }

    pub fn scripts_of(&self, target: TargetRef) -> &[Script] {
        match target {
            TargetRef::Stage => &self.stage.scripts,
            TargetRef::Sprite(i) => &self.sprites[i].scripts,
        }
    }

    pub fn scripts_of_mut(&mut self, target: TargetRef) -> &mut Vec<Script> {
        match target {
            TargetRef::Stage => &mut self.stage.scripts,
            TargetRef::Sprite(i) => &mut self.sprites[i].scripts,
        }
    }

    /// Targets in project order: the stage, then sprites as listed.
    pub fn targets(&self) -> impl Iterator<Item = TargetRef> {
        std::iter::once(TargetRef::Stage).chain((0..self.sprites.len()).map(TargetRef::Sprite))
    }

    /// Every script with its owner and index, in project order.
    pub fn scripts(&self) -> impl Iterator<Item = (TargetRef, usize, &Script)> {
        self.targets().flat_map(move |t| {
            self.scripts_of(t).iter().enumerate().map(move |(i, s)| (t, i, s))
        })
    }

    /// Test scripts in project order.
    pub fn tests(&self) -> impl Iterator<Item = (TargetRef, usize, &Script)> {
        self.scripts().filter(|(_, _, s)| s.is_test())
    }

    /// Every block in the project including hats and unmatched tests.
    pub fn walk_blocks<'a>(&'a self, f: &mut dyn FnMut(&'a Block)) {
        for (_, _, s) in self.scripts() {
            s.walk(f);
        }
        for u in &self.unmatched_tests {
            u.script.walk(f);
        }
    }
}
