//! Structural validation of a parsed project against the opcode catalog.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ast::{Block, Input, Project, Script, TargetRef};
use crate::catalog::{FieldKind, OpcodeCatalog, Shape, SlotKind, EDGE, MOUSE, MYSELF};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UnknownOpcode,
    BadShape,
    BadSlot,
    MissingField,
    BadField,
    UnresolvedReference,
    DuplicateBlockId,
    DuplicateTestName,
    TestBlockOutsideTest,
    BadProject,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub block_id: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.block_id {
            Some(id) => write!(f, "[{id}] {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

struct Ctx<'a> {
    project: &'a Project,
    target: TargetRef,
    in_test: bool,
    out: Vec<Diagnostic>,
}

impl Ctx<'_> {
    fn push(&mut self, kind: DiagnosticKind, block: Option<&Block>, message: String) {
        self.out.push(Diagnostic { kind, block_id: block.map(|b| b.id.clone()), message });
    }

    fn sprite_exists(&self, name: &str) -> bool {
        self.project.sprite_index(name).is_some()
    }

    fn variable_exists(&self, name: &str) -> bool {
        let local = match self.target {
            TargetRef::Sprite(i) => self.project.sprites[i].variables.contains_key(name),
            TargetRef::Stage => false,
        };
        local || self.project.stage.variables.contains_key(name)
    }

    fn check_command_list(&mut self, blocks: &[Block]) {
        for b in blocks {
            self.check_block(b, Position::Command);
        }
    }

    fn check_block(&mut self, b: &Block, pos: Position) {
        let Some(spec) = OpcodeCatalog::global().get(&b.opcode) else {
            self.push(DiagnosticKind::UnknownOpcode, Some(b), format!("unknown opcode `{}`", b.opcode));
            return;
        };
        let shape_ok = match pos {
            Position::Hat => spec.shape == Shape::Hat,
            Position::Command => matches!(spec.shape, Shape::Command | Shape::Cap),
            Position::Value => spec.shape.is_expression(),
            Position::BoolValue => spec.shape == Shape::Boolean,
        };
        if !shape_ok {
            let msg = match pos {
                Position::Hat => format!("`{}` cannot head a script", b.opcode),
                Position::Command => format!("`{}` cannot be used as a statement", b.opcode),
                Position::Value => format!("`{}` cannot be used as a value", b.opcode),
                Position::BoolValue => {
                    format!("`{}` is not boolean-shaped and cannot fill a boolean slot", b.opcode)
                }
            };
            self.push(DiagnosticKind::BadShape, Some(b), msg);
        }
        if spec.category.is_test_command() && !self.in_test {
            self.push(
                DiagnosticKind::TestBlockOutsideTest,
                Some(b),
                format!("test block `{}` used outside a test script", b.opcode),
            );
        }

        for (slot, input) in &b.inputs {
            let Some(kind) = spec.slot(slot) else {
                self.push(DiagnosticKind::BadSlot, Some(b), format!("`{}` has no input `{slot}`", b.opcode));
                continue;
            };
            match (kind, input) {
                (SlotKind::Substack, Input::Stack(blocks)) => self.check_command_list(blocks),
                (SlotKind::Substack, _) => self.push(
                    DiagnosticKind::BadSlot,
                    Some(b),
                    format!("input `{slot}` of `{}` must be a block list", b.opcode),
                ),
                (_, Input::Stack(_)) => self.push(
                    DiagnosticKind::BadSlot,
                    Some(b),
                    format!("input `{slot}` of `{}` cannot hold a block list", b.opcode),
                ),
                (SlotKind::Bool, Input::Literal(Value::Bool(_))) => {}
                (SlotKind::Bool, Input::Literal(v)) => self.push(
                    DiagnosticKind::BadSlot,
                    Some(b),
                    format!("boolean input `{slot}` of `{}` holds non-boolean literal {v:?}", b.opcode),
                ),
                (SlotKind::Bool, Input::Block(inner)) => self.check_block(inner, Position::BoolValue),
                (_, Input::Block(inner)) => self.check_block(inner, Position::Value),
                (_, Input::Literal(_)) => {}
            }
        }
        for (slot, kind) in spec.slots {
            if !b.inputs.contains_key(*slot) && !matches!(kind, SlotKind::Bool | SlotKind::Substack) {
                self.push(DiagnosticKind::BadSlot, Some(b), format!("`{}` is missing input `{slot}`", b.opcode));
            }
        }

        for name in b.fields.keys() {
            if spec.field(name).is_none() {
                self.push(DiagnosticKind::BadField, Some(b), format!("`{}` has no field `{name}`", b.opcode));
            }
        }
        for (name, kind) in spec.fields {
            let Some(value) = b.field(name) else {
                self.push(DiagnosticKind::MissingField, Some(b), format!("`{}` is missing field `{name}`", b.opcode));
                continue;
            };
            match kind {
                FieldKind::Text => {}
                FieldKind::Choice(choices) => {
                    if !choices.contains(&value) {
                        self.push(
                            DiagnosticKind::BadField,
                            Some(b),
                            format!("field `{name}` of `{}` must be one of {choices:?}, got `{value}`", b.opcode),
                        );
                    }
                }
                FieldKind::Sprite(specials) => {
                    if !specials.contains(&value) && !self.sprite_exists(value) {
                        self.push(
                            DiagnosticKind::UnresolvedReference,
                            Some(b),
                            format!("`{}` refers to unknown sprite `{value}`", b.opcode),
                        );
                    }
                }
                FieldKind::Variable => {
                    if !self.variable_exists(value) {
                        self.push(
                            DiagnosticKind::UnresolvedReference,
                            Some(b),
                            format!("`{}` refers to unknown variable `{value}`", b.opcode),
                        );
                    }
                }
            }
        }
        self.check_target_specific(b);
    }

    fn check_target_specific(&mut self, b: &Block) {
        let spec = OpcodeCatalog::global().get(&b.opcode).expect("checked");
        match self.target {
            TargetRef::Stage => {
                let sprite_only = matches!(
                    spec.category,
                    crate::catalog::Category::Motion | crate::catalog::Category::Looks
                ) || matches!(
                    b.opcode.as_str(),
                    "control_delete_this_clone" | "control_start_as_clone" | "event_whenthisspriteclicked"
                ) || (b.opcode == "control_create_clone_of" && b.field("CLONE_OPTION") == Some(MYSELF))
                    || (b.opcode == "test_attribute" && b.field("SPRITE") == Some(MYSELF))
                    || (b.opcode == "test_click_sprite" && b.field("SPRITE") == Some(MYSELF));
                if sprite_only {
                    self.push(
                        DiagnosticKind::BadShape,
                        Some(b),
                        format!("`{}` needs a sprite and cannot run on the stage", b.opcode),
                    );
                }
            }
            TargetRef::Sprite(i) => {
                if b.opcode == "looks_switchcostumeto" {
                    if let Some(Input::Literal(Value::String(name))) = b.inputs.get("COSTUME") {
                        let sprite = &self.project.sprites[i];
                        let numeric = crate::value::try_number(&Value::String(name.clone())).is_some();
                        if !numeric && !sprite.costumes.iter().any(|c| &c.name == name) {
                            self.push(
                                DiagnosticKind::UnresolvedReference,
                                Some(b),
                                format!("sprite `{}` has no costume `{name}`", sprite.name),
                            );
                        }
                    }
                }
            }
        }
    }

    fn check_script(&mut self, script: &Script) {
        self.in_test = script.is_test();
        if let Some(hat) = &script.hat {
            self.check_block(hat, Position::Hat);
        }
        self.check_command_list(&script.body);
    }
}

#[derive(Clone, Copy)]
enum Position {
    Hat,
    Command,
    Value,
    BoolValue,
}

/// Checks every block against the catalog and every reference against the
/// project. Returns an empty list iff the project is valid.
pub fn validate_project(p: &Project) -> Vec<Diagnostic> {
    let mut ctx = Ctx { project: p, target: TargetRef::Stage, in_test: false, out: Vec::new() };

    if p.format_version != crate::ast::FORMAT_VERSION {
        ctx.push(
            DiagnosticKind::BadProject,
            None,
            format!("unsupported formatVersion {} (expected {})", p.format_version, crate::ast::FORMAT_VERSION),
        );
    }
    let mut names = BTreeSet::new();
    for s in &p.sprites {
        if s.name.is_empty() || s.name == crate::catalog::STAGE || [EDGE, MOUSE, MYSELF].contains(&s.name.as_str()) {
            ctx.push(DiagnosticKind::BadProject, None, format!("invalid sprite name `{}`", s.name));
        }
        if !names.insert(s.name.as_str()) {
            ctx.push(DiagnosticKind::BadProject, None, format!("duplicate sprite name `{}`", s.name));
        }
        if s.costumes.is_empty() {
            ctx.push(DiagnosticKind::BadProject, None, format!("sprite `{}` has no costumes", s.name));
        } else if s.current_costume >= s.costumes.len() {
            ctx.push(
                DiagnosticKind::BadProject,
                None,
                format!("sprite `{}` current costume {} out of range", s.name, s.current_costume),
            );
        }
    }
    for r in &p.stage.color_regions {
        if crate::vm::collision::parse_color(&r.color).is_none() {
            ctx.push(DiagnosticKind::BadProject, None, format!("invalid region color `{}`", r.color));
        }
    }

    for (target, _, script) in p.scripts() {
        ctx.target = target;
        ctx.check_script(script);
    }

    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    p.walk_blocks(&mut |b| *ids.entry(b.id.as_str()).or_default() += 1);
    for (id, n) in ids {
        if n > 1 {
            ctx.out.push(Diagnostic {
                kind: DiagnosticKind::DuplicateBlockId,
                block_id: Some(id.to_owned()),
                message: format!("block id `{id}` used {n} times"),
            });
        }
    }

    let mut tests: BTreeMap<&str, Vec<&Block>> = BTreeMap::new();
    let all_tests = p
        .tests()
        .map(|(_, _, s)| s)
        .chain(p.unmatched_tests.iter().map(|u| &u.script));
    for s in all_tests {
        let hat = s.hat.as_ref().expect("test has hat");
        tests.entry(s.test_name().unwrap_or("")).or_default().push(hat);
    }
    for (name, hats) in tests {
        if name.is_empty() {
            ctx.push(DiagnosticKind::BadField, Some(hats[0]), "test has an empty name".into());
        }
        if hats.len() > 1 {
            ctx.push(
                DiagnosticKind::DuplicateTestName,
                Some(hats[1]),
                format!("test name `{name}` used by {} scripts", hats.len()),
            );
        }
    }
    ctx.out
}
