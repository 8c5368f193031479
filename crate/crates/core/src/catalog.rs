//! The opcode catalog: every block the VM understands, with its slot
//! signature, shape and scheduling behaviour.

use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Toolbox category of an opcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Motion,
    Looks,
    Control,
    Events,
    Sensing,
    Operators,
    Data,
    /// Test blocks that steer a running test (start, restore, timeout, yield).
    TestControl,
    /// Test blocks that simulate input or events.
    TestTrigger,
    TestAssertion,
    TestReporter,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Motion => "motion",
            Category::Looks => "looks",
            Category::Control => "control",
            Category::Events => "events",
            Category::Sensing => "sensing",
            Category::Operators => "operators",
            Category::Data => "data",
            Category::TestControl => "test control",
            Category::TestTrigger => "test trigger",
            Category::TestAssertion => "test assertion",
            Category::TestReporter => "test reporter",
        }
    }

    /// True for the test categories whose command blocks may only appear in
    /// test scripts.
    pub fn is_test_command(self) -> bool {
        matches!(
            self,
            Category::TestControl | Category::TestTrigger | Category::TestAssertion
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Hat,
    Command,
    /// A command that ends its script (nothing may follow it usefully).
    Cap,
    /// Oval reporter producing a number or text.
    Reporter,
    /// Diamond reporter producing a boolean.
    Boolean,
}

impl Shape {
    pub fn is_expression(self) -> bool {
        matches!(self, Shape::Reporter | Shape::Boolean)
    }
}

/// How an opcode interacts with the sequencer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YieldClass {
    None,
    /// End of a loop body: the thread is done for this frame.
    LoopEdge,
    /// Timed or conditional wait: done for the frame until satisfied.
    Wait,
    /// Back of the current frame's queue; may run again this frame.
    SoftYield,
}

impl YieldClass {
    pub fn name(self) -> &'static str {
        match self {
            YieldClass::None => "none",
            YieldClass::LoopEdge => "loop-edge",
            YieldClass::Wait => "wait",
            YieldClass::SoftYield => "soft-yield",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// Oval slot that reads as a number.
    Number,
    /// Oval slot that reads as text.
    Text,
    /// Diamond slot: boolean-shaped expressions or a literal boolean only.
    Bool,
    /// Nested list of command blocks.
    Substack,
}

impl SlotKind {
    pub fn name(self) -> &'static str {
        match self {
            SlotKind::Number => "number",
            SlotKind::Text => "text",
            SlotKind::Bool => "boolean",
            SlotKind::Substack => "substack",
        }
    }
}

/// What a field names, for reference resolution during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Free text (key names, broadcast messages, test names).
    Text,
    /// A sprite name, or one of the listed special menu values.
    Sprite(&'static [&'static str]),
    Variable,
    /// One of a fixed set of choices.
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone)]
pub struct OpcodeSpec {
    pub opcode: &'static str,
    pub category: Category,
    pub shape: Shape,
    pub slots: &'static [(&'static str, SlotKind)],
    pub fields: &'static [(&'static str, FieldKind)],
    pub yield_class: YieldClass,
    /// The block's exact form is not spelled out in the source material and
    /// was reconstructed from its described behaviour.
    pub reconstructed: bool,
}

impl OpcodeSpec {
    pub fn slot(&self, name: &str) -> Option<SlotKind> {
        self.slots.iter().find(|(n, _)| *n == name).map(|(_, k)| *k)
    }

    pub fn field(&self, name: &str) -> Option<FieldKind> {
        self.fields.iter().find(|(n, _)| *n == name).map(|(_, k)| *k)
    }
}

pub const MYSELF: &str = "_myself_";
pub const EDGE: &str = "_edge_";
pub const MOUSE: &str = "_mouse_";
pub const STAGE: &str = "_stage_";

pub const ATTRIBUTES: &[&str] = &[
    "x",
    "y",
    "direction",
    "costume_number",
    "costume_name",
    "size",
    "volume",
    "say_text",
    "clone_count",
    "running_scripts",
];

use Category as C;
use FieldKind as F;
use Shape as S;
use SlotKind as K;
use YieldClass as Y;

macro_rules! op {
    ($name:literal, $cat:expr, $shape:expr, [$(($s:literal, $k:expr)),*], [$(($f:literal, $fk:expr)),*], $y:expr) => {
        op!($name, $cat, $shape, [$(($s, $k)),*], [$(($f, $fk)),*], $y, false)
    };
    ($name:literal, $cat:expr, $shape:expr, [$(($s:literal, $k:expr)),*], [$(($f:literal, $fk:expr)),*], $y:expr, $recon:expr) => {
        OpcodeSpec {
            opcode: $name,
            category: $cat,
            shape: $shape,
            slots: &[$(($s, $k)),*],
            fields: &[$(($f, $fk)),*],
            yield_class: $y,
            reconstructed: $recon,
        }
    };
}

const NUM2: [(&str, SlotKind); 2] = [("NUM1", K::Number), ("NUM2", K::Number)];

static ENTRIES: &[OpcodeSpec] = &[
    // motion
    op!("motion_movesteps", C::Motion, S::Command, [("STEPS", K::Number)], [], Y::None),
    op!("motion_gotoxy", C::Motion, S::Command, [("X", K::Number), ("Y", K::Number)], [], Y::None),
    op!("motion_setx", C::Motion, S::Command, [("X", K::Number)], [], Y::None),
    op!("motion_changexby", C::Motion, S::Command, [("DX", K::Number)], [], Y::None),
    op!("motion_sety", C::Motion, S::Command, [("Y", K::Number)], [], Y::None),
    op!("motion_changeyby", C::Motion, S::Command, [("DY", K::Number)], [], Y::None),
    op!("motion_pointindirection", C::Motion, S::Command, [("DIRECTION", K::Number)], [], Y::None),
    op!("motion_pointtowards", C::Motion, S::Command, [], [("TOWARDS", F::Sprite(&[MOUSE]))], Y::None),
    op!("motion_ifonedgebounce", C::Motion, S::Command, [], [], Y::None),
    op!("motion_xposition", C::Motion, S::Reporter, [], [], Y::None),
    op!("motion_yposition", C::Motion, S::Reporter, [], [], Y::None),
    op!("motion_direction", C::Motion, S::Reporter, [], [], Y::None),
    // looks
    op!("looks_say", C::Looks, S::Command, [("MESSAGE", K::Text)], [], Y::None),
    op!("looks_sayforsecs", C::Looks, S::Command, [("MESSAGE", K::Text), ("SECS", K::Number)], [], Y::Wait),
    op!("looks_think", C::Looks, S::Command, [("MESSAGE", K::Text)], [], Y::None),
    op!("looks_switchcostumeto", C::Looks, S::Command, [("COSTUME", K::Text)], [], Y::None),
    op!("looks_nextcostume", C::Looks, S::Command, [], [], Y::None),
    op!("looks_show", C::Looks, S::Command, [], [], Y::None),
    op!("looks_hide", C::Looks, S::Command, [], [], Y::None),
    op!("looks_setsizeto", C::Looks, S::Command, [("SIZE", K::Number)], [], Y::None),
    op!("looks_changesizeby", C::Looks, S::Command, [("CHANGE", K::Number)], [], Y::None),
    // control
    op!("control_wait", C::Control, S::Command, [("DURATION", K::Number)], [], Y::Wait),
    op!("control_wait_until", C::Control, S::Command, [("CONDITION", K::Bool)], [], Y::Wait),
    op!("control_repeat", C::Control, S::Command, [("TIMES", K::Number), ("SUBSTACK", K::Substack)], [], Y::LoopEdge),
    op!("control_repeat_until", C::Control, S::Command, [("CONDITION", K::Bool), ("SUBSTACK", K::Substack)], [], Y::LoopEdge),
    op!("control_forever", C::Control, S::Cap, [("SUBSTACK", K::Substack)], [], Y::LoopEdge),
    op!("control_if", C::Control, S::Command, [("CONDITION", K::Bool), ("SUBSTACK", K::Substack)], [], Y::None),
    op!("control_if_else", C::Control, S::Command, [("CONDITION", K::Bool), ("SUBSTACK", K::Substack), ("SUBSTACK2", K::Substack)], [], Y::None),
    op!("control_stop", C::Control, S::Cap, [], [("STOP_OPTION", F::Choice(&["all", "this script"]))], Y::None),
    op!("control_create_clone_of", C::Control, S::Command, [], [("CLONE_OPTION", F::Sprite(&[MYSELF]))], Y::None),
    op!("control_delete_this_clone", C::Control, S::Cap, [], [], Y::None),
    op!("control_start_as_clone", C::Control, S::Hat, [], [], Y::None),
    // events
    op!("event_whenflagclicked", C::Events, S::Hat, [], [], Y::None),
    op!("event_whenkeypressed", C::Events, S::Hat, [], [("KEY_OPTION", F::Text)], Y::None),
    op!("event_whenthisspriteclicked", C::Events, S::Hat, [], [], Y::None),
    op!("event_whenbroadcastreceived", C::Events, S::Hat, [], [("BROADCAST_OPTION", F::Text)], Y::None),
    op!("event_broadcast", C::Events, S::Command, [("BROADCAST_INPUT", K::Text)], [], Y::None),
    op!("event_broadcastandwait", C::Events, S::Command, [("BROADCAST_INPUT", K::Text)], [], Y::Wait),
    // sensing
    op!("sensing_touchingobject", C::Sensing, S::Boolean, [], [("TOUCHINGOBJECTMENU", F::Sprite(&[EDGE, MOUSE]))], Y::None),
    op!("sensing_touchingcolor", C::Sensing, S::Boolean, [("COLOR", K::Text)], [], Y::None),
    op!("sensing_keypressed", C::Sensing, S::Boolean, [], [("KEY_OPTION", F::Text)], Y::None),
    op!("sensing_mousedown", C::Sensing, S::Boolean, [], [], Y::None),
    op!("sensing_mousex", C::Sensing, S::Reporter, [], [], Y::None),
    op!("sensing_mousey", C::Sensing, S::Reporter, [], [], Y::None),
    op!("sensing_distanceto", C::Sensing, S::Reporter, [], [("DISTANCETOMENU", F::Sprite(&[MOUSE]))], Y::None),
    // operators
    OpcodeSpec { opcode: "operator_add", category: C::Operators, shape: S::Reporter, slots: &NUM2, fields: &[], yield_class: Y::None, reconstructed: false },
    OpcodeSpec { opcode: "operator_subtract", category: C::Operators, shape: S::Reporter, slots: &NUM2, fields: &[], yield_class: Y::None, reconstructed: false },
    OpcodeSpec { opcode: "operator_multiply", category: C::Operators, shape: S::Reporter, slots: &NUM2, fields: &[], yield_class: Y::None, reconstructed: false },
    OpcodeSpec { opcode: "operator_divide", category: C::Operators, shape: S::Reporter, slots: &NUM2, fields: &[], yield_class: Y::None, reconstructed: false },
    OpcodeSpec { opcode: "operator_mod", category: C::Operators, shape: S::Reporter, slots: &NUM2, fields: &[], yield_class: Y::None, reconstructed: false },
    op!("operator_lt", C::Operators, S::Boolean, [("OPERAND1", K::Text), ("OPERAND2", K::Text)], [], Y::None),
    op!("operator_gt", C::Operators, S::Boolean, [("OPERAND1", K::Text), ("OPERAND2", K::Text)], [], Y::None),
    op!("operator_equals", C::Operators, S::Boolean, [("OPERAND1", K::Text), ("OPERAND2", K::Text)], [], Y::None),
    op!("operator_and", C::Operators, S::Boolean, [("OPERAND1", K::Bool), ("OPERAND2", K::Bool)], [], Y::None),
    op!("operator_or", C::Operators, S::Boolean, [("OPERAND1", K::Bool), ("OPERAND2", K::Bool)], [], Y::None),
    op!("operator_not", C::Operators, S::Boolean, [("OPERAND", K::Bool)], [], Y::None),
    op!("operator_join", C::Operators, S::Reporter, [("STRING1", K::Text), ("STRING2", K::Text)], [], Y::None),
    op!("operator_letter_of", C::Operators, S::Reporter, [("LETTER", K::Number), ("STRING", K::Text)], [], Y::None),
    op!("operator_length", C::Operators, S::Reporter, [("STRING", K::Text)], [], Y::None),
    op!("operator_random", C::Operators, S::Reporter, [("FROM", K::Number), ("TO", K::Number)], [], Y::None),
    // data
    op!("data_setvariableto", C::Data, S::Command, [("VALUE", K::Text)], [("VARIABLE", F::Variable)], Y::None),
    op!("data_changevariableby", C::Data, S::Command, [("VALUE", K::Number)], [("VARIABLE", F::Variable)], Y::None),
    op!("data_variable", C::Data, S::Reporter, [], [("VARIABLE", F::Variable)], Y::None),
    // test control
    op!("test_start", C::TestControl, S::Hat, [], [("NAME", F::Text)], Y::None),
    op!("test_restore", C::TestControl, S::Cap, [], [], Y::None),
    op!("test_set_timeout", C::TestControl, S::Command, [("SECONDS", K::Number)], [], Y::None),
    op!("test_yield", C::TestControl, S::Command, [], [], Y::SoftYield),
    op!("test_wait_all_done", C::TestControl, S::Command, [], [], Y::Wait),
    // test triggers
    op!("test_green_flag", C::TestTrigger, S::Command, [], [], Y::SoftYield),
    op!("test_press_key", C::TestTrigger, S::Command, [], [("KEY", F::Text)], Y::SoftYield),
    op!("test_key_down", C::TestTrigger, S::Command, [], [("KEY", F::Text)], Y::SoftYield, true),
    op!("test_key_up", C::TestTrigger, S::Command, [], [("KEY", F::Text)], Y::SoftYield, true),
    op!("test_click_sprite", C::TestTrigger, S::Command, [], [("SPRITE", F::Sprite(&[MYSELF]))], Y::SoftYield, true),
    op!("test_broadcast", C::TestTrigger, S::Command, [("MESSAGE", K::Text)], [], Y::SoftYield, true),
    op!("test_move_mouse", C::TestTrigger, S::Command, [("X", K::Number), ("Y", K::Number)], [], Y::SoftYield),
    op!("test_set_mouse_down", C::TestTrigger, S::Command, [("DOWN", K::Bool)], [], Y::SoftYield, true),
    // assertions
    op!("test_assert", C::TestAssertion, S::Command, [("CONDITION", K::Bool)], [], Y::None),
    op!("test_assert_equals", C::TestAssertion, S::Command, [("ACTUAL", K::Text), ("EXPECTED", K::Text)], [], Y::None, true),
    op!("test_assert_greater", C::TestAssertion, S::Command, [("ACTUAL", K::Number), ("LIMIT", K::Number)], [], Y::None, true),
    op!("test_assert_less", C::TestAssertion, S::Command, [("ACTUAL", K::Number), ("LIMIT", K::Number)], [], Y::None, true),
    // reporters
    op!("test_attribute", C::TestReporter, S::Reporter, [], [("SPRITE", F::Sprite(&[MYSELF])), ("ATTRIBUTE", F::Choice(ATTRIBUTES))], Y::None, true),
];

/// Lookup table over the static catalog entries.
#[derive(Debug)]
pub struct OpcodeCatalog {
    by_name: BTreeMap<&'static str, &'static OpcodeSpec>,
}

impl OpcodeCatalog {
    pub fn global() -> &'static OpcodeCatalog {
        static CATALOG: OnceLock<OpcodeCatalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            let mut by_name = BTreeMap::new();
            for e in ENTRIES {
                let prev = by_name.insert(e.opcode, e);
                assert!(prev.is_none(), "duplicate catalog entry {}", e.opcode);
            }
            OpcodeCatalog { by_name }
        })
    }

    pub fn get(&self, opcode: &str) -> Option<&'static OpcodeSpec> {
        self.by_name.get(opcode).copied()
    }

    /// Entries in declaration order (grouped by category).
    pub fn entries(&self) -> &'static [OpcodeSpec] {
        ENTRIES
    }

    pub fn len(&self) -> usize {
        ENTRIES.len()
    }

    pub fn is_empty(&self) -> bool {
        ENTRIES.is_empty()
    }

    /// Renders the catalog as the markdown table shipped in `docs/opcodes.md`.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from(
            "# Opcode catalog\n\n\
             Generated from `OpcodeCatalog::to_markdown`; do not edit by hand.\n\
             Blocks marked *reconstructed* have no exact published form and were\n\
             modelled from their described behaviour.\n\n\
             | opcode | category | shape | inputs | fields | yield | notes |\n\
             |---|---|---|---|---|---|---|\n",
        );
        for e in ENTRIES {
            let slots = e
                .slots
                .iter()
                .map(|(n, k)| format!("{n}:{}", k.name()))
                .collect::<Vec<_>>()
                .join(", ");
            let fields = e.fields.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ");
            out.push_str(&format!(
                "| `{}` | {} | {:?} | {} | {} | {} | {} |\n",
                e.opcode,
                e.category.name(),
                e.shape,
                slots,
                fields,
                e.yield_class.name(),
                if e.reconstructed { "reconstructed" } else { "" }
            ));
        }
        out
    }
}
