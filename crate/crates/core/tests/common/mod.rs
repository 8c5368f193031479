#![allow(dead_code)]

use std::path::PathBuf;

use bbt::ast::Project;
use bbt::{Block, Script, Sprite, Value};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> Project {
    bbt::io::load_project(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn solutions() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture("boatrace/solutions"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
}

/// Program command shapes for random projects. Loops nest at most twice.
#[derive(Debug, Clone)]
pub enum Cmd {
    Move(i8),
    ChangeX(i8),
    Turn(i16),
    GotoXY(i16, i16),
    SetRandom(u8),
    ChangeVar(i8),
    Say(u8),
    SayForSecs(u8),
    Wait(u8),
    NextCostume,
    ChangeSize(i8),
    Bounce,
    PointToMouse,
    Broadcast,
    Repeat(u8, Vec<Cmd>),
    Forever(Vec<Cmd>),
    IfEdge(Vec<Cmd>),
}

#[derive(Debug, Clone, Copy)]
pub enum Hat {
    Flag,
    Message,
    Key,
    Clone,
}

#[derive(Debug, Clone)]
pub struct ScriptShape {
    pub hat: Hat,
    pub body: Vec<Cmd>,
    /// Create one clone of the sprite before the body. Green-flag scripts
    /// only: broadcast and key hats re-fire and would hit the clone cap.
    pub clone_first: bool,
}

#[derive(Debug, Clone)]
pub struct ProjectShape {
    pub sprites: Vec<(i16, i16, Vec<ScriptShape>)>,
}

fn leaf() -> impl Strategy<Value = Cmd> {
    prop_oneof![
        (-20i8..20).prop_map(Cmd::Move),
        (-20i8..20).prop_map(Cmd::ChangeX),
        (-180i16..180).prop_map(Cmd::Turn),
        (-300i16..300, -250i16..250).prop_map(|(x, y)| Cmd::GotoXY(x, y)),
        (1u8..10).prop_map(Cmd::SetRandom),
        (-5i8..5).prop_map(Cmd::ChangeVar),
        (0u8..4).prop_map(Cmd::Say),
        (0u8..6).prop_map(Cmd::SayForSecs),
        (0u8..6).prop_map(Cmd::Wait),
        Just(Cmd::NextCostume),
        (-30i8..30).prop_map(Cmd::ChangeSize),
        Just(Cmd::Bounce),
        Just(Cmd::PointToMouse),
        Just(Cmd::Broadcast),
    ]
}

pub fn cmd() -> impl Strategy<Value = Cmd> {
    leaf().prop_recursive(2, 12, 4, |inner| {
        prop_oneof![
            (0u8..5, prop::collection::vec(inner.clone(), 1..4)).prop_map(|(n, b)| Cmd::Repeat(n, b)),
            prop::collection::vec(inner.clone(), 1..4).prop_map(Cmd::Forever),
            prop::collection::vec(inner, 1..3).prop_map(Cmd::IfEdge),
        ]
    })
}

pub fn script_shape() -> impl Strategy<Value = ScriptShape> {
    let hat = prop_oneof![4 => Just(Hat::Flag), 2 => Just(Hat::Message), 1 => Just(Hat::Key), 1 => Just(Hat::Clone)];
    (hat, prop::collection::vec(cmd(), 0..5), prop::bool::weighted(0.2)).prop_map(|(hat, body, clone)| ScriptShape {
        hat,
        body,
        clone_first: clone && matches!(hat, Hat::Flag),
    })
}

pub fn project_shape() -> impl Strategy<Value = ProjectShape> {
    prop::collection::vec((-200i16..200, -150i16..150, prop::collection::vec(script_shape(), 1..4)), 1..4)
        .prop_map(|sprites| ProjectShape { sprites })
}

/// Hands out block ids unique within one project.
#[derive(Default)]
pub struct Ids(u32);

impl Ids {
    pub fn starting_at(n: u32) -> Self {
        Ids(n)
    }

    pub fn next(&mut self) -> String {
        self.0 += 1;
        format!("b{}", self.0)
    }

    pub fn block(&mut self, op: &str) -> Block {
        Block::new(op, self.next())
    }

    pub fn var(&mut self, name: &str) -> Block {
        self.block("data_variable").with_field("VARIABLE", name)
    }

    pub fn attr(&mut self, sprite: &str, attr: &str) -> Block {
        self.block("test_attribute").with_field("SPRITE", sprite).with_field("ATTRIBUTE", attr)
    }
}

const WORDS: [&str; 4] = ["hi", "Hello!", "", "42"];

pub fn build_cmd(c: &Cmd, ids: &mut Ids) -> Block {
    match c {
        Cmd::Move(n) => ids.block("motion_movesteps").with_input("STEPS", *n as i32),
        Cmd::ChangeX(n) => ids.block("motion_changexby").with_input("DX", *n as i32),
        Cmd::Turn(n) => ids.block("motion_pointindirection").with_input("DIRECTION", *n as i32),
        Cmd::GotoXY(x, y) => ids.block("motion_gotoxy").with_input("X", *x as i32).with_input("Y", *y as i32),
        Cmd::SetRandom(hi) => {
            let r = ids.block("operator_random").with_input("FROM", 1).with_input("TO", *hi as i32);
            ids.block("data_setvariableto").with_field("VARIABLE", "v").with_input("VALUE", r)
        }
        Cmd::ChangeVar(n) => ids.block("data_changevariableby").with_field("VARIABLE", "v").with_input("VALUE", *n as i32),
        Cmd::Say(w) => ids.block("looks_say").with_input("MESSAGE", WORDS[*w as usize]),
        Cmd::SayForSecs(t) => ids
            .block("looks_sayforsecs")
            .with_input("MESSAGE", "busy")
            .with_input("SECS", *t as f64 / 10.0),
        Cmd::Wait(t) => ids.block("control_wait").with_input("DURATION", *t as f64 / 10.0),
        Cmd::NextCostume => ids.block("looks_nextcostume"),
        Cmd::ChangeSize(n) => ids.block("looks_changesizeby").with_input("CHANGE", *n as i32),
        Cmd::Bounce => ids.block("motion_ifonedgebounce"),
        Cmd::PointToMouse => ids.block("motion_pointtowards").with_field("TOWARDS", "_mouse_"),
        Cmd::Broadcast => ids.block("event_broadcast").with_input("BROADCAST_INPUT", "m"),
        Cmd::Repeat(n, body) => {
            let b: Vec<Block> = body.iter().map(|c| build_cmd(c, ids)).collect();
            ids.block("control_repeat").with_input("TIMES", *n as i32).with_input("SUBSTACK", b)
        }
        Cmd::Forever(body) => {
            let b: Vec<Block> = body.iter().map(|c| build_cmd(c, ids)).collect();
            ids.block("control_forever").with_input("SUBSTACK", b)
        }
        Cmd::IfEdge(body) => {
            let cond = ids.block("sensing_touchingobject").with_field("TOUCHINGOBJECTMENU", "_edge_");
            let b: Vec<Block> = body.iter().map(|c| build_cmd(c, ids)).collect();
            ids.block("control_if").with_input("CONDITION", cond).with_input("SUBSTACK", b)
        }
    }
}

pub fn build_project(shape: &ProjectShape, ids: &mut Ids) -> Project {
    let mut p = Project::default();
    for (i, (x, y, scripts)) in shape.sprites.iter().enumerate() {
        let mut s = Sprite::new(&format!("S{i}"), &["a", "b", "c"]);
        s.x = *x as f64;
        s.y = *y as f64;
        s.variables.insert("v".into(), Value::number(0.0));
        for sh in scripts {
            let hat = match sh.hat {
                Hat::Flag => ids.block("event_whenflagclicked"),
                Hat::Message => ids.block("event_whenbroadcastreceived").with_field("BROADCAST_OPTION", "m"),
                Hat::Key => ids.block("event_whenkeypressed").with_field("KEY_OPTION", "space"),
                Hat::Clone => ids.block("control_start_as_clone"),
            };
            let mut body = Vec::new();
            if sh.clone_first {
                body.push(ids.block("control_create_clone_of").with_field("CLONE_OPTION", "_myself_"));
            }
            body.extend(sh.body.iter().map(|c| build_cmd(c, ids)));
            s.scripts.push(Script::new(Some(hat), body));
        }
        p.sprites.push(s);
    }
    p
}

pub fn test_script(name: &str, ids: &mut Ids, body: Vec<Block>) -> Script {
    Script::new(Some(ids.block("test_start").with_field("NAME", name)), body)
}
