//! Native block semantics: motion, looks, control, events, sensing,
//! operators and data.

use rand::Rng;
use thiserror::Error;

use crate::ast::{Block, Input};
use crate::catalog::{EDGE, MOUSE, MYSELF};
use crate::value::{compare, to_bool, to_number, to_text, values_equal, Value};
use crate::vm::collision::{self, Edge, Rect};
use crate::vm::scheduler::{Event, Scheduler, Step, Turn};
use crate::vm::{
    normalize_key, seconds_to_frames, wrap_direction, Bubble, BubbleKind, InstanceId, Origin,
    Owner, Thread, WaitState, CLONE_LIMIT, STAGE_HALF_HEIGHT, STAGE_HALF_WIDTH,
};

/// A reporter could not produce a value (unknown sprite, unknown opcode,
/// sprite-only reporter evaluated on the stage).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct EvalError {
    pub block_id: String,
    pub message: String,
    pub sprite_not_found: bool,
}

impl EvalError {
    fn new(block: &Block, message: String) -> Self {
        EvalError { block_id: block.id.clone(), message, sprite_not_found: false }
    }

    fn missing_sprite(block: &Block, name: &str) -> Self {
        EvalError {
            block_id: block.id.clone(),
            message: format!("sprite `{name}` not found"),
            sprite_not_found: true,
        }
    }
}

/// Rounds values within 1e-9 of an integer, hiding trig noise.
pub fn limit_precision(n: f64) -> f64 {
    let r = n.round();
    if (n - r).abs() < 1e-9 {
        r
    } else {
        n
    }
}

fn finite_or_zero(n: f64) -> f64 {
    if n.is_finite() {
        n
    } else {
        0.0
    }
}

/// Floored modulo with the divisor's sign.
fn scratch_mod(n: f64, m: f64) -> f64 {
    let r = n % m;
    if r != 0.0 && (r < 0.0) != (m < 0.0) {
        r + m
    } else {
        r
    }
}

fn is_int_like(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.fract() == 0.0,
        Value::Bool(_) => true,
        Value::String(s) => !s.contains('.'),
    }
}

impl Scheduler {
    pub(crate) fn eval(&mut self, th: &Thread, input: Option<&Input>) -> Result<Value, EvalError> {
        match input {
            None | Some(Input::Stack(_)) => Ok(Value::default()),
            Some(Input::Literal(v)) => Ok(v.clone()),
            Some(Input::Block(b)) => self.eval_block(th, b),
        }
    }

    pub(crate) fn eval_bool(&mut self, th: &Thread, input: Option<&Input>) -> Result<bool, EvalError> {
        match input {
            None => Ok(false),
            other => self.eval(th, other).map(|v| to_bool(&v)),
        }
    }

    pub(crate) fn eval_lenient(&mut self, th: &Thread, input: Option<&Input>, at: &str) -> Value {
        match self.eval(th, input) {
            Ok(v) => v,
            Err(e) => {
                self.warn(Some(at), e.message);
                Value::default()
            }
        }
    }

    pub(crate) fn eval_number_lenient(&mut self, th: &Thread, input: Option<&Input>, at: &str) -> f64 {
        to_number(&self.eval_lenient(th, input, at))
    }

    pub(crate) fn eval_bool_lenient(&mut self, th: &Thread, input: Option<&Input>, at: &str) -> bool {
        match self.eval_bool(th, input) {
            Ok(b) => b,
            Err(e) => {
                self.warn(Some(at), e.message);
                false
            }
        }
    }

    fn arg(&mut self, th: &Thread, b: &Block, slot: &str) -> Value {
        self.eval_lenient(th, b.inputs.get(slot), &b.id)
    }

    fn num(&mut self, th: &Thread, b: &Block, slot: &str) -> f64 {
        to_number(&self.arg(th, b, slot))
    }

    fn text(&mut self, th: &Thread, b: &Block, slot: &str) -> String {
        to_text(&self.arg(th, b, slot))
    }

    fn self_instance(&self, owner: Owner, b: &Block) -> Result<InstanceId, EvalError> {
        match owner {
            Owner::Sprite(id) if self.world.sprite(id).is_some() => Ok(id),
            Owner::Sprite(_) => Err(EvalError::new(b, "sprite instance no longer exists".into())),
            Owner::Stage => Err(EvalError::new(b, format!("`{}` needs a sprite", b.opcode))),
        }
    }

    /// Instance addressed by a sprite selector, resolved relative to `owner`.
    fn resolve(&self, owner: Owner, selector: &str, b: &Block) -> Result<InstanceId, EvalError> {
        if selector == MYSELF {
            return self.self_instance(owner, b);
        }
        self.world
            .original(selector)
            .map(|s| s.instance)
            .ok_or_else(|| EvalError::missing_sprite(b, selector))
    }

    fn rect_of(&self, id: InstanceId) -> Option<Rect> {
        let s = self.world.sprite(id)?;
        let costume = self.program().project.sprites[s.sprite].costumes.get(s.costume)?;
        Some(collision::bounds(s, costume))
    }

    /// Sensing "touching" for an instance. Hidden sprites touch nothing.
    pub fn touching(&self, id: InstanceId, target: &str) -> Option<bool> {
        let me = self.world.sprite(id)?;
        if !me.visible {
            return Some(false);
        }
        let Some(r) = self.rect_of(id) else { return Some(false) };
        match target {
            EDGE => Some(collision::touches_edge(&r)),
            MOUSE => Some(r.contains_point(self.world.input.mouse_x, self.world.input.mouse_y)),
            name => {
                let sprite = self.program().project.sprite_index(name)?;
                Some(self.world.sprites.iter().any(|o| {
                    o.sprite == sprite
                        && o.instance != id
                        && o.visible
                        && self.rect_of(o.instance).is_some_and(|or| r.overlaps(&or))
                }))
            }
        }
    }

    pub fn touching_color(&self, id: InstanceId, color: &str) -> bool {
        match (self.world.sprite(id), self.rect_of(id)) {
            (Some(s), Some(r)) if s.visible => {
                collision::touches_color(&r, color, &self.program().project.stage.color_regions)
            }
            _ => false,
        }
    }

    /// Reads a named attribute of the instance `selector` resolves to.
    pub(crate) fn attribute(
        &self,
        owner: Owner,
        selector: &str,
        attribute: &str,
        b: &Block,
    ) -> Result<Value, EvalError> {
        let id = self.resolve(owner, selector, b)?;
        let s = self.world.sprite(id).expect("resolved instance exists");
        let costumes = &self.program().project.sprites[s.sprite].costumes;
        Ok(match attribute {
            "x" => Value::number(limit_precision(s.x)),
            "y" => Value::number(limit_precision(s.y)),
            "direction" => Value::number(s.direction),
            "costume_number" => Value::number((s.costume + 1) as f64),
            "costume_name" => costumes.get(s.costume).map_or(Value::default(), |c| c.name.as_str().into()),
            "size" => Value::number(s.size.round()),
            "volume" => Value::number(s.volume),
            "say_text" => s.bubble_text().into(),
            "clone_count" => Value::number(self.world.clone_count(s.sprite) as f64),
            "running_scripts" => Value::number(
                self.world
                    .threads
                    .iter()
                    .filter(|t| {
                        t.origin == Origin::Program && t.is_alive() && t.owner == Owner::Sprite(id)
                    })
                    .count() as f64,
            ),
            other => return Err(EvalError::new(b, format!("unknown attribute `{other}`"))),
        })
    }

    fn variable(&self, owner: Owner, name: &str) -> Option<&Value> {
        if let Owner::Sprite(id) = owner {
            if let Some(v) = self.world.sprite(id).and_then(|s| s.variables.get(name)) {
                return Some(v);
            }
        }
        self.world.stage_variables.get(name)
    }

    fn variable_mut(&mut self, owner: Owner, name: &str) -> Option<&mut Value> {
        if let Owner::Sprite(id) = owner {
            let local = self.world.sprite(id).is_some_and(|s| s.variables.contains_key(name));
            if local {
                return self.world.sprite_mut(id).and_then(|s| s.variables.get_mut(name));
            }
        }
        self.world.stage_variables.get_mut(name)
    }

    pub(crate) fn eval_block(&mut self, th: &Thread, b: &Block) -> Result<Value, EvalError> {
        let owner = th.owner;
        let num = |s: &mut Self, slot: &str| -> Result<f64, EvalError> {
            s.eval(th, b.inputs.get(slot)).map(|v| to_number(&v))
        };
        let val = |s: &mut Self, slot: &str| s.eval(th, b.inputs.get(slot));
        let arith = |s: &mut Self, f: fn(f64, f64) -> f64| -> Result<Value, EvalError> {
            let (a, c) = (num(s, "NUM1")?, num(s, "NUM2")?);
            Ok(Value::number(finite_or_zero(f(a, c))))
        };
        Ok(match b.opcode.as_str() {
            "motion_xposition" => {
                let id = self.self_instance(owner, b)?;
                Value::number(limit_precision(self.world.sprite(id).unwrap().x))
            }
            "motion_yposition" => {
                let id = self.self_instance(owner, b)?;
                Value::number(limit_precision(self.world.sprite(id).unwrap().y))
            }
            "motion_direction" => {
                let id = self.self_instance(owner, b)?;
                Value::number(self.world.sprite(id).unwrap().direction)
            }
            "sensing_touchingobject" => {
                let id = self.self_instance(owner, b)?;
                let target = b.field("TOUCHINGOBJECTMENU").unwrap_or("");
                match self.touching(id, target) {
                    Some(t) => Value::Bool(t),
                    None => return Err(EvalError::missing_sprite(b, target)),
                }
            }
            "sensing_touchingcolor" => {
                let id = self.self_instance(owner, b)?;
                let color = to_text(&val(self, "COLOR")?);
                Value::Bool(self.touching_color(id, &color))
            }
            "sensing_keypressed" => {
                let key = normalize_key(b.field("KEY_OPTION").unwrap_or(""));
                let keys = &self.world.input.keys_down;
                Value::Bool(if key == "any" { !keys.is_empty() } else { keys.contains(&key) })
            }
            "sensing_mousedown" => Value::Bool(self.world.input.mouse_down),
            "sensing_mousex" => Value::number(self.world.input.mouse_x),
            "sensing_mousey" => Value::number(self.world.input.mouse_y),
            "sensing_distanceto" => {
                let id = self.self_instance(owner, b)?;
                let me = self.world.sprite(id).unwrap();
                let target = b.field("DISTANCETOMENU").unwrap_or("");
                let to = if target == MOUSE {
                    Some((self.world.input.mouse_x, self.world.input.mouse_y))
                } else {
                    self.world.original(target).map(|o| (o.x, o.y))
                };
                match to {
                    Some((x, y)) => Value::number((me.x - x).hypot(me.y - y)),
                    None => {
                        self.warn(Some(&b.id), format!("distance to unknown sprite `{target}`"));
                        Value::number(10000.0)
                    }
                }
            }
            "operator_add" => arith(self, |a, c| a + c)?,
            "operator_subtract" => arith(self, |a, c| a - c)?,
            "operator_multiply" => arith(self, |a, c| a * c)?,
            "operator_divide" => arith(self, |a, c| if c == 0.0 { 0.0 } else { a / c })?,
            "operator_mod" => arith(self, |a, c| if c == 0.0 { 0.0 } else { scratch_mod(a, c) })?,
            "operator_lt" => {
                let (a, c) = (val(self, "OPERAND1")?, val(self, "OPERAND2")?);
                Value::Bool(compare(&a, &c).is_lt())
            }
            "operator_gt" => {
                let (a, c) = (val(self, "OPERAND1")?, val(self, "OPERAND2")?);
                Value::Bool(compare(&a, &c).is_gt())
            }
            "operator_equals" => {
                let (a, c) = (val(self, "OPERAND1")?, val(self, "OPERAND2")?);
                Value::Bool(values_equal(&a, &c))
            }
            "operator_and" => Value::Bool(
                self.eval_bool(th, b.inputs.get("OPERAND1"))?
                    && self.eval_bool(th, b.inputs.get("OPERAND2"))?,
            ),
            "operator_or" => Value::Bool(
                self.eval_bool(th, b.inputs.get("OPERAND1"))?
                    || self.eval_bool(th, b.inputs.get("OPERAND2"))?,
            ),
            "operator_not" => Value::Bool(!self.eval_bool(th, b.inputs.get("OPERAND"))?),
            "operator_join" => {
                let (a, c) = (val(self, "STRING1")?, val(self, "STRING2")?);
                Value::String(to_text(&a) + &to_text(&c))
            }
            "operator_letter_of" => {
                let index = num(self, "LETTER")? - 1.0;
                let s = to_text(&val(self, "STRING")?);
                let len = s.chars().count() as f64;
                if index < 0.0 || index >= len {
                    Value::default()
                } else {
                    s.chars().nth(index as usize).map_or(Value::default(), |c| c.to_string().into())
                }
            }
            "operator_length" => Value::number(to_text(&val(self, "STRING")?).chars().count() as f64),
            "operator_random" => {
                let (from, to) = (val(self, "FROM")?, val(self, "TO")?);
                let (a, c) = (to_number(&from), to_number(&to));
                let (low, high) = if a <= c { (a, c) } else { (c, a) };
                if low == high {
                    Value::number(low)
                } else if is_int_like(&from) && is_int_like(&to) {
                    let r: f64 = self.world.rng.gen();
                    Value::number(low + (r * (high + 1.0 - low)).floor())
                } else {
                    let r: f64 = self.world.rng.gen();
                    Value::number(r * (high - low) + low)
                }
            }
            "data_variable" => {
                let name = b.field("VARIABLE").unwrap_or("");
                match self.variable(owner, name) {
                    Some(v) => v.clone(),
                    None => return Err(EvalError::new(b, format!("unknown variable `{name}`"))),
                }
            }
            "test_attribute" => {
                let selector = b.field("SPRITE").unwrap_or(MYSELF);
                let attribute = b.field("ATTRIBUTE").unwrap_or("");
                self.attribute(owner, selector, attribute, b)?
            }
            other => return Err(EvalError::new(b, format!("`{other}` is not a reporter"))),
        })
    }

    fn set_position(&mut self, id: InstanceId, x: f64, y: f64) {
        if let Some(s) = self.world.sprite_mut(id) {
            s.x = finite_or_zero(x).clamp(-STAGE_HALF_WIDTH, STAGE_HALF_WIDTH);
            s.y = finite_or_zero(y).clamp(-STAGE_HALF_HEIGHT, STAGE_HALF_HEIGHT);
        }
    }

    fn bounce(&mut self, id: InstanceId) {
        let Some(r) = self.rect_of(id) else { return };
        let Some(edge) = collision::nearest_edge(&r) else { return };
        let s = self.world.sprite(id).unwrap();
        let rad = (90.0 - s.direction).to_radians();
        let (mut dx, mut dy) = (rad.cos(), rad.sin());
        match edge {
            Edge::Left => dx = dx.abs().max(0.2),
            Edge::Right => dx = -dx.abs().max(0.2),
            Edge::Top => dy = -dy.abs().max(0.2),
            Edge::Bottom => dy = dy.abs().max(0.2),
        }
        let direction = wrap_direction(dy.atan2(dx).to_degrees().mul_add(-1.0, 90.0));
        // push back inside so the sprite no longer touches the edge
        let margin = 1.0;
        let (mut x, mut y) = (s.x, s.y);
        if r.min_x <= -STAGE_HALF_WIDTH {
            x += -STAGE_HALF_WIDTH - r.min_x + margin;
        }
        if r.max_x >= STAGE_HALF_WIDTH {
            x -= r.max_x - STAGE_HALF_WIDTH + margin;
        }
        if r.min_y <= -STAGE_HALF_HEIGHT {
            y += -STAGE_HALF_HEIGHT - r.min_y + margin;
        }
        if r.max_y >= STAGE_HALF_HEIGHT {
            y -= r.max_y - STAGE_HALF_HEIGHT + margin;
        }
        self.world.sprite_mut(id).unwrap().direction = direction;
        self.set_position(id, x, y);
    }

    fn switch_costume(&mut self, id: InstanceId, value: &Value) {
        let sprite = self.world.sprite(id).unwrap().sprite;
        let costumes = &self.program().project.sprites[sprite].costumes;
        if costumes.is_empty() {
            return;
        }
        let len = costumes.len();
        let current = self.world.sprite(id).unwrap().costume;
        let text = to_text(value);
        let next = if let Some(i) = costumes.iter().position(|c| c.name == text) {
            Some(i)
        } else if text == "next costume" {
            Some((current + 1) % len)
        } else if text == "previous costume" {
            Some((current + len - 1) % len)
        } else if let Some(n) = crate::value::try_number(value) {
            let n = n.round() as i64 - 1;
            Some(n.rem_euclid(len as i64) as usize)
        } else {
            None
        };
        match next {
            Some(i) => self.world.sprite_mut(id).unwrap().costume = i,
            None => self.warn(None, format!("unknown costume `{text}`")),
        }
    }

    fn set_bubble(&mut self, id: InstanceId, kind: BubbleKind, text: String) {
        let s = self.world.sprite_mut(id).unwrap();
        s.bubble = (!text.is_empty()).then_some(Bubble { kind, text });
        s.bubble_deadline = None;
    }

    fn create_clone(&mut self, of: InstanceId) {
        let Some(src) = self.world.sprite(of).cloned() else { return };
        let live: usize = self.world.sprites.iter().filter(|s| s.is_clone).count();
        if live >= CLONE_LIMIT {
            self.warn(None, format!("clone limit of {CLONE_LIMIT} reached"));
            return;
        }
        let id = InstanceId(self.world.next_instance);
        self.world.next_instance += 1;
        let mut clone = src;
        clone.instance = id;
        clone.is_clone = true;
        clone.bubble = None;
        clone.bubble_deadline = None;
        self.world.sprites.push(clone);
        self.fire(&Event::CloneStart(id));
    }

    fn delete_clone(&mut self, id: InstanceId) {
        let threads: Vec<_> = self
            .world
            .threads
            .iter()
            .filter(|t| t.owner == Owner::Sprite(id) && t.is_alive())
            .map(|t| t.id)
            .collect();
        for t in threads {
            self.kill(t);
        }
        self.world.sprites.retain(|s| s.instance != id);
    }

    /// A timed wait: yields at least one frame.
    fn timed_wait(&mut self, th: &mut Thread, seconds: f64) -> Option<u64> {
        match th.wait {
            WaitState::Timer(deadline) if self.world.clock >= deadline => {
                th.wait = WaitState::None;
                None
            }
            WaitState::Timer(deadline) => Some(deadline),
            _ => {
                let deadline = self.world.clock + seconds_to_frames(seconds).max(1);
                th.wait = WaitState::Timer(deadline);
                Some(deadline)
            }
        }
    }

    pub(crate) fn exec_native(&mut self, th: &mut Thread, b: &Block) -> Step {
        let owner = th.owner;
        let sprite_only = |s: &mut Self| -> Option<InstanceId> {
            match s.self_instance(owner, b) {
                Ok(id) => Some(id),
                Err(e) => {
                    s.warn(Some(&b.id), e.message);
                    None
                }
            }
        };
        match b.opcode.as_str() {
            "motion_movesteps" => {
                let steps = self.num(th, b, "STEPS");
                if let Some(id) = sprite_only(self) {
                    let s = self.world.sprite(id).unwrap();
                    let rad = (90.0 - s.direction).to_radians();
                    let (x, y) = (s.x + steps * rad.cos(), s.y + steps * rad.sin());
                    self.set_position(id, x, y);
                }
            }
            "motion_gotoxy" => {
                let (x, y) = (self.num(th, b, "X"), self.num(th, b, "Y"));
                if let Some(id) = sprite_only(self) {
                    self.set_position(id, x, y);
                }
            }
            "motion_setx" | "motion_changexby" | "motion_sety" | "motion_changeyby" => {
                let slot = match b.opcode.as_str() {
                    "motion_setx" => "X",
                    "motion_changexby" => "DX",
                    "motion_sety" => "Y",
                    _ => "DY",
                };
                let n = self.num(th, b, slot);
                if let Some(id) = sprite_only(self) {
                    let s = self.world.sprite(id).unwrap();
                    let (x, y) = match b.opcode.as_str() {
                        "motion_setx" => (n, s.y),
                        "motion_changexby" => (s.x + n, s.y),
                        "motion_sety" => (s.x, n),
                        _ => (s.x, s.y + n),
                    };
                    self.set_position(id, x, y);
                }
            }
            "motion_pointindirection" => {
                let d = self.num(th, b, "DIRECTION");
                if let Some(id) = sprite_only(self) {
                    self.world.sprite_mut(id).unwrap().direction = wrap_direction(d);
                }
            }
            "motion_pointtowards" => {
                if let Some(id) = sprite_only(self) {
                    let target = b.field("TOWARDS").unwrap_or("");
                    let to = if target == MOUSE {
                        Some((self.world.input.mouse_x, self.world.input.mouse_y))
                    } else {
                        self.world.original(target).map(|o| (o.x, o.y))
                    };
                    match to {
                        Some((tx, ty)) => {
                            let s = self.world.sprite_mut(id).unwrap();
                            let (dx, dy) = (tx - s.x, ty - s.y);
                            if dx != 0.0 || dy != 0.0 {
                                s.direction = wrap_direction(90.0 - dy.atan2(dx).to_degrees());
                            }
                        }
                        None => self.warn(Some(&b.id), format!("point towards unknown sprite `{target}`")),
                    }
                }
            }
            "motion_ifonedgebounce" => {
                if let Some(id) = sprite_only(self) {
                    self.bounce(id);
                }
            }
            "looks_say" | "looks_think" => {
                let text = self.text(th, b, "MESSAGE");
                if let Some(id) = sprite_only(self) {
                    let kind = if b.opcode == "looks_say" { BubbleKind::Say } else { BubbleKind::Think };
                    self.set_bubble(id, kind, text);
                }
            }
            "looks_sayforsecs" => {
                let Some(id) = sprite_only(self) else { return Step::Continue };
                if th.wait == WaitState::None {
                    let text = self.text(th, b, "MESSAGE");
                    let secs = self.num(th, b, "SECS");
                    self.set_bubble(id, BubbleKind::Say, text);
                    let deadline = self.timed_wait(th, secs);
                    self.world.sprite_mut(id).unwrap().bubble_deadline = deadline;
                    return Step::Stay(Turn::Waiting);
                }
                let WaitState::Timer(deadline) = th.wait else { return Step::Continue };
                if self.timed_wait(th, 0.0).is_some() {
                    return Step::Stay(Turn::Waiting);
                }
                if let Some(s) = self.world.sprite_mut(id) {
                    if s.bubble_deadline == Some(deadline) {
                        s.bubble = None;
                        s.bubble_deadline = None;
                    }
                }
            }
            "looks_switchcostumeto" => {
                let v = self.arg(th, b, "COSTUME");
                if let Some(id) = sprite_only(self) {
                    self.switch_costume(id, &v);
                }
            }
            "looks_nextcostume" => {
                if let Some(id) = sprite_only(self) {
                    self.switch_costume(id, &"next costume".into());
                }
            }
            "looks_show" | "looks_hide" => {
                if let Some(id) = sprite_only(self) {
                    self.world.sprite_mut(id).unwrap().visible = b.opcode == "looks_show";
                }
            }
            "looks_setsizeto" | "looks_changesizeby" => {
                let n = self.num(th, b, if b.opcode == "looks_setsizeto" { "SIZE" } else { "CHANGE" });
                if let Some(id) = sprite_only(self) {
                    let s = self.world.sprite_mut(id).unwrap();
                    let size = if b.opcode == "looks_setsizeto" { n } else { s.size + n };
                    s.size = size.clamp(5.0, 500.0);
                }
            }
            "control_wait" => {
                let secs = if th.wait == WaitState::None { self.num(th, b, "DURATION") } else { 0.0 };
                if self.timed_wait(th, secs).is_some() {
                    return Step::Stay(Turn::Waiting);
                }
            }
            "control_wait_until" => {
                if !self.eval_bool_lenient(th, b.inputs.get("CONDITION"), &b.id) {
                    return Step::Stay(Turn::Waiting);
                }
            }
            "control_stop" => match b.field("STOP_OPTION").unwrap_or("all") {
                "this script" => return Step::Finish,
                _ => {
                    if th.origin == Origin::Program {
                        self.stop_program_threads();
                        return Step::Finish;
                    }
                    self.stop_program_threads();
                }
            },
            "control_create_clone_of" => {
                let target = b.field("CLONE_OPTION").unwrap_or(MYSELF);
                match self.resolve(owner, target, b) {
                    Ok(id) => self.create_clone(id),
                    Err(e) => self.warn(Some(&b.id), e.message),
                }
            }
            "control_delete_this_clone" => {
                if let Owner::Sprite(id) = owner {
                    if self.world.sprite(id).is_some_and(|s| s.is_clone) {
                        self.delete_clone(id);
                        return Step::Finish;
                    }
                }
            }
            "event_broadcast" => {
                let m = self.text(th, b, "BROADCAST_INPUT");
                self.fire(&Event::Broadcast(m));
            }
            "event_broadcastandwait" => {
                if let WaitState::Threads(ids) = &th.wait {
                    let pending = ids
                        .iter()
                        .any(|id| self.world.thread(*id).is_some_and(|t| t.is_alive()));
                    if pending {
                        return Step::Stay(Turn::Waiting);
                    }
                    th.wait = WaitState::None;
                } else {
                    let m = self.text(th, b, "BROADCAST_INPUT");
                    let (mut ids, running) = self.fire(&Event::Broadcast(m));
                    ids.extend(running);
                    if !ids.is_empty() {
                        th.wait = WaitState::Threads(ids);
                        return Step::Stay(Turn::Waiting);
                    }
                }
            }
            "data_setvariableto" | "data_changevariableby" => {
                let v = self.arg(th, b, "VALUE");
                let name = b.field("VARIABLE").unwrap_or("").to_owned();
                let set = b.opcode == "data_setvariableto";
                match self.variable_mut(owner, &name) {
                    Some(slot) if set => *slot = v,
                    Some(slot) => *slot = Value::number(finite_or_zero(to_number(slot) + to_number(&v))),
                    None => self.warn(Some(&b.id), format!("unknown variable `{name}`")),
                }
            }
            // hats only mark entry points
            "event_whenflagclicked"
            | "event_whenkeypressed"
            | "event_whenthisspriteclicked"
            | "event_whenbroadcastreceived"
            | "control_start_as_clone" => {}
            other => {
                // reporters used as statements are evaluated for effect
                if let Err(e) = self.eval_block(th, b) {
                    self.warn(Some(&b.id), format!("cannot run `{other}`: {}", e.message));
                }
            }
        }
        Step::Continue
    }
}
