//! Dynamic values and the Scratch-style coercion rules.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A block-language value. Every value converts to every other kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Number(f64),
    String(String),
}

impl Default for Value {
    fn default() -> Self {
        Value::String(String::new())
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::number(n)
    }
}

impl From<i32> for Value {
    fn from(n: i32) -> Self {
        Value::Number(n as f64)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::String(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::String(s)
    }
}

impl Value {
    /// Builds a number value, mapping NaN to 0.
    pub fn number(n: f64) -> Self {
        Value::Number(if n.is_nan() { 0.0 } else { n })
    }

    pub fn to_number(&self) -> f64 {
        to_number(self)
    }

    pub fn to_bool(&self) -> bool {
        to_bool(self)
    }

    pub fn to_text(&self) -> String {
        to_text(self)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}

/// Strict numeric parse of a string, JavaScript `Number()` style.
/// Returns `None` where JavaScript would produce NaN. Whitespace-only strings
/// parse to zero here; callers that need Scratch's compare rule check that
/// separately.
fn parse_js_number(s: &str) -> Option<f64> {
    let t = s.trim();
    if t.is_empty() {
        return Some(0.0);
    }
    let (sign, body) = match t.as_bytes()[0] {
        b'-' => (-1.0, &t[1..]),
        b'+' => (1.0, &t[1..]),
        _ => (1.0, t),
    };
    if body == "Infinity" {
        return Some(sign * f64::INFINITY);
    }
    let radix = match body.get(..2) {
        Some("0x") | Some("0X") => Some(16),
        Some("0o") | Some("0O") => Some(8),
        Some("0b") | Some("0B") => Some(2),
        _ => None,
    };
    if let Some(radix) = radix {
        // JS rejects signed radix literals.
        if sign < 0.0 || t.starts_with('+') {
            return None;
        }
        let digits = &body[2..];
        if !digits.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return None;
        }
        return u64::from_str_radix(digits, radix).ok().map(|v| v as f64);
    }
    if body.is_empty()
        || body.starts_with(['+', '-'])
        || !body
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'))
        || !body.bytes().any(|b| b.is_ascii_digit())
    {
        return None;
    }
    body.parse::<f64>().ok().map(|v| sign * v)
}

/// Numeric view of a value without falling back to zero.
///
/// `None` means the value is not a number in the comparison sense: a
/// non-numeric string, or a whitespace-only string.
pub fn try_number(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) if n.is_nan() => None,
        Value::Number(n) => Some(*n),
        Value::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
        Value::String(s) => {
            if s.trim().is_empty() {
                None
            } else {
                parse_js_number(s).filter(|n| !n.is_nan())
            }
        }
    }
}

/// Total conversion to a number. Non-numeric strings give 0, never NaN.
pub fn to_number(v: &Value) -> f64 {
    match v {
        Value::Number(n) if n.is_nan() => 0.0,
        Value::Number(n) => *n,
        Value::Bool(b) => {
            if *b {
                1.0
            } else {
                0.0
            }
        }
        Value::String(s) => {
            let t = s.trim();
            if t.eq_ignore_ascii_case("true") {
                1.0
            } else if t.eq_ignore_ascii_case("false") {
                0.0
            } else {
                parse_js_number(t).filter(|n| !n.is_nan()).unwrap_or(0.0)
            }
        }
    }
}

pub fn to_bool(v: &Value) -> bool {
    match v {
        Value::Bool(b) => *b,
        Value::Number(n) => *n != 0.0 && !n.is_nan(),
        Value::String(s) => !(s.is_empty() || s == "0" || s.eq_ignore_ascii_case("false")),
    }
}

/// Formats a number the way the block language displays it: integral values
/// without a fractional part.
pub fn number_to_text(n: f64) -> String {
    if n.is_nan() {
        return "0".to_owned();
    }
    if n.is_infinite() {
        return if n > 0.0 { "Infinity" } else { "-Infinity" }.to_owned();
    }
    if n == 0.0 {
        return "0".to_owned();
    }
    // shortest round-trip digits, laid out by JavaScript's Number#toString rules
    let sci = format!("{:e}", n.abs());
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let k = digits.len() as i32;
    let point = exp.parse::<i32>().unwrap() + 1;
    let body = if k <= point && point <= 21 {
        format!("{digits}{}", "0".repeat((point - k) as usize))
    } else if 0 < point && point <= 21 {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    } else if -6 < point && point <= 0 {
        format!("0.{}{digits}", "0".repeat(-point as usize))
    } else {
        let e = point - 1;
        let sign = if e < 0 { '-' } else { '+' };
        match digits.split_at(1) {
            (d, "") => format!("{d}e{sign}{}", e.abs()),
            (d, rest) => format!("{d}.{rest}e{sign}{}", e.abs()),
        }
    };
    if n < 0.0 { format!("-{body}") } else { body }
}

pub fn to_text(v: &Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => number_to_text(*n),
        Value::String(s) => s.clone(),
    }
}

/// Scratch's three-way compare: numeric when both sides are numbers without
/// fallback, otherwise case-insensitive text.
pub fn compare(a: &Value, b: &Value) -> Ordering {
    match (try_number(a), try_number(b)) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal),
        _ => to_text(a).to_lowercase().cmp(&to_text(b).to_lowercase()),
    }
}

pub fn values_equal(a: &Value, b: &Value) -> bool {
    compare(a, b) == Ordering::Equal
}
