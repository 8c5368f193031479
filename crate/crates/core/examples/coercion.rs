// How values convert between text, numbers and booleans.

use bbt::value::{compare, to_bool, to_number, to_text};
use bbt::Value;

fn main() {
    let samples: [Value; 10] = [
        "10".into(),
        " 3.5 ".into(),
        "0x1F".into(),
        "apple".into(),
        "".into(),
        "false".into(),
        true.into(),
        Value::number(1e21),
        Value::number(1e-7),
        Value::number(-0.5),
    ];
    println!("{:<10} {:>12} {:>6}  text", "value", "number", "bool");
    for v in &samples {
        let shown = match v {
            Value::String(s) => format!("{s:?}"),
            other => to_text(other),
        };
        println!("{shown:<10} {:>12} {:>6}  {:?}", to_text(&Value::number(to_number(v))), to_bool(v), to_text(v));
    }

    // numbers compare numerically, anything else as case-insensitive text
    for (a, b) in [("10", "9"), ("10", "9a"), ("Apple", "apple"), (" ", "0")] {
        println!("{a:?} vs {b:?}: {:?}", compare(&a.into(), &b.into()));
    }
}
