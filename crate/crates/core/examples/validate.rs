// Checks a project against the opcode catalog without running it.

use bbt::io::{parse_project, LoadError};

const BROKEN: &str = r#"{
  "formatVersion": 1,
  "sprites": [{
    "name": "Cat",
    "costumes": ["a"],
    "scripts": [{
      "hat": {"op": "event_whenflagclicked", "id": "flag"},
      "body": [
        {"op": "control_wait_until", "id": "wait", "inputs": {"CONDITION": {"op": "motion_xposition", "id": "x"}}},
        {"op": "test_assert", "id": "stray", "inputs": {"CONDITION": true}},
        {"op": "looks_switchcostumeto", "id": "c", "inputs": {"COSTUME": "b"}}
      ]
    }]
  }]
}"#;

fn main() {
    match parse_project(BROKEN.as_bytes()) {
        Ok(_) => println!("valid"),
        Err(LoadError::Invalid(diags)) => {
            for d in diags {
                println!("{:?}: {d}", d.kind);
            }
        }
        Err(e) => println!("cannot load: {e}"),
    }

    // the same check on an in-memory project
    let ok = bbt::io::load_project(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/timeout.proj.json").as_ref()).unwrap();
    println!("timeout fixture: {} diagnostic(s)", bbt::validate::validate_project(&ok).len());
}
