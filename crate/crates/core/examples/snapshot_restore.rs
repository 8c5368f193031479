// Captures the world, lets the program run, then rewinds. Random draws are
// part of the snapshot, so the rerun repeats them exactly.

use bbt::ast::Project;
use bbt::{Block, Event, Scheduler, Script, Sprite, Value};

fn main() {
    let mut p = Project::default();
    let mut cat = Sprite::new("Cat", &["a"]);
    cat.variables.insert("roll".into(), Value::number(0.0));
    let roll = Block::new("operator_random", "r").with_input("FROM", 1).with_input("TO", 6);
    cat.scripts.push(Script::new(
        Some(Block::new("event_whenflagclicked", "flag")),
        vec![Block::new("control_forever", "loop").with_input(
            "SUBSTACK",
            vec![
                Block::new("motion_movesteps", "move").with_input("STEPS", 3),
                Block::new("data_setvariableto", "set").with_field("VARIABLE", "roll").with_input("VALUE", roll),
            ],
        )],
    ));
    p.sprites.push(cat);

    let mut sched = Scheduler::from_project(p, 42);
    sched.dispatch_event(&Event::GreenFlag);
    let snap = sched.snapshot();

    let run = |s: &mut Scheduler| {
        for _ in 0..10 {
            s.run_frame();
        }
        let cat = s.world().original("Cat").unwrap();
        (cat.x, cat.variables["roll"].clone())
    };
    let first = run(&mut sched);
    sched.restore(snap.clone());
    assert!(sched.world() == &snap);
    let second = run(&mut sched);

    println!("first run:  x={} roll={}", first.0, first.1);
    println!("after restore: x={} roll={}", second.0, second.1);
    assert_eq!(first, second);
}
