// Drives the scheduler directly: events, keyboard and mouse changes, and
// frame stepping without any test blocks.

use bbt::vm::InputChange;
use bbt::{Event, Scheduler};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/boatrace/teacher.proj.json");
    let project = bbt::io::load_project(path.as_ref()).unwrap();
    let mut sched = Scheduler::from_project(project, 0);

    sched.dispatch_event(&Event::GreenFlag);
    sched.inject_input(InputChange::MouseMove { x: 200.0, y: 160.0 });

    // the boat heads for the mouse until it reaches the beach
    let frames = sched
        .advance_until(|s| s.world().original("Boat").unwrap().bubble_text() == "YEAH!", 600)
        .expect("boat reaches the beach");
    let boat = sched.world().original("Boat").unwrap();
    println!("beach after {frames} frames at ({:.1}, {:.1}), costume {}", boat.x, boat.y, boat.costume);

    sched.stop_all();
    println!("threads alive after stop: {}", sched.program_threads_alive());
}
