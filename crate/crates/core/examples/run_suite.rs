// Runs every test of a project in order. Each test starts from the state
// the previous one left behind, so tests that end in a restore block stay
// independent.

use bbt::{CancelToken, Scheduler};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/loop_sensing.proj.json");
    let project = bbt::io::load_project(path.as_ref()).unwrap();
    let mut sched = Scheduler::from_project(project, 0);
    let suite = sched.run_suite(&CancelToken::new()).unwrap();

    for t in &suite.tests {
        let why = t.first_failure().map(|m| format!(" ({m})")).unwrap_or_default();
        println!("{:<10} {}{why}", t.status.to_string(), t.name);
    }
    println!("{}/{} passed", suite.passed(), suite.tests.len());
}
