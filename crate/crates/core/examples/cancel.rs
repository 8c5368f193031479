// Aborts a long test from another thread. The running test ends as
// error(aborted) and the tests after it are never started.

use std::time::Duration;

use bbt::{CancelToken, Scheduler};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/timeout.proj.json");
    let project = bbt::io::load_project(path.as_ref()).unwrap();
    let mut sched = Scheduler::from_project(project, 0);
    // a long budget so the cancel lands first
    sched.set_default_timeout(30 * 60 * 60);

    let cancel = CancelToken::new();
    let remote = cancel.clone();
    let canceller = std::thread::spawn(move || {
        std::thread::sleep(Duration::from_millis(50));
        remote.cancel();
    });
    let suite = sched.run_suite(&cancel).unwrap();
    canceller.join().unwrap();

    for t in &suite.tests {
        println!("{:<20} {} after {} frames", t.name, t.status, t.frames);
    }
    println!("aborted: {}", suite.aborted);
}
