// Lifts the tests out of a teacher project and injects them into a student
// project that has none. Tests for sprites the student lacks are kept as
// unmatched and report sprite-not-found.

use bbt::io::{extract_suite, inject_suite, load_project};
use bbt::{CancelToken, Scheduler};

fn main() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/boatrace");
    let teacher = load_project(format!("{root}/teacher.proj.json").as_ref()).unwrap();
    let suite = extract_suite(&teacher, "boat race").unwrap();
    println!("suite `{}`: {:?}", suite.suite_name, suite.test_names());

    for student in ["solutions/12_missing_beach_say.proj.json", "renamed_sprite.proj.json"] {
        let project = load_project(format!("{root}/{student}").as_ref()).unwrap();
        let injected = inject_suite(&project, &suite);
        println!("{student}: {} unmatched", injected.unmatched_tests.len());
        let result = Scheduler::from_project(injected, 0).run_suite(&CancelToken::new()).unwrap();
        for t in &result.tests {
            println!("  {:<20} {}", t.name, t.status);
        }
    }
}
