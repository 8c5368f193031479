// Builds a project and its test in code instead of loading JSON, then
// writes it out in the on-disk format.

use bbt::ast::Project;
use bbt::{Block, CancelToken, Scheduler, Script, Sprite};

fn attr(id: &str, name: &str) -> Block {
    Block::new("test_attribute", id).with_field("SPRITE", "_myself_").with_field("ATTRIBUTE", name)
}

fn main() {
    let mut ball = Sprite::new("Ball", &["ball"]);
    ball.scripts.push(Script::new(
        Some(Block::new("event_whenkeypressed", "k").with_field("KEY_OPTION", "space")),
        vec![Block::new("control_repeat", "r")
            .with_input("TIMES", 10)
            .with_input("SUBSTACK", vec![Block::new("motion_changeyby", "up").with_input("DY", 10)])],
    ));
    ball.scripts.push(Script::new(
        Some(Block::new("test_start", "t").with_field("NAME", "space lifts the ball")),
        vec![
            Block::new("test_press_key", "press").with_field("KEY", "space"),
            Block::new("test_wait_all_done", "wait"),
            Block::new("test_assert_equals", "eq").with_input("ACTUAL", attr("y", "y")).with_input("EXPECTED", 100),
            Block::new("test_restore", "restore"),
        ],
    ));
    let mut project = Project::default();
    project.sprites.push(ball);

    let diagnostics = bbt::validate::validate_project(&project);
    assert!(diagnostics.is_empty(), "{diagnostics:?}");

    let mut sched = Scheduler::from_project(project.clone(), 0);
    let result = sched.run_test("space lifts the ball", &CancelToken::new()).unwrap();
    println!("{}: {} in {} frames", result.name, result.status, result.frames);
    println!("{}", String::from_utf8(bbt::io::serialize_project(&project)).unwrap());
}
