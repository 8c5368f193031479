// Renders one batch report as CSV, JSON and TAP.

use bbt::batch::{batch_run, emit_report, BatchConfig, Format};

fn main() {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/boatrace");
    let suite = bbt::io::load_suite(format!("{root}/boatrace.bbt.json").as_ref()).unwrap();
    let files = ["01_correct", "14_no_mouse_follow"].map(|f| format!("{root}/solutions/{f}.proj.json").into());
    let report = batch_run(&files, &suite, &BatchConfig::default()).unwrap();

    for format in [Format::Csv, Format::Tap, Format::Json] {
        let bytes = emit_report(&report, format);
        println!("---- {format:?} ({} bytes)", bytes.len());
        let text = String::from_utf8(bytes).unwrap();
        for line in text.lines().take(24) {
            println!("{line}");
        }
    }
}
