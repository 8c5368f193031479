// Grades every student solution against the teacher's suite and prints the
// file x test matrix as CSV.

use std::path::PathBuf;

use bbt::batch::{batch_run, emit_report, BatchConfig, Format};

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/boatrace");
    let suite = bbt::io::load_suite(&root.join("boatrace.bbt.json")).unwrap();
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(root.join("solutions")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();

    let report = batch_run(&files, &suite, &BatchConfig::default()).unwrap();
    print!("{}", String::from_utf8(emit_report(&report, Format::Csv)).unwrap());
    for t in &report.summary {
        println!("# {}: {}/{} pass", t.test, t.pass, report.rows.len());
    }
}
