use std::fmt::Write as _;

use crate::batch::{BatchReport, CellStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Tap,
}

/// Renders a report. Identical reports render to identical bytes.
pub fn emit_report(r: &BatchReport, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(r),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(r).expect("report serializes");
            out.push(b'\n');
            out
        }
        Format::Tap => tap(r).into_bytes(),
    }
}

fn csv_bytes(r: &BatchReport) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let header = std::iter::once("file").chain(r.tests.iter().map(String::as_str));
    w.write_record(header).expect("write to memory");
    for row in &r.rows {
        let cells = row.cells.iter().map(|c| c.status.as_str());
        w.write_record(std::iter::once(row.file.as_str()).chain(cells)).expect("write to memory");
    }
    w.into_inner().expect("flush to memory")
}

fn yaml_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn tap(r: &BatchReport) -> String {
    let total: usize = r.rows.iter().map(|row| row.cells.len()).sum();
    let mut out = format!("TAP version 13\n1..{total}\n");
    let mut n = 0;
    for row in &r.rows {
        for c in &row.cells {
            n += 1;
            let ok = if c.status == CellStatus::Pass { "ok" } else { "not ok" };
            let _ = writeln!(out, "{ok} {n} - {}::{}", row.file, c.test);
            if c.status != CellStatus::Pass {
                let _ = writeln!(out, "  ---\n  status: {}", c.status.as_str());
                if let Some(d) = &c.detail {
                    let _ = writeln!(out, "  message: {}", yaml_string(d));
                }
                let _ = writeln!(out, "  frames: {}\n  ...", c.frames);
            }
        }
    }
    if r.aborted {
        out.push_str("Bail out! aborted\n");
    }
    out
}
