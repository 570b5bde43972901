use std::fmt::Write as _;

use gumball::report::{flatten, Report};

use crate::config::Format;

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = report.to_json();
            s.push('\n');
            s
        }
        Format::Csv => csv_rows(report),
        Format::Text => text(report),
    }
}

/// One row per reported value and one per violation, each tagged with the
/// overall verdict.
fn csv_rows(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let verdict = report.verdict.to_string();
    w.write_record(["command", "verdict", "key", "exact", "approx"])
        .expect("in-memory write");
    for (key, e, a) in flatten(&report.values) {
        w.write_record([report.command.as_str(), &verdict, &key, &e, &a])
            .expect("in-memory write");
    }
    for (i, v) in report.violations.iter().enumerate() {
        let key = format!("violations[{i}]");
        w.write_record([report.command.as_str(), &verdict, &key, &v.to_string(), ""])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn text(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}: {}", report.command, report.verdict);
    for (k, v) in &report.params {
        let _ = writeln!(s, "  param {k} = {v}");
    }
    for (key, e, a) in flatten(&report.values) {
        if a.is_empty() {
            let _ = writeln!(s, "  {key} = {e}");
        } else {
            let _ = writeln!(s, "  {key} = {e} (~{a})");
        }
    }
    for v in &report.violations {
        let _ = writeln!(s, "  violation {v}");
    }
    let _ = writeln!(s, "  time {} ms", report.timing_ms);
    s
}
